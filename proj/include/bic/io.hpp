#pragma once

// File formats: evolution and analytic CSV, spectrum and fit-report JSON,
// with readers for everything written here.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bic/analysis.hpp"
#include "bic/closedform.hpp"
#include "bic/evolve.hpp"
#include "bic/spectrum.hpp"

namespace bic::io {

/// Shortest of 15, 16 or 17 significant digits that parses back to `x` exactly.
std::string format_number(double x);

/// Parses a number written by format_number (also inf / nan). Throws InvalidParameter.
double parse_number(const std::string& text);

/// Ordered "key = value" metadata, written as '#'-prefixed lines before the header.
using Metadata = std::vector<std::pair<std::string, std::string>>;

struct CsvTable {
  Metadata metadata;
  std::vector<std::string> warnings;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws InvalidParameter if absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> numeric_column(const std::string& name) const;
  const std::string* find_metadata(const std::string& key) const;
};

void write_csv(std::ostream& os, const CsvTable& table);
CsvTable read_csv(std::istream& is);

/// Columns t, P_perp, P_1d, re_A, im_A, norm_err.
CsvTable evolve_table(const AmplitudeSeries& series, Metadata metadata);

struct EvolveData {
  std::vector<double> t, p_perp, p_1d, re_a, im_a, norm_err;
};
EvolveData evolve_data(const CsvTable& table);

struct AnalyticRow {
  double t;
  double value;
  ApproximationTag tag;
};

/// Columns t, value, tag.
CsvTable analytic_table(const std::vector<AnalyticRow>& rows, Metadata metadata);
std::vector<AnalyticRow> analytic_rows(const CsvTable& table);

struct SpectrumReport {
  ModelParams params;
  std::vector<DiscreteState> states;
  Timescales timescales;
};

nlohmann::ordered_json to_json(const SpectrumReport& report);
SpectrumReport spectrum_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const FitReport& report);
FitReport fit_report_from_json(const nlohmann::ordered_json& j);

/// Writes `text` to `path`, or to stdout when path is "-" or empty.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace bic::io
