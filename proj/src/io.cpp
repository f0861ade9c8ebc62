#include "bic/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "bic/error.hpp"

namespace bic::io {

namespace {

using nlohmann::ordered_json;

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

ordered_json optional_time(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return "inf";
  return *v;
}

std::optional<double> optional_time(const ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw InvalidParameter("unexpected timescale value '" + j.get<std::string>() + "'");
  }
  return j.get<double>();
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, prec);
    std::string s(buf, res.ptr);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    if (back == x || prec == 17) return s;
  }
  return {};
}

double parse_number(const std::string& text) {
  const std::string s = trim(text);
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) {
    throw InvalidParameter("not a number: '" + text + "'");
  }
  return v;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw InvalidParameter("CSV has no column '" + name + "'");
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(parse_number(r.at(c)));
  return out;
}

const std::string* CsvTable::find_metadata(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return &v;
  }
  return nullptr;
}

void write_csv(std::ostream& os, const CsvTable& table) {
  for (const auto& [k, v] : table.metadata) os << "# " << k << " = " << v << '\n';
  for (const auto& w : table.warnings) os << "# WARNING: " << w << '\n';
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    os << (i ? "," : "") << table.header[i];
  }
  os << '\n';
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      if (body.rfind("WARNING:", 0) == 0) {
        t.warnings.push_back(trim(body.substr(8)));
        continue;
      }
      const auto eq = body.find(" = ");
      if (eq == std::string::npos) {
        t.metadata.emplace_back(body, "");
      } else {
        t.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 3));
      }
      continue;
    }
    auto cells = split_commas(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != t.header.size()) {
        throw InvalidParameter("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(t.header.size()));
      }
      t.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw InvalidParameter("CSV has no header line");
  return t;
}

CsvTable evolve_table(const AmplitudeSeries& s, Metadata metadata) {
  CsvTable t;
  t.metadata = std::move(metadata);
  if (s.warning) t.warnings.push_back(*s.warning);
  t.header = {"t", "P_perp", "P_1d", "re_A", "im_A", "norm_err"};
  const auto perp = survival(s);
  const auto p1d = nonescape(s);
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    t.rows.push_back({format_number(s.times[i]), format_number(perp.values[i]),
                      format_number(p1d.values[i]), format_number(s.overlap[i].real()),
                      format_number(s.overlap[i].imag()), format_number(s.norm[i] - 1.0)});
  }
  return t;
}

EvolveData evolve_data(const CsvTable& table) {
  EvolveData d;
  d.t = table.numeric_column("t");
  d.p_perp = table.numeric_column("P_perp");
  d.p_1d = table.numeric_column("P_1d");
  d.re_a = table.numeric_column("re_A");
  d.im_a = table.numeric_column("im_A");
  d.norm_err = table.numeric_column("norm_err");
  return d;
}

CsvTable analytic_table(const std::vector<AnalyticRow>& rows, Metadata metadata) {
  CsvTable t;
  t.metadata = std::move(metadata);
  t.header = {"t", "value", "tag"};
  for (const auto& r : rows) {
    t.rows.push_back({format_number(r.t), format_number(r.value), std::string(to_string(r.tag))});
  }
  return t;
}

std::vector<AnalyticRow> analytic_rows(const CsvTable& table) {
  const auto ct = table.column("t");
  const auto cv = table.column("value");
  const auto cg = table.column("tag");
  std::vector<AnalyticRow> out;
  for (const auto& r : table.rows) {
    out.push_back({parse_number(r[ct]), parse_number(r[cv]), parse_approximation_tag(r[cg])});
  }
  return out;
}

ordered_json to_json(const SpectrumReport& r) {
  ordered_json j;
  j["params"] = {{"g", r.params.g()}, {"eps_d", r.params.eps_d()}, {"j_hop", ModelParams::j_hop()}};
  ordered_json states = ordered_json::array();
  for (const auto& s : r.states) {
    states.push_back({{"re_z", s.z.real()},
                      {"im_z", s.z.imag()},
                      {"sheet", std::string(to_string(s.sheet))},
                      {"kind", std::string(to_string(s.kind))},
                      {"re_k", s.k.real()},
                      {"im_k", s.k.imag()},
                      {"re_residue", s.residue_weight.real()},
                      {"im_residue", s.residue_weight.imag()},
                      {"band_edge", s.band_edge}});
  }
  j["states"] = std::move(states);
  const auto& ts = r.timescales;
  j["timescales"] = {{"t_zeno", ts.t_zeno},        {"t_delta", optional_time(ts.t_delta)},
                     {"t_vr", optional_time(ts.t_vr)}, {"t_br", optional_time(ts.t_br)},
                     {"delta_g", ts.delta_g},      {"zeno_c", ts.zeno_c}};
  return j;
}

SpectrumReport spectrum_from_json(const ordered_json& j) {
  try {
    const auto& p = j.at("params");
    SpectrumReport r{ModelParams(p.at("g").get<double>(), p.at("eps_d").get<double>()), {}, {}};
    for (const auto& s : j.at("states")) {
      DiscreteState d;
      d.z = cplx(s.at("re_z").get<double>(), s.at("im_z").get<double>());
      d.sheet = parse_sheet(s.at("sheet").get<std::string>());
      d.kind = parse_state_kind(s.at("kind").get<std::string>());
      d.k = cplx(s.at("re_k").get<double>(), s.at("im_k").get<double>());
      d.residue_weight = cplx(s.at("re_residue").get<double>(), s.at("im_residue").get<double>());
      d.band_edge = s.at("band_edge").get<bool>();
      r.states.push_back(d);
    }
    const auto& ts = j.at("timescales");
    r.timescales.t_zeno = ts.at("t_zeno").get<double>();
    r.timescales.t_delta = optional_time(ts.at("t_delta"));
    r.timescales.t_vr = optional_time(ts.at("t_vr"));
    r.timescales.t_br = optional_time(ts.at("t_br"));
    r.timescales.delta_g = ts.at("delta_g").get<double>();
    r.timescales.zeno_c = ts.at("zeno_c").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(std::string("malformed spectrum JSON: ") + e.what());
  }
}

ordered_json to_json(const FitReport& r) {
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  return {{"kind", std::string(to_string(r.kind))},
          {"params", std::move(params)},
          {"window", {r.t_lo, r.t_hi}},
          {"residual_rms", r.residual_rms},
          {"n_points", r.n_points},
          {"low_confidence", r.low_confidence}};
}

FitReport fit_report_from_json(const ordered_json& j) {
  try {
    FitReport r;
    r.kind = parse_fit_kind(j.at("kind").get<std::string>());
    for (const auto& [k, v] : j.at("params").items()) r.params[k] = v.get<double>();
    r.t_lo = j.at("window").at(0).get<double>();
    r.t_hi = j.at("window").at(1).get<double>();
    r.residual_rms = j.at("residual_rms").get<double>();
    r.n_points = j.at("n_points").get<std::size_t>();
    r.low_confidence = j.value("low_confidence", false);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(std::string("malformed fit report JSON: ") + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidParameter("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw InvalidParameter("failed writing '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidParameter("cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace bic::io
