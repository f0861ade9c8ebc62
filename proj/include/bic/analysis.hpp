#pragma once

// Signatures extracted from sampled probability curves: power-law envelopes,
// oscillation phases, exponential shelves and oscillation contrast.

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bic/evolve.hpp"

namespace bic {

enum class FitKind { PowerLaw, Phase, Exponential, Contrast, Parabolic };

std::string_view to_string(FitKind kind);
FitKind parse_fit_kind(std::string_view name);

struct FitReport {
  FitKind kind = FitKind::PowerLaw;
  std::map<std::string, double> params;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double residual_rms = 0.0;
  std::size_t n_points = 0;
  /// Residual large compared with the signal (rms > 0.2 * mean).
  bool low_confidence = false;

  double at(const std::string& key) const;
};

struct Peak {
  double t;
  double value;
};

/// Local maxima strictly inside [t_lo, t_hi], refined by a parabola through
/// the sample and its two neighbours.
std::vector<Peak> find_peaks(const ProbabilitySeries& series, double t_lo, double t_hi);

/// Least-squares line through (log t, log P) of the peaks in the window.
/// params: exponent, log_amplitude, amplitude. Throws FitError with fewer than 3 peaks.
FitReport fit_power_law(const ProbabilitySeries& series, double t_lo, double t_hi);

/// Fits P t^{-p} = c0 + c1 cos 4t + c2 sin 4t on the window, p = detrend_exponent,
/// and reports phi in [0, pi) from c0 + A cos^2(2t - phi) form.
/// params: phase, amplitude, offset. Needs at least three periods (3 pi / 2).
FitReport fit_phase(const ProbabilitySeries& series, double t_lo, double t_hi,
                    double detrend_exponent);

/// Least squares on (t, log P). params: rate, amplitude, log_amplitude.
FitReport fit_exponential(const ProbabilitySeries& series, double t_lo, double t_hi);

/// Mean over whole periods (length pi/2) of (max - min)/(max + min) of P t^{-p},
/// p = detrend_exponent (-3 in the far zone, -1 in the near zone).
/// params: contrast, periods. Needs at least two periods.
FitReport oscillation_contrast(const ProbabilitySeries& series, double t_lo, double t_hi,
                               double detrend_exponent = -3.0);

/// Least-squares C in P = 1 - C t^2 on the window. params: c.
FitReport fit_parabolic_onset(const ProbabilitySeries& series, double t_lo, double t_hi);

struct ComplexSeries {
  std::vector<double> times;
  std::vector<std::complex<double>> values;
};

/// Hann-weighted moving average of width `width` on a uniform grid. Entries
/// whose window would leave the grid are dropped; the result keeps the times
/// of the retained centres.
ComplexSeries low_pass(std::span<const double> times, std::span<const std::complex<double>> values,
                       double width);

}  // namespace bic
