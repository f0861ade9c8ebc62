#include "bic/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "bic/error.hpp"

namespace bic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPeriod = kPi / 2.0;  // period of cos^2(2t - phi)

void check_window(const ProbabilitySeries& s, double t_lo, double t_hi) {
  if (s.times.size() != s.values.size()) {
    throw InvalidParameter("series times and values differ in length");
  }
  if (!(t_lo < t_hi)) throw InvalidParameter("fit window needs t_lo < t_hi");
}

std::vector<std::size_t> window_indices(const ProbabilitySeries& s, double t_lo, double t_hi) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (s.times[i] >= t_lo && s.times[i] <= t_hi) idx.push_back(i);
  }
  return idx;
}

// Solves the normal equations of a small dense least-squares problem.
template <std::size_t K>
std::array<double, K> least_squares(const std::vector<std::array<double, K>>& rows,
                                    const std::vector<double>& rhs) {
  std::array<std::array<double, K + 1>, K> a{};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < K; ++i) {
      for (std::size_t j = 0; j < K; ++j) a[i][j] += rows[r][i] * rows[r][j];
      a[i][K] += rows[r][i] * rhs[r];
    }
  }
  for (std::size_t c = 0; c < K; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < K; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    if (a[c][c] == 0.0) throw FitError("singular least-squares system");
    for (std::size_t r = 0; r < K; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j <= K; ++j) a[r][j] -= f * a[c][j];
    }
  }
  std::array<double, K> x{};
  for (std::size_t i = 0; i < K; ++i) x[i] = a[i][K] / a[i][i];
  return x;
}

struct Line {
  double slope;
  double intercept;
  double rms;
};

Line fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::array<double, 2>> rows;
  rows.reserve(x.size());
  for (double xi : x) rows.push_back({1.0, xi});
  const auto c = least_squares<2>(rows, y);
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (c[0] + c[1] * x[i]);
    ss += r * r;
  }
  return {c[1], c[0], std::sqrt(ss / static_cast<double>(x.size()))};
}

}  // namespace

std::string_view to_string(FitKind kind) {
  switch (kind) {
    case FitKind::PowerLaw: return "PowerLaw";
    case FitKind::Phase: return "Phase";
    case FitKind::Exponential: return "Exponential";
    case FitKind::Contrast: return "Contrast";
    case FitKind::Parabolic: return "Parabolic";
  }
  return "?";
}

FitKind parse_fit_kind(std::string_view name) {
  for (FitKind k : {FitKind::PowerLaw, FitKind::Phase, FitKind::Exponential, FitKind::Contrast,
                    FitKind::Parabolic}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidParameter("unknown fit kind '" + std::string(name) + "'");
}

double FitReport::at(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw InvalidParameter("fit report has no parameter '" + key + "'");
  return it->second;
}

std::vector<Peak> find_peaks(const ProbabilitySeries& s, double t_lo, double t_hi) {
  check_window(s, t_lo, t_hi);
  std::vector<Peak> peaks;
  const auto& t = s.times;
  const auto& v = s.values;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
    Peak p{t[i], v[i]};
    const double d0 = t[i - 1] - t[i];
    const double d2 = t[i + 1] - t[i];
    const double s0 = (v[i - 1] - v[i]) / d0;
    const double s2 = (v[i + 1] - v[i]) / d2;
    const double a = (s0 - s2) / (d0 - d2);
    const double b = s0 - a * d0;
    if (a < 0.0) {
      const double shift = -b / (2.0 * a);
      if (shift > d0 && shift < d2) {
        p.t = t[i] + shift;
        p.value = v[i] - b * b / (4.0 * a);
      }
    }
    peaks.push_back(p);
  }
  return peaks;
}

FitReport fit_power_law(const ProbabilitySeries& s, double t_lo, double t_hi) {
  const auto peaks = find_peaks(s, t_lo, t_hi);
  if (peaks.size() < 3) {
    throw FitError("power-law fit needs at least 3 peaks in [" + std::to_string(t_lo) + ", " +
                   std::to_string(t_hi) + "], found " + std::to_string(peaks.size()));
  }
  std::vector<double> x, y;
  for (const auto& p : peaks) {
    if (!(p.value > 0.0) || !(p.t > 0.0)) throw FitError("power-law fit needs positive peaks");
    x.push_back(std::log(p.t));
    y.push_back(std::log(p.value));
  }
  const Line l = fit_line(x, y);
  FitReport r;
  r.kind = FitKind::PowerLaw;
  r.params = {{"exponent", l.slope}, {"log_amplitude", l.intercept}, {"amplitude", std::exp(l.intercept)}};
  r.t_lo = t_lo;
  r.t_hi = t_hi;
  r.residual_rms = l.rms;
  r.n_points = peaks.size();
  return r;
}

FitReport fit_phase(const ProbabilitySeries& s, double t_lo, double t_hi, double detrend_exponent) {
  check_window(s, t_lo, t_hi);
  if (t_hi - t_lo < 3.0 * kPeriod) throw FitError("phase fit needs at least three periods");
  const auto idx = window_indices(s, t_lo, t_hi);
  if (idx.size() < 8) throw FitError("phase fit needs at least 8 samples in the window");
  std::vector<std::array<double, 3>> rows;
  std::vector<double> y;
  for (std::size_t i : idx) {
    const double t = s.times[i];
    if (detrend_exponent != 0.0 && !(t > 0.0)) throw FitError("detrending needs t > 0");
    const double scale = detrend_exponent == 0.0 ? 1.0 : std::pow(t, -detrend_exponent);
    rows.push_back({1.0, std::cos(4.0 * t), std::sin(4.0 * t)});
    y.push_back(s.values[i] * scale);
  }
  const auto c = least_squares<3>(rows, y);
  double ss = 0.0;
  double mean = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double fit = c[0] + c[1] * rows[r][1] + c[2] * rows[r][2];
    ss += (y[r] - fit) * (y[r] - fit);
    mean += y[r];
  }
  mean /= static_cast<double>(y.size());
  double phi = 0.5 * std::atan2(c[2], c[1]);
  if (phi < 0.0) phi += kPi;
  if (phi >= kPi) phi -= kPi;
  const double amp = 2.0 * std::hypot(c[1], c[2]);
  FitReport r;
  r.kind = FitKind::Phase;
  r.params = {{"phase", phi}, {"amplitude", amp}, {"offset", c[0] - 0.5 * amp}};
  r.t_lo = t_lo;
  r.t_hi = t_hi;
  r.residual_rms = std::sqrt(ss / static_cast<double>(y.size()));
  r.n_points = y.size();
  r.low_confidence = r.residual_rms > 0.2 * std::abs(mean);
  return r;
}

FitReport fit_exponential(const ProbabilitySeries& s, double t_lo, double t_hi) {
  check_window(s, t_lo, t_hi);
  const auto idx = window_indices(s, t_lo, t_hi);
  if (idx.size() < 4) throw FitError("exponential fit needs at least 4 samples");
  std::vector<double> x, y;
  for (std::size_t i : idx) {
    if (!(s.values[i] > 0.0)) throw FitError("exponential fit needs positive values");
    x.push_back(s.times[i]);
    y.push_back(std::log(s.values[i]));
  }
  const Line l = fit_line(x, y);
  FitReport r;
  r.kind = FitKind::Exponential;
  r.params = {{"rate", -l.slope}, {"amplitude", std::exp(l.intercept)}, {"log_amplitude", l.intercept}};
  r.t_lo = t_lo;
  r.t_hi = t_hi;
  r.residual_rms = l.rms;
  r.n_points = idx.size();
  return r;
}

FitReport oscillation_contrast(const ProbabilitySeries& s, double t_lo, double t_hi,
                               double detrend_exponent) {
  check_window(s, t_lo, t_hi);
  const auto periods = static_cast<std::size_t>(std::floor((t_hi - t_lo) / kPeriod + 1e-12));
  if (periods < 2) throw FitError("contrast needs at least two periods");
  std::vector<double> contrasts;
  std::size_t used = 0;
  std::size_t i = 0;
  for (std::size_t j = 0; j < periods; ++j) {
    const double a = t_lo + static_cast<double>(j) * kPeriod;
    const double b = a + kPeriod;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::size_t n = 0;
    while (i < s.times.size() && s.times[i] < a) ++i;
    for (std::size_t k = i; k < s.times.size() && s.times[k] < b; ++k) {
      const double t = s.times[k];
      const double y = s.values[k] * (detrend_exponent == 0.0 ? 1.0 : std::pow(t, -detrend_exponent));
      lo = std::min(lo, y);
      hi = std::max(hi, y);
      ++n;
    }
    if (n < 3) throw FitError("contrast needs at least 3 samples per period");
    used += n;
    contrasts.push_back(hi + lo > 0.0 ? (hi - lo) / (hi + lo) : 0.0);
  }
  const double mean = std::accumulate(contrasts.begin(), contrasts.end(), 0.0) /
                      static_cast<double>(contrasts.size());
  double var = 0.0;
  for (double c : contrasts) var += (c - mean) * (c - mean);
  FitReport r;
  r.kind = FitKind::Contrast;
  r.params = {{"contrast", mean}, {"periods", static_cast<double>(periods)},
              {"min_contrast", *std::min_element(contrasts.begin(), contrasts.end())},
              {"max_contrast", *std::max_element(contrasts.begin(), contrasts.end())}};
  r.t_lo = t_lo;
  r.t_hi = t_hi;
  r.residual_rms = std::sqrt(var / static_cast<double>(contrasts.size()));
  r.n_points = used;
  return r;
}

FitReport fit_parabolic_onset(const ProbabilitySeries& s, double t_lo, double t_hi) {
  check_window(s, t_lo, t_hi);
  const auto idx = window_indices(s, t_lo, t_hi);
  if (idx.size() < 4) throw FitError("parabolic fit needs at least 4 samples");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i : idx) {
    const double t2 = s.times[i] * s.times[i];
    num += (1.0 - s.values[i]) * t2;
    den += t2 * t2;
  }
  if (!(den > 0.0)) throw FitError("parabolic fit window has no nonzero times");
  const double c = num / den;
  double ss = 0.0;
  for (std::size_t i : idx) {
    const double t2 = s.times[i] * s.times[i];
    const double res = s.values[i] - (1.0 - c * t2);
    ss += res * res;
  }
  FitReport r;
  r.kind = FitKind::Parabolic;
  r.params = {{"c", c}};
  r.t_lo = t_lo;
  r.t_hi = t_hi;
  r.residual_rms = std::sqrt(ss / static_cast<double>(idx.size()));
  r.n_points = idx.size();
  return r;
}

ComplexSeries low_pass(std::span<const double> times, std::span<const std::complex<double>> values,
                       double width) {
  if (times.size() != values.size()) throw InvalidParameter("low_pass: length mismatch");
  if (times.size() < 3) throw InvalidParameter("low_pass needs at least 3 samples");
  if (!(width > 0.0)) throw InvalidParameter("low_pass width must be positive");
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs((times[i] - times[i - 1]) - dt) > 1e-9 * std::max(1.0, dt)) {
      throw InvalidParameter("low_pass needs a uniform time grid");
    }
  }
  const auto m = static_cast<std::size_t>(std::llround(0.5 * width / dt));
  std::vector<double> w(2 * m + 1);
  double wsum = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double x = (static_cast<double>(j) - static_cast<double>(m)) / static_cast<double>(m + 1);
    w[j] = 0.5 * (1.0 + std::cos(kPi * x));
    wsum += w[j];
  }
  ComplexSeries out;
  if (times.size() < 2 * m + 1) return out;
  for (std::size_t i = m; i + m < times.size(); ++i) {
    std::complex<double> acc{};
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * values[i - m + j];
    out.times.push_back(times[i]);
    out.values.push_back(acc / wsum);
  }
  return out;
}

}  // namespace bic
