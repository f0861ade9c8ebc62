#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "bic/analysis.hpp"
#include "bic/error.hpp"
#include "bic/evolve.hpp"
#include "bic/spectrum.hpp"

using namespace bic;
using std::numbers::pi;

namespace {

ProbabilitySeries sample(double lo, double hi, double dt, const std::function<double(double)>& f) {
  ProbabilitySeries s;
  for (std::size_t i = 0;; ++i) {
    const double t = lo + dt * static_cast<double>(i);
    if (t > hi + 1e-12) break;
    s.times.push_back(t);
    s.values.push_back(f(t));
  }
  return s;
}

double sq_cos(double t, double phi) {
  const double c = std::cos(2 * t - phi);
  return c * c;
}

AmplitudeSeries ode(const ModelParams& p, double t_max, std::size_t samples) {
  EvolveOptions o;
  o.t_max = t_max;
  o.n_samples = samples;
  return evolve(p, perp_state(p.g(), o.resolved_sites()), o);
}

}  // namespace

TEST_CASE("fit kind names") {
  for (auto k : {FitKind::PowerLaw, FitKind::Phase, FitKind::Exponential, FitKind::Contrast, FitKind::Parabolic}) {
    CHECK(parse_fit_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_fit_kind("spline"), InvalidParameter);
  FitReport r;
  CHECK_THROWS_AS(r.at("exponent"), InvalidParameter);
}

TEST_CASE("peaks") {
  const auto s = sample(0.0, 10.0, 0.01, [](double t) { return sq_cos(t, pi / 4); });
  const auto peaks = find_peaks(s, 0.0, 10.0);
  REQUIRE(peaks.size() == 7);
  for (std::size_t n = 0; n < peaks.size(); ++n) {
    CHECK(peaks[n].t == doctest::Approx((n * pi + pi / 4) / 2).epsilon(1e-6));
    CHECK(peaks[n].value == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK(find_peaks(s, 0.5, 0.6).empty());
}

TEST_CASE("power law on a synthetic far-zone signal") {
  const auto s = sample(10.0, 100.0, 0.01, [](double t) { return sq_cos(t, pi / 4) / (t * t * t); });
  const auto r = fit_power_law(s, 10.0, 100.0);
  CHECK(r.kind == FitKind::PowerLaw);
  CHECK(std::abs(r.at("exponent") + 3.0) < 0.01);
  CHECK(r.at("amplitude") == doctest::Approx(1.0).epsilon(0.02));
  CHECK(r.n_points >= 3);
  CHECK(r.t_lo == 10.0);
  CHECK(r.t_hi == 100.0);
  CHECK(std::isfinite(r.residual_rms));
}

TEST_CASE("power law is scale equivariant") {
  const auto s = sample(10.0, 100.0, 0.01, [](double t) { return sq_cos(t, 0.3) / std::pow(t, 1.7); });
  const auto a = fit_power_law(s, 10.0, 100.0);
  for (double c : {1e-6, 3.0, 250.0}) {
    ProbabilitySeries scaled = s;
    for (auto& v : scaled.values) v *= c;
    const auto b = fit_power_law(scaled, 10.0, 100.0);
    CHECK(std::abs(b.at("exponent") - a.at("exponent")) < 1e-10);
    CHECK(std::abs(b.at("log_amplitude") - a.at("log_amplitude") - std::log(c)) < 1e-10);
  }
}

TEST_CASE("power law needs three peaks") {
  const auto s = sample(10.0, 100.0, 0.01, [](double t) { return sq_cos(t, pi / 4) / t; });
  CHECK_THROWS_AS(fit_power_law(s, 10.0, 12.0), FitError);
  const auto flat = sample(1.0, 50.0, 0.1, [](double t) { return 1.0 / t; });
  CHECK_THROWS_AS(fit_power_law(flat, 1.0, 50.0), FitError);
  CHECK_THROWS_AS(fit_power_law(s, 50.0, 20.0), InvalidParameter);
}

TEST_CASE("phase on a synthetic near-zone signal") {
  const auto s = sample(10.0, 100.0, 0.01, [](double t) { return sq_cos(t, pi / 4) / t; });
  const auto r = fit_phase(s, 10.0, 100.0, -1.0);
  CHECK(r.kind == FitKind::Phase);
  CHECK(std::abs(r.at("phase") - pi / 4) < 0.01);
  CHECK(!r.low_confidence);
  for (double phi : {0.0, 0.4, 1.2, 2.5, 3.0}) {
    const auto q = sample(10.0, 40.0, 0.01, [&](double t) { return sq_cos(t, phi) / (t * t * t); });
    const double got = fit_phase(q, 10.0, 40.0, -3.0).at("phase");
    CHECK(got >= 0.0);
    CHECK(got < pi);
    const double d = std::remainder(got - phi, pi);
    CHECK(std::abs(d) < 1e-9);
  }
}

TEST_CASE("phase under different detrending exponents") {
  // Exact only when the detrending matches the envelope; a mismatch of 3 in the exponent costs about 0.02 rad here.
  const auto s = sample(10.0, 100.0, 0.01, [](double t) { return sq_cos(t, 0.6) / (t * t * t); });
  const double ref = fit_phase(s, 10.0, 100.0, -3.0).at("phase");
  for (double p : {-2.0, -1.0, 0.0}) {
    const double got = fit_phase(s, 10.0, 100.0, p).at("phase");
    CHECK(std::abs(std::remainder(got - ref, pi)) < 0.025);
  }
}

TEST_CASE("phase window and confidence") {
  const auto s = sample(0.0, 20.0, 0.01, [](double t) { return sq_cos(t, pi / 4); });
  CHECK_THROWS_AS(fit_phase(s, 1.0, 1.0 + pi, 0.0), FitError);
  const auto noise = sample(1.0, 20.0, 0.01, [](double t) { return 1.0 + 0.9 * std::sin(37.0 * t * t); });
  CHECK(fit_phase(noise, 1.0, 20.0, 0.0).low_confidence);
}

TEST_CASE("exponential fit on a synthetic shelf") {
  const auto s = sample(0.0, 200.0, 0.1, [](double t) { return 0.003 * std::exp(-0.0109 * t); });
  const auto r = fit_exponential(s, 10.0, 150.0);
  CHECK(r.at("rate") == doctest::Approx(0.0109).epsilon(0.01));
  CHECK(r.at("amplitude") == doctest::Approx(0.003).epsilon(0.01));
  CHECK(r.at("log_amplitude") == doctest::Approx(std::log(0.003)).epsilon(1e-6));
  const auto bad = sample(0.0, 10.0, 0.1, [](double t) { return t - 5.0; });
  CHECK_THROWS_AS(fit_exponential(bad, 0.0, 10.0), FitError);
  CHECK_THROWS_AS(fit_exponential(s, 10.0, 10.2), FitError);
}

TEST_CASE("contrast") {
  const auto pure = sample(10.0, 60.0, 0.005, [](double t) { return sq_cos(t, pi / 4) / (t * t * t); });
  const auto r = oscillation_contrast(pure, 10.0, 60.0, -3.0);
  CHECK(r.kind == FitKind::Contrast);
  CHECK(r.at("contrast") == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.at("periods") >= 30.0);
  const auto half = sample(10.0, 60.0, 0.005, [](double t) { return (1.0 + 0.5 * std::cos(4 * t)) / t; });
  CHECK(oscillation_contrast(half, 10.0, 60.0, -1.0).at("contrast") == doctest::Approx(0.5).epsilon(1e-4));
  CHECK_THROWS_AS(oscillation_contrast(pure, 10.0, 11.0, -3.0), FitError);
}

TEST_CASE("parabolic onset") {
  const auto s = sample(0.0, 0.05, 0.001, [](double t) { return 1.0 - 1.81 * t * t; });
  CHECK(fit_parabolic_onset(s, 0.0, 0.05).at("c") == doctest::Approx(1.81).epsilon(1e-12));
  const auto zero = sample(0.0, 0.0, 1.0, [](double) { return 1.0; });
  CHECK_THROWS_AS(fit_parabolic_onset(s, 0.0, 0.002), FitError);
  CHECK(zero.times.size() == 1);
}

TEST_CASE("low-pass filter") {
  std::vector<double> t;
  std::vector<std::complex<double>> v, carrier;
  for (int i = 0; i <= 4000; ++i) {
    t.push_back(0.01 * i);
    v.emplace_back(2.0, -1.0);
    carrier.push_back(std::complex<double>(0.5, 0.0) + std::exp(std::complex<double>(0.0, 2.0 * t.back())));
  }
  const auto flat = low_pass(t, v, 4 * pi);
  REQUIRE(!flat.times.empty());
  CHECK(flat.times.front() >= 2 * pi - 0.01);
  CHECK(flat.times.back() <= 40.0 - 2 * pi + 0.01);
  for (const auto& x : flat.values) CHECK(std::abs(x - std::complex<double>(2.0, -1.0)) < 1e-12);
  const auto smooth = low_pass(t, carrier, 4 * pi);
  for (const auto& x : smooth.values) CHECK(std::abs(x - 0.5) < 1e-3);
  CHECK_THROWS_AS(low_pass(t, v, 0.0), InvalidParameter);
  std::vector<double> uneven = {0.0, 0.1, 0.3, 0.4};
  std::vector<std::complex<double>> four(4, 1.0);
  CHECK_THROWS_AS(low_pass(uneven, four, 0.2), InvalidParameter);
}

TEST_CASE("fitters are deterministic") {
  const auto s = sample(10.0, 100.0, 0.01, [](double t) { return (0.2 + sq_cos(t, 1.0)) / (t * t); });
  const auto a = fit_phase(s, 10.0, 100.0, -2.0);
  const auto b = fit_phase(s, 10.0, 100.0, -2.0);
  CHECK(a.params == b.params);
  CHECK(a.residual_rms == b.residual_rms);
  CHECK(fit_power_law(s, 10.0, 100.0).params == fit_power_law(s, 10.0, 100.0).params);
  CHECK(oscillation_contrast(s, 10.0, 100.0, -2.0).params == oscillation_contrast(s, 10.0, 100.0, -2.0).params);
}

TEST_CASE("power law of direct evolution at g = 1") {
  const auto p = survival(ode(ModelParams(1.0), 200.0, 8001));
  CHECK(std::abs(fit_power_law(p, 5.0, 200.0).at("exponent") + 1.0) < 0.05);
}

TEST_CASE("detuned shelf in the impurity pair but not in psi_perp") {
  const ModelParams params(0.9, 0.2);
  const auto s = ode(params, 100.0, 5001);
  const auto d = low_pass(s.times, s.amp_d, 4 * pi);
  const auto one = low_pass(s.times, s.amp_1, 4 * pi);
  const auto ov = low_pass(s.times, s.overlap, 4 * pi);
  ProbabilitySeries p1d{d.times, {}}, pp{ov.times, {}};
  for (std::size_t i = 0; i < d.times.size(); ++i) {
    p1d.values.push_back(std::norm(d.values[i]) + std::norm(one.values[i]));
    pp.values.push_back(std::norm(ov.values[i]));
  }
  const auto shelf = fit_exponential(p1d, 15.0, 60.0);
  double gamma = 0.0;
  for (const auto& st : discrete_spectrum(params)) {
    if (st.kind == StateKind::Resonance) gamma = -2.0 * st.z.imag();
  }
  REQUIRE(gamma > 0.0);
  CHECK(shelf.at("amplitude") > 0.00302 / 3);
  CHECK(shelf.at("amplitude") < 0.00302 * 3);
  CHECK(shelf.at("rate") > gamma / 2);
  CHECK(shelf.at("rate") < gamma * 2);
  CHECK(fit_exponential(pp, 15.0, 60.0).at("amplitude") < 1e-4);
}
