#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bic/analysis.hpp"
#include "bic/error.hpp"
#include "bic/evolve.hpp"
#include "bic/numeric/special.hpp"
#include "bic/spectrum.hpp"

using namespace bic;
using std::numbers::pi;

namespace {

AmplitudeSeries run(double g, double eps, double t_max, std::size_t samples, const char* state = "perp") {
  EvolveOptions o;
  o.t_max = t_max;
  o.n_samples = samples;
  const std::size_t n = o.resolved_sites();
  const StateVector psi = std::string(state) == "bic" ? bic_state(g, n) : perp_state(g, n);
  return evolve(ModelParams(g, eps), psi, o);
}

double max_norm_drift(const AmplitudeSeries& s) {
  double m = 0.0;
  for (double v : s.norm) m = std::max(m, std::abs(v - 1.0));
  return m;
}

}  // namespace

TEST_CASE("auto sites") {
  CHECK(auto_sites(100.0) == 282);
  CHECK(auto_sites(6000.0) == 15032);
  CHECK(auto_sites(1.0) == 35);
  CHECK(auto_sites(399'987.0) == 1'000'000);
  CHECK_THROWS_AS(auto_sites(400'000.0), InvalidParameter);
  CHECK_THROWS_AS(auto_sites(0.0), InvalidParameter);
}

TEST_CASE("options validation") {
  EvolveOptions o;
  CHECK_NOTHROW(o.validate());
  o.rel_tol = 1e-5;
  CHECK_THROWS_AS(o.validate(), InvalidParameter);
  o = {};
  o.abs_tol = 1e-11;
  CHECK_THROWS_AS(o.validate(), InvalidParameter);
  o = {};
  o.n_samples = 1;
  CHECK_THROWS_AS(o.validate(), InvalidParameter);
  o = {};
  o.t_max = -1.0;
  CHECK_THROWS_AS(o.validate(), InvalidParameter);
  o = {};
  o.n_sites = 2;
  CHECK_THROWS_AS(o.validate(), InvalidParameter);
  CHECK(parse_time_grid("log") == TimeGrid::Log);
  CHECK(parse_time_grid(to_string(TimeGrid::Linear)) == TimeGrid::Linear);
  CHECK_THROWS_AS(parse_time_grid("cubic"), InvalidParameter);
}

TEST_CASE("sample grids") {
  EvolveOptions o;
  o.t_max = 50.0;
  o.n_samples = 101;
  const auto lin = sample_times(o);
  CHECK(lin.front() == 0.0);
  CHECK(lin.back() == 50.0);
  CHECK(lin[1] == doctest::Approx(0.5));
  o.grid = TimeGrid::Log;
  const auto lg = sample_times(o);
  CHECK(lg.front() == 0.0);
  CHECK(lg[1] == doctest::Approx(5e-3));
  CHECK(lg.back() == 50.0);
  for (std::size_t i = 2; i + 1 < lg.size(); ++i) CHECK(lg[i + 1] / lg[i] == doctest::Approx(lg[2] / lg[1]));
}

TEST_CASE("bic is stationary") {
  const auto s = run(0.9, 0.0, 100.0, 1001, "bic");
  const auto p = survival(s);
  double worst = 0.0;
  for (double v : p.values) worst = std::max(worst, std::abs(v - 1.0));
  CHECK(worst < 1e-8);
  CHECK(p.times.front() == 0.0);
}

TEST_CASE("bare chain matches the image propagator") {
  // g -> 0 decouples |d>; <1|psi(t)> is then J1(2t)/t on the semi-infinite chain.
  EvolveOptions o;
  o.t_max = 5.0;
  o.n_samples = 51;
  const std::size_t n = o.resolved_sites();
  const auto s = evolve(ModelParams(1e-12, 0.0), basis_state(1, n), o);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    worst = std::max(worst, std::abs(s.overlap[i] - numeric::bessel_j1_ratio(s.times[i])));
  }
  CHECK(worst < 1e-8);
  CHECK(std::abs(s.overlap.back() - numeric::bessel_j1_ratio(5.0)) < 1e-8);
}

TEST_CASE("unitarity") {
  EvolveOptions o;
  o.t_max = 500.0;
  o.n_samples = 11;
  const std::size_t n = o.resolved_sites();
  const auto s = evolve(ModelParams(0.98, 0.0), perp_state(0.98, n), o);
  CHECK(s.norm.back() >= 1.0 - 1e-9);
  CHECK(s.norm.back() <= 1.0 + 1e-9);
  CHECK(s.max_edge_weight < 1e-10);
  CHECK(!s.warning);
  for (auto [g, eps] : {std::pair{0.7, 0.0}, std::pair{1.1, 0.0}, std::pair{0.9, 0.35}}) {
    const auto r = run(g, eps, 1000.0, 201);
    CHECK(max_norm_drift(r) <= 1e-9);
    CHECK(r.max_edge_weight < 1e-10);
  }
}

TEST_CASE("truncation warning") {
  EvolveOptions o;
  o.t_max = 50.0;
  o.n_samples = 51;
  o.n_sites = 20;
  const auto s = evolve(ModelParams(0.9), perp_state(0.9, 20), o);
  REQUIRE(s.warning);
  CHECK(s.warning->find("truncation") != std::string::npos);
  CHECK(s.max_edge_weight > kEdgeWarningThreshold);
  CHECK(s.n_sites == 20);
}

TEST_CASE("survival and nonescape basics") {
  const auto s = run(1.0, 0.0, 110.0, 11001);
  const auto p = survival(s);
  CHECK(p.values.front() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(nonescape(s).values.front() == doctest::Approx(1.0).epsilon(1e-14));
  for (double v : p.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-9);
  }
  // Envelope near t = 100 from the nearest peak.
  const auto peaks = find_peaks(p, 98.5, 101.5);
  REQUIRE(!peaks.empty());
  const auto best = *std::min_element(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    return std::abs(a.t - 100.0) < std::abs(b.t - 100.0);
  });
  CHECK(best.value * best.t == doctest::Approx(1.0 / pi).epsilon(0.05));
  CHECK(1.0 / (pi * 100.0) == doctest::Approx(3.183e-3).epsilon(1e-4));
}

TEST_CASE("nonescape equals survival without detuning") {
  const auto s = run(0.9, 0.0, 100.0, 1001);
  const auto a = survival(s);
  const auto b = nonescape(s);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  CHECK(worst < 1e-10);
}

TEST_CASE("detuned nonescape shelf") {
  // Smoothing the amplitudes removes the band-edge carriers and keeps the slow pole part.
  const auto s = run(0.9, 0.2, 100.0, 5001);
  const auto d = low_pass(s.times, s.amp_d, 4.0 * pi);
  const auto one = low_pass(s.times, s.amp_1, 4.0 * pi);
  ProbabilitySeries shelf{d.times, {}};
  for (std::size_t i = 0; i < d.times.size(); ++i) shelf.values.push_back(std::norm(d.values[i]) + std::norm(one.values[i]));
  const auto fit = fit_exponential(shelf, 10.0, 60.0);
  CHECK(fit.at("amplitude") > 0.003 / 3.0);
  CHECK(fit.at("amplitude") < 0.003 * 3.0);
}

TEST_CASE("incomplete decay with bound states") {
  const auto p = survival(run(1.1, 0.0, 200.0, 4001));
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < p.times.size(); ++i) {
    if (p.times[i] >= 100.0) {
      sum += p.values[i];
      ++n;
    }
  }
  const double mean = sum / n;
  // The time average is dominated by the constant part of |A|^2; both fall near 0.0151.
  CHECK(mean > 0.01);
  CHECK(mean < 0.02);
}

TEST_CASE("zeno regime") {
  for (double g : {0.9, 1.0}) {
    EvolveOptions o;
    o.t_max = 0.05;
    o.n_samples = 51;
    const std::size_t n = o.resolved_sites();
    const auto p = survival(evolve(ModelParams(g), perp_state(g, n), o));
    const auto fit = fit_parabolic_onset(p, 0.0, 0.05);
    // Variance of H in psi_perp.
    CHECK(fit.at("c") == doctest::Approx(1.0 + g * g).epsilon(1e-3));
    CHECK(fit.at("c") == doctest::Approx(timescales(g).zeno_c).epsilon(0.05));
  }
}

TEST_CASE("grid refinement stability") {
  EvolveOptions o;
  o.t_max = 100.0;
  o.n_samples = 201;
  const std::size_t n = o.resolved_sites();
  const auto a = survival(evolve(ModelParams(0.9), perp_state(0.9, n), o));
  EvolveOptions f = o;
  f.n_samples = 401;
  f.rel_tol = 0.5 * o.rel_tol;
  f.abs_tol = 0.5 * o.abs_tol;
  const auto b = survival(evolve(ModelParams(0.9), perp_state(0.9, n), f));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    REQUIRE(b.times[2 * i] == doctest::Approx(a.times[i]));
    worst = std::max(worst, std::abs(a.values[i] - b.values[2 * i]));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("explicit sample times") {
  EvolveOptions o;
  o.t_max = 10.0;
  const std::size_t n = o.resolved_sites();
  const auto psi = perp_state(0.9, n);
  const auto s = evolve_at(ModelParams(0.9), psi, o, {0.0, 0.5, 0.5, 3.0, 10.0});
  CHECK(s.times.size() == 5);
  CHECK(s.overlap[1] == s.overlap[2]);
  CHECK_THROWS_AS(evolve_at(ModelParams(0.9), psi, o, {1.0, 0.5}), InvalidParameter);
  CHECK_THROWS_AS(evolve_at(ModelParams(0.9), psi, o, {0.0, 11.0}), InvalidParameter);
  CHECK_THROWS_AS(evolve(ModelParams(0.9), perp_state(0.9, n + 1), o), InvalidParameter);
}
