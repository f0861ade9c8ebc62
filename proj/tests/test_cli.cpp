#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "bic/error.hpp"
#include "bic/io.hpp"
#include "cli.hpp"

using namespace bic;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bicdecay_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "bicdecay");
  return cli::run(args);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

io::CsvTable csv(const fs::path& p) {
  std::ifstream f(p);
  return io::read_csv(f);
}

std::multiset<std::string> spectrum_kinds(const fs::path& p) {
  const auto r = io::spectrum_from_json(nlohmann::ordered_json::parse(slurp(p)));
  std::multiset<std::string> kinds;
  for (const auto& s : r.states) kinds.insert(std::string(to_string(s.kind)));
  return kinds;
}

}  // namespace

TEST_CASE("exit codes for invalid requests") {
  CHECK(run({"spectrum", "--g", "-1", "--out", scratch("x.json").string()}) == cli::kInvalid);
  CHECK(run({"figure", "--id", "fig9"}) == cli::kInvalid);
  CHECK(run({"analytic", "--g", "1.0", "--tags", "FarZoneProb", "--tmin", "30", "--tmax", "300", "--out",
             scratch("far.csv").string()}) == cli::kInvalid);
  CHECK(run({"analytic", "--g", "0.7", "--out", scratch("none.csv").string()}) == cli::kInvalid);
  CHECK(run({"evolve", "--frobnicate"}) == cli::kInvalid);
  CHECK(run({"evolve", "--state", "psi"}) == cli::kInvalid);
  CHECK(run({"evolve", "--sites", "2.5"}) == cli::kInvalid);
  CHECK(run({"evolve", "--rel-tol", "1e-3"}) == cli::kInvalid);
  CHECK(run({}) == cli::kInvalid);
  CHECK(run({"--help"}) == cli::kOk);
}

TEST_CASE("spectrum kinds") {
  const auto out = scratch("spectrum.json");
  REQUIRE(run({"spectrum", "--g", "1.1", "--eps-d", "0", "--out", out.string()}) == 0);
  CHECK(spectrum_kinds(out) == std::multiset<std::string>{"BIC", "Bound", "Bound"});
  REQUIRE(run({"spectrum", "--g", "0.9", "--eps-d", "0", "--out", out.string()}) == 0);
  CHECK(spectrum_kinds(out) == std::multiset<std::string>{"BIC", "VirtualBound", "VirtualBound"});
  REQUIRE(run({"spectrum", "--g", "0.9", "--eps-d", "0.2", "--out", out.string()}) == 0);
  const auto r = io::spectrum_from_json(nlohmann::ordered_json::parse(slurp(out)));
  int resonances = 0;
  for (const auto& s : r.states) {
    if (s.kind == StateKind::Resonance) {
      ++resonances;
      CHECK(s.z.imag() < 0.0);
    }
  }
  CHECK(resonances == 1);
}

TEST_CASE("evolve output") {
  const auto out = scratch("bic.csv");
  REQUIRE(run({"evolve", "--g", "0.9", "--eps-d", "0", "--state", "bic", "--tmax", "100", "--no-meta-time", "--out",
               out.string()}) == 0);
  const auto t = csv(out);
  CHECK(t.header == std::vector<std::string>{"t", "P_perp", "P_1d", "re_A", "im_A", "norm_err"});
  const auto d = io::evolve_data(t);
  CHECK(d.t.size() == 1001);
  for (double p : d.p_perp) CHECK(std::abs(p - 1.0) < 1e-8);
  REQUIRE(t.find_metadata("g") != nullptr);
  CHECK(*t.find_metadata("g") == "0.9");
  CHECK(*t.find_metadata("state") == "bic");
  CHECK(t.find_metadata("rel_tol") != nullptr);
  CHECK(t.find_metadata("n_sites") != nullptr);
  CHECK(t.find_metadata("tool") != nullptr);
  CHECK(t.find_metadata("timestamp") == nullptr);
  CHECK(t.warnings.empty());
}

TEST_CASE("truncation warning line") {
  const auto out = scratch("short.csv");
  REQUIRE(run({"evolve", "--g", "0.9", "--tmax", "50", "--samples", "51", "--sites", "20", "--out", out.string()}) ==
          0);
  CHECK(slurp(out).find("# WARNING") != std::string::npos);
  CHECK(!csv(out).warnings.empty());
}

TEST_CASE("w state run") {
  const auto out = scratch("w1.csv");
  REQUIRE(run({"evolve", "--g", "0.9", "--state", "w:1.0", "--tmax", "200", "--samples", "401", "--out",
               out.string()}) == 0);
  const auto t = csv(out);
  CHECK(*t.find_metadata("state") == "w:1");
  const auto d = io::evolve_data(t);
  CHECK(d.p_perp.front() == doctest::Approx(1.0));
  CHECK(d.p_perp.back() < 0.01);
}

TEST_CASE("determinism with fixed metadata") {
  const auto a = scratch("det_a.csv");
  const auto b = scratch("det_b.csv");
  const std::vector<std::string> base = {"evolve", "--g", "0.7", "--tmax", "30", "--samples", "301", "--no-meta-time",
                                         "--out"};
  auto args = base;
  args.push_back(a.string());
  REQUIRE(run(args) == 0);
  args.back() = b.string();
  REQUIRE(run(args) == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("separate processes write identical files") {
  const std::string exe = BICDECAY_EXE;
  const auto a = scratch("proc_a.json");
  const auto b = scratch("proc_b.json");
  for (const auto& p : {a, b}) {
    const std::string cmd = "\"" + exe + "\" spectrum --g 0.9 --eps-d 0.35 --out \"" + p.string() + "\"";
    REQUIRE(std::system(cmd.c_str()) == 0);
  }
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("config file with flag precedence") {
  const auto cfg = scratch("run.cfg");
  {
    std::ofstream f(cfg);
    f << "# evolution settings\n"
      << "g = 0.8\n"
      << "tmax = 20\n"
      << "samples = 41\n"
      << "no-meta-time = true\n";
  }
  const auto out = scratch("cfg.csv");
  REQUIRE(run({"evolve", "--config", cfg.string(), "--g", "0.6", "--out", out.string()}) == 0);
  const auto t = csv(out);
  CHECK(*t.find_metadata("g") == "0.6");
  CHECK(*t.find_metadata("t_max") == "20");
  CHECK(t.rows.size() == 41);
  CHECK(t.find_metadata("timestamp") == nullptr);
  {
    std::ofstream f(cfg);
    f << "g 0.8\n";
  }
  CHECK(run({"evolve", "--config", cfg.string()}) == cli::kInvalid);
  CHECK(run({"evolve", "--config", scratch("missing.cfg").string()}) == cli::kInvalid);
}

TEST_CASE("analytic overlay") {
  const auto out = scratch("an.csv");
  REQUIRE(run({"analytic", "--g", "1.0", "--tags", "WNearZoneG1", "--tmin", "5", "--tmax", "500", "--samples", "100",
               "--no-meta-time", "--out", out.string()}) == 0);
  const auto t = csv(out);
  const auto rows = io::analytic_rows(t);
  REQUIRE(rows.size() == 100);
  for (const auto& r : rows) CHECK(r.value == doctest::Approx(16.0 / (9.0 * std::numbers::pi * r.t)).epsilon(1e-14));
  CHECK(t.find_metadata("window.WNearZoneG1") != nullptr);

  REQUIRE(run({"analytic", "--g", "0.98", "--tags", "NearZoneEarlyProb,FarZoneProb", "--tmin", "1", "--tmax", "100",
               "--samples", "50", "--out", out.string()}) == 0);
  const auto u = csv(out);
  CHECK(io::analytic_rows(u).size() == 100);
  REQUIRE(u.find_metadata("outside_window.FarZoneProb") != nullptr);
  CHECK(*u.find_metadata("outside_window.FarZoneProb") == "50 of 50");
}

TEST_CASE("compare report") {
  const auto prefix = scratch("cmp");
  REQUIRE(run({"compare", "--g", "0.9", "--eps-d", "0", "--tmax", "50", "--no-meta-time", "--out",
               prefix.string()}) == 0);
  const auto j = nlohmann::ordered_json::parse(slurp(prefix.string() + ".json"));
  CHECK(j.at("max_dev_quadrature").get<double>() < 1e-6);
  CHECK(j.at("max_dev_bessel").get<double>() < 1e-6);
  CHECK(j.at("fits").is_array());
  const auto t = csv(prefix.string() + ".csv");
  CHECK(t.rows.size() == 101);
  CHECK(t.column("re_A_bessel") == 5);

  REQUIRE(run({"compare", "--g", "0.9", "--eps-d", "0.2", "--tmax", "100", "--out", prefix.string()}) == 0);
  const auto k = nlohmann::ordered_json::parse(slurp(prefix.string() + ".json"));
  CHECK(k.at("max_dev_bessel").is_null());
  bool shelf = false;
  for (const auto& f : k.at("fits")) {
    const auto r = io::fit_report_from_json(f.at("report"));
    if (f.at("name") == "shelf_1d") {
      shelf = true;
      CHECK(r.at("amplitude") > 0.001);
      CHECK(r.at("amplitude") < 0.009);
    }
  }
  CHECK(shelf);
  CHECK(k.at("predicted").at("rate").get<double>() > 0.0);
}

TEST_CASE("fig1 sweep") {
  const auto dir = scratch("fig1");
  REQUIRE(run({"figure", "--id", "fig1", "--no-meta-time", "--out", dir.string()}) == 0);
  const auto t = csv(dir / "fig1_spectrum.csv");
  CHECK(t.header == std::vector<std::string>{"g", "z_bic", "z_plus", "z_minus", "kind"});
  CHECK(t.rows.size() == 200);
  const auto g = t.numeric_column("g");
  const auto zp = t.numeric_column("z_plus");
  const auto kind = t.column("kind");
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(zp[i] - (g[i] + 1.0 / g[i])) < 1e-10);
    CHECK(t.rows[i][kind] == (g[i] > 1.0 ? "Bound" : "VirtualBound"));
  }
}

TEST_CASE("initial state parsing") {
  CHECK(cli::parse_state_spec("bic").kind == cli::StateSpec::Kind::Bic);
  CHECK(cli::parse_state_spec("w:2.5").w == 2.5);
  CHECK(cli::parse_state_spec("w:-1").label() == "w:-1");
  CHECK_THROWS_AS(cli::parse_state_spec("w:"), InvalidParameter);
  CHECK_THROWS_AS(cli::parse_state_spec("w:inf"), InvalidParameter);
  CHECK(cli::figure_ids().size() == 11);
}
