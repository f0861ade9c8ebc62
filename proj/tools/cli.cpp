#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "bic/analysis.hpp"
#include "bic/error.hpp"
#include "bic/spectrum.hpp"

namespace bic::cli {

namespace {

using nlohmann::ordered_json;

constexpr double kPi = std::numbers::pi;
constexpr double kFitSpacing = 0.02;

std::string num(double x) { return io::format_number(x); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    const auto a = cur.find_first_not_of(" \t");
    const auto b = cur.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(cur.substr(a, b - a + 1));
  }
  return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = n == 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  if (n > 0) t.back() = hi;
  return t;
}

ordered_json fit_entry(const std::string& name, const FitReport& r) {
  ordered_json j = {{"name", name}, {"report", io::to_json(r)}};
  if (r.low_confidence) j["low_confidence"] = true;
  return j;
}

// Reads "key = value" lines and appends "--key value" for keys not already on the command line.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream f(path);
  if (!f) throw InvalidParameter("cannot open config file '" + path + "'");
  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    const auto parts = split(line, '=');
    if (parts.empty()) continue;
    if (eq == std::string::npos || parts.size() != 2) {
      throw InvalidParameter("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string& key = parts[0];
    if (key == "config") throw InvalidParameter("config files cannot include other config files");
    if (given.count(key)) continue;
    if (key == "no-meta-time") {
      if (parts[1] == "true" || parts[1] == "1") args.push_back("--no-meta-time");
      continue;
    }
    args.push_back("--" + key);
    args.push_back(parts[1]);
  }
  return args;
}

void write_json(const std::string& path, const ordered_json& j) { io::write_text(path, j.dump(2) + "\n"); }

std::string csv_text(const io::CsvTable& t) {
  std::ostringstream os;
  io::write_csv(os, t);
  return os.str();
}

}  // namespace

std::string StateSpec::label() const {
  switch (kind) {
    case Kind::Bic: return "bic";
    case Kind::Perp: return "perp";
    case Kind::W: return "w:" + num(w);
  }
  return "?";
}

StateSpec parse_state_spec(const std::string& text) {
  if (text == "bic") return {StateSpec::Kind::Bic, 0.0};
  if (text == "perp") return {StateSpec::Kind::Perp, 0.0};
  if (text.rfind("w:", 0) == 0) {
    const double w = io::parse_number(text.substr(2));
    if (!std::isfinite(w)) throw InvalidParameter("w must be finite");
    return {StateSpec::Kind::W, w};
  }
  throw InvalidParameter("unknown state '" + text + "' (expected bic, perp or w:<x>)");
}

StateVector make_state(const StateSpec& spec, double g, std::size_t n_sites) {
  switch (spec.kind) {
    case StateSpec::Kind::Bic: return bic_state(g, n_sites);
    case StateSpec::Kind::Perp: return perp_state(g, n_sites);
    case StateSpec::Kind::W: return w_state(g, spec.w, n_sites);
  }
  throw InvalidParameter("unknown state");
}

io::Metadata base_metadata(const RunConfig& c) {
  io::Metadata m = {
      {"tool", std::string(kToolName) + " " + kToolVersion},
      {"command", c.command},
      {"g", num(c.g)},
      {"eps_d", num(c.eps_d)},
      {"j_hop", "1"},
  };
  if (c.command != "spectrum" && c.command != "analytic") m.emplace_back("state", c.state.label());
  m.emplace_back("t_max", num(c.evolve.t_max));
  m.emplace_back("samples", std::to_string(c.evolve.n_samples));
  m.emplace_back("grid", std::string(to_string(c.evolve.grid)));
  if (c.command != "analytic") {
    m.emplace_back("rel_tol", num(c.evolve.rel_tol));
    m.emplace_back("abs_tol", num(c.evolve.abs_tol));
    const std::size_t n = c.evolve.resolved_sites();
    m.emplace_back("n_sites", std::to_string(n) + (c.evolve.n_sites ? "" : " (auto)"));
    m.emplace_back("integrator", "variable-step variable-order Adams-Bashforth-Moulton PECE (orders 1-12)");
  }
  if (c.meta_time) m.emplace_back("timestamp", utc_timestamp());
  return m;
}

int run_spectrum(const RunConfig& c) {
  const ModelParams p(c.g, c.eps_d);
  io::SpectrumReport r{p, discrete_spectrum(p), timescales(c.g)};
  write_json(c.out, io::to_json(r));
  return kOk;
}

int run_evolve(const RunConfig& c) {
  const ModelParams p(c.g, c.eps_d);
  const std::size_t n = c.evolve.resolved_sites();
  const auto series = evolve(p, make_state(c.state, c.g, n), c.evolve);
  auto meta = base_metadata(c);
  meta.emplace_back("steps", std::to_string(series.steps));
  meta.emplace_back("max_edge_weight", num(series.max_edge_weight));
  io::write_text(c.out, csv_text(io::evolve_table(series, std::move(meta))));
  if (series.warning) std::cerr << "warning: " << *series.warning << '\n';
  return kOk;
}

int run_analytic(const RunConfig& c) {
  if (c.tags.empty()) throw InvalidParameter("analytic needs at least one --tags entry");
  const ModelParams p(c.g, c.eps_d);
  std::vector<double> times;
  if (c.evolve.grid == TimeGrid::Linear) {
    times = linear_grid(c.t_min, c.evolve.t_max, c.evolve.n_samples);
  } else {
    const double lo = std::max(c.t_min, 1e-4 * c.evolve.t_max);
    times.resize(c.evolve.n_samples);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double f = times.size() == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(times.size() - 1);
      times[i] = lo * std::pow(c.evolve.t_max / lo, f);
    }
    times.back() = c.evolve.t_max;
  }
  if (!(c.t_min < c.evolve.t_max)) throw InvalidParameter("analytic needs tmin < tmax");
  auto meta = base_metadata(c);
  meta.emplace_back("t_min", num(c.t_min));
  std::vector<io::AnalyticRow> rows;
  for (ApproximationTag tag : c.tags) {
    const ValidityWindow win = validity_window(tag, p);
    std::size_t outside = 0;
    for (double t : times) {
      rows.push_back({t, evaluate(tag, t, p), tag});
      if (!win.contains(t)) ++outside;
    }
    const std::string name(to_string(tag));
    meta.emplace_back("window." + name, "[" + num(win.t_lo) + ", " + num(win.t_hi) + "]");
    meta.emplace_back("outside_window." + name, std::to_string(outside) + " of " + std::to_string(times.size()));
  }
  io::write_text(c.out, csv_text(io::analytic_table(rows, std::move(meta))));
  return kOk;
}

int run_compare(const RunConfig& c) {
  const ModelParams p(c.g, c.eps_d);
  const double g = c.g;
  const double t_max = c.evolve.t_max;
  const auto user_times = sample_times(c.evolve);
  const auto fit_count = static_cast<std::size_t>(std::ceil(t_max / kFitSpacing)) + 1;
  const auto fit_times = linear_grid(0.0, t_max, fit_count);
  std::vector<double> all(user_times);
  all.insert(all.end(), fit_times.begin(), fit_times.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  const std::size_t n = c.evolve.resolved_sites();
  const auto series = evolve_at(p, make_state(c.state, g, n), c.evolve, all);
  auto index_of = [&](double t) {
    return static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), t) - all.begin());
  };

  const bool at_bic = c.eps_d == 0.0;
  const bool perp = c.state.kind == StateSpec::Kind::Perp;
  const bool has_quad = at_bic && c.state.kind != StateSpec::Kind::Bic;
  const bool has_bessel = at_bic && perp && g <= 1.0;
  std::vector<cplx> bessel;
  if (has_bessel) bessel = bessel_exact(user_times, g);

  io::CsvTable table;
  table.metadata = base_metadata(c);
  table.metadata.emplace_back("steps", std::to_string(series.steps));
  if (series.warning) table.warnings.push_back(*series.warning);
  table.header = {"t", "re_A_ode", "im_A_ode", "re_A_quad", "im_A_quad", "re_A_bessel", "im_A_bessel", "P_ode"};
  double dev_quad = 0.0;
  double dev_bessel = 0.0;
  for (std::size_t i = 0; i < user_times.size(); ++i) {
    const double t = user_times[i];
    const cplx a = series.overlap[index_of(t)];
    std::vector<std::string> row = {num(t), num(a.real()), num(a.imag())};
    if (has_quad) {
      const cplx q = perp ? a_br_quadrature(t, g) + bound_term(t, g) : a_w_amplitude(t, p, c.state.w);
      dev_quad = std::max(dev_quad, std::abs(a - q));
      row.push_back(num(q.real()));
      row.push_back(num(q.imag()));
    } else {
      row.insert(row.end(), {"nan", "nan"});
    }
    if (has_bessel) {
      dev_bessel = std::max(dev_bessel, std::abs(a - bessel[i]));
      row.push_back(num(bessel[i].real()));
      row.push_back(num(bessel[i].imag()));
    } else {
      row.insert(row.end(), {"nan", "nan"});
    }
    row.push_back(num(std::norm(a)));
    table.rows.push_back(std::move(row));
  }

  ProbabilitySeries dense;
  std::vector<cplx> dense_a, dense_d, dense_1;
  for (double t : fit_times) {
    const std::size_t k = index_of(t);
    dense.times.push_back(t);
    dense.values.push_back(std::norm(series.overlap[k]));
    dense_a.push_back(series.overlap[k]);
    dense_d.push_back(series.amp_d[k]);
    dense_1.push_back(series.amp_1[k]);
  }

  ordered_json fits = ordered_json::array();
  ordered_json notes = ordered_json::array();
  std::optional<double> near_phase, far_phase;
  const Timescales ts = timescales(g);
  if (at_bic && g <= 1.0) {
    double near_lo = 0.0, near_hi = 0.0;
    if (g == 1.0) {
      near_lo = 5.0;
      near_hi = std::min(200.0, t_max);
    } else {
      near_lo = 2.0;
      near_hi = std::min(0.05 * *ts.t_delta, t_max);
    }
    if (near_hi - near_lo >= 1.5 * kPi) {
      if (g == 1.0) fits.push_back(fit_entry("near_zone_power_law", fit_power_law(dense, near_lo, near_hi)));
      const auto ph = fit_phase(dense, near_lo, near_hi, -1.0);
      near_phase = ph.at("phase");
      fits.push_back(fit_entry("near_zone_phase", ph));
    } else {
      notes.push_back("near-zone window [2, 0.05 T_delta] shorter than three periods; no near-zone fit");
    }
    if (g < 1.0) {
      const double far_lo = std::max(30.0, 3.0 * *ts.t_delta);
      if (t_max - far_lo >= 1.5 * kPi) {
        fits.push_back(fit_entry("far_zone_power_law", fit_power_law(dense, far_lo, t_max)));
        const auto ph = fit_phase(dense, far_lo, t_max, -3.0);
        far_phase = ph.at("phase");
        fits.push_back(fit_entry("far_zone_phase", ph));
      } else {
        notes.push_back("far zone starts near t = " + num(far_lo) + ", beyond t_max; no far-zone fit");
      }
    }
  }
  if (!at_bic && t_max >= 60.0 + 4.0 * kPi) {
    const double width = 4.0 * kPi;
    const auto lp_a = low_pass(fit_times, dense_a, width);
    const auto lp_d = low_pass(fit_times, dense_d, width);
    const auto lp_1 = low_pass(fit_times, dense_1, width);
    ProbabilitySeries sp{lp_a.times, {}}, s1{lp_a.times, {}};
    for (std::size_t i = 0; i < lp_a.times.size(); ++i) {
      sp.values.push_back(std::norm(lp_a.values[i]));
      s1.values.push_back(std::norm(lp_d.values[i]) + std::norm(lp_1.values[i]));
    }
    fits.push_back(fit_entry("shelf_perp", fit_exponential(sp, 15.0, 60.0)));
    fits.push_back(fit_entry("shelf_1d", fit_exponential(s1, 15.0, 60.0)));
  }

  ordered_json report;
  report["params"] = {{"g", g}, {"eps_d", c.eps_d}};
  report["state"] = c.state.label();
  report["t_max"] = t_max;
  report["samples"] = c.evolve.n_samples;
  report["n_sites"] = n;
  report["max_dev_quadrature"] = has_quad ? ordered_json(dev_quad) : ordered_json(nullptr);
  report["max_dev_bessel"] = has_bessel ? ordered_json(dev_bessel) : ordered_json(nullptr);
  report["fits"] = std::move(fits);
  if (near_phase && far_phase) report["phase_shift"] = *far_phase - *near_phase;
  if (!at_bic) {
    const auto pp = res_pole_perp(p);
    const auto p1 = res_pole_1d(p);
    report["predicted"] = {{"perp_amplitude", pp.amplitude}, {"d1_amplitude", p1.amplitude}, {"rate", pp.rate}};
  }
  if (!notes.empty()) report["notes"] = std::move(notes);
  if (series.warning) report["warning"] = *series.warning;

  const std::string prefix = c.out.empty() || c.out == "-" ? "compare" : c.out;
  io::write_text(prefix + ".csv", csv_text(table));
  write_json(prefix + ".json", report);
  return kOk;
}

int run(const std::vector<std::string>& raw_args) {
  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }

  CLI::App app{"Non-exponential decay near a bound state in continuum: spectra, dynamics and analytic laws"};
  app.name(kToolName);
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  RunConfig cfg;
  std::string state = "perp", grid = "linear", sites = "auto", tags;
  double tmax = 100.0, tmin = 0.0;
  std::size_t samples = 1001;
  double rel_tol = cfg.evolve.rel_tol, abs_tol = cfg.evolve.abs_tol;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--g", cfg.g, "Coupling g > 0 (units of J)");
    sub->add_option("--eps-d", cfg.eps_d, "Impurity energy eps_d");
    sub->add_option("--state", state, "Initial state: bic, perp or w:<x>");
    sub->add_option("--tmax", tmax, "Final time");
    sub->add_option("--tmin", tmin, "First time of analytic curves");
    sub->add_option("--samples", samples, "Number of samples");
    sub->add_option("--grid", grid, "Sample grid: linear or log");
    sub->add_option("--sites", sites, "Chain length N or auto");
    sub->add_option("--rel-tol", rel_tol, "Integrator relative tolerance");
    sub->add_option("--abs-tol", abs_tol, "Integrator absolute tolerance");
    sub->add_option("--tags", tags, "Comma-separated approximation tags");
    sub->add_option("--out", cfg.out, "Output path (figure: directory, compare: prefix)");
    sub->add_option("--jobs", cfg.jobs, "Parallel panels for figure")->check(CLI::PositiveNumber);
    sub->add_flag("--no-meta-time", "Omit the timestamp from metadata");
  };
  CLI::App* s_spec = app.add_subcommand("spectrum", "Discrete spectrum as JSON");
  CLI::App* s_evol = app.add_subcommand("evolve", "Integrate the Schrodinger equation, write CSV");
  CLI::App* s_anal = app.add_subcommand("analytic", "Closed-form curves as CSV");
  CLI::App* s_comp = app.add_subcommand("compare", "Cross-check ODE, quadrature and Bessel routes");
  CLI::App* s_fig = app.add_subcommand("figure", "Regenerate figure data");
  for (auto* s : {s_spec, s_evol, s_anal, s_comp, s_fig}) add_common(s);
  s_fig->add_option("--id", cfg.figure_id, "Figure id")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  try {
    cfg.meta_time = sub->count("--no-meta-time") == 0;
    cfg.state = parse_state_spec(state);
    const bool compare = cfg.command == "compare";
    cfg.evolve.t_max = sub->count("--tmax") ? tmax : (compare ? 50.0 : 100.0);
    cfg.evolve.n_samples = sub->count("--samples") ? samples : (compare ? 101 : 1001);
    cfg.evolve.grid = parse_time_grid(grid);
    cfg.evolve.rel_tol = rel_tol;
    cfg.evolve.abs_tol = abs_tol;
    if (sites != "auto") {
      const double n = io::parse_number(sites);
      if (!(n >= 3.0) || n != std::floor(n)) throw InvalidParameter("--sites must be auto or an integer >= 3");
      cfg.evolve.n_sites = static_cast<std::size_t>(n);
    }
    cfg.t_min = sub->count("--tmin") ? tmin : (cfg.command == "analytic" ? 1.0 : 0.0);
    for (const auto& t : split(tags, ',')) cfg.tags.push_back(parse_approximation_tag(t));
    if (cfg.command != "spectrum" && cfg.command != "figure") cfg.evolve.validate();
    ModelParams check(cfg.g, cfg.eps_d);
    (void)check;
    if (cfg.command == "spectrum") return run_spectrum(cfg);
    if (cfg.command == "evolve") return run_evolve(cfg);
    if (cfg.command == "analytic") return run_analytic(cfg);
    if (cfg.command == "compare") return run_compare(cfg);
    return run_figure(cfg);
  } catch (const RootFinderError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cfg.command == "spectrum" ? kInvalid : kNumerical;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args);
}

}  // namespace bic::cli
