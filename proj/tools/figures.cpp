#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "bic/error.hpp"
#include "bic/spectrum.hpp"
#include "cli.hpp"

namespace bic::cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double x) { return io::format_number(x); }

std::vector<double> linear(double lo, double hi, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  t.back() = hi;
  return t;
}

std::vector<double> logarithmic(double t_max, std::size_t n) {
  EvolveOptions o;
  o.t_max = t_max;
  o.n_samples = n;
  o.grid = TimeGrid::Log;
  return sample_times(o);
}

struct Segment {
  std::string file;
  std::string range_label;
  std::vector<double> times;
  std::vector<ApproximationTag> overlays;
  bool envelope_1_over_pi_t = false;
};

struct Panel {
  std::string name;
  std::function<std::vector<std::pair<std::string, io::CsvTable>>()> build;
};

struct Run {
  double g;
  double eps_d;
  StateSpec state;
  std::vector<Segment> segments;
};

std::vector<std::pair<std::string, io::CsvTable>> evolve_run(const RunConfig& base, const std::string& figure,
                                                            const Run& run) {
  std::vector<double> all;
  for (const auto& s : run.segments) all.insert(all.end(), s.times.begin(), s.times.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  RunConfig cfg = base;
  cfg.command = "figure";
  cfg.g = run.g;
  cfg.eps_d = run.eps_d;
  cfg.state = run.state;
  cfg.evolve.t_max = all.back();
  cfg.evolve.n_samples = all.size();
  cfg.evolve.n_sites.reset();
  const ModelParams p(run.g, run.eps_d);
  const std::size_t n = cfg.evolve.resolved_sites();
  const auto series = evolve_at(p, make_state(run.state, run.g, n), cfg.evolve, all);

  std::vector<std::pair<std::string, io::CsvTable>> out;
  for (const auto& seg : run.segments) {
    AmplitudeSeries part;
    part.n_sites = series.n_sites;
    part.warning = series.warning;
    for (double t : seg.times) {
      const auto k = static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), t) - all.begin());
      part.times.push_back(t);
      part.overlap.push_back(series.overlap[k]);
      part.amp_d.push_back(series.amp_d[k]);
      part.amp_1.push_back(series.amp_1[k]);
      part.norm.push_back(series.norm[k]);
    }
    auto meta = base_metadata(cfg);
    meta.insert(meta.begin() + 1, {"figure", figure});
    meta.emplace_back("t_range", seg.range_label);
    meta.emplace_back("steps", std::to_string(series.steps));
    io::CsvTable table = io::evolve_table(part, meta);
    for (ApproximationTag tag : seg.overlays) {
      const ValidityWindow w = validity_window(tag, p);
      table.metadata.emplace_back("window." + std::string(to_string(tag)),
                                  "[" + num(w.t_lo) + ", " + num(w.t_hi) + "]");
      table.header.emplace_back(to_string(tag));
      for (std::size_t i = 0; i < seg.times.size(); ++i) {
        std::string cell = "nan";
        try {
          cell = num(evaluate(tag, seg.times[i], p));
        } catch (const DomainError&) {
        }
        table.rows[i].push_back(cell);
      }
    }
    if (seg.envelope_1_over_pi_t) {
      table.header.emplace_back("envelope");
      for (std::size_t i = 0; i < seg.times.size(); ++i) {
        const double t = seg.times[i];
        table.rows[i].push_back(t > 0.0 ? num(1.0 / (kPi * run.g * run.g * t)) : "nan");
      }
    }
    out.emplace_back(seg.file, std::move(table));
  }
  return out;
}

io::CsvTable spectrum_sweep(const RunConfig& base) {
  io::CsvTable t;
  t.metadata = {{"tool", std::string(kToolName) + " " + kToolVersion},
                {"figure", "fig1"},
                {"eps_d", "0"},
                {"g_range", "[0.01, 2] step 0.01 (g = 0 has no coupling and is excluded)"}};
  if (base.meta_time) {
    RunConfig c = base;
    c.command = "spectrum";
    for (const auto& kv : base_metadata(c)) {
      if (kv.first == "timestamp") t.metadata.push_back(kv);
    }
  }
  t.header = {"g", "z_bic", "z_plus", "z_minus", "kind"};
  for (int k = 1; k <= 200; ++k) {
    const double g = k / 100.0;
    const auto states = discrete_spectrum(ModelParams(g, 0.0));
    double zp = std::nan(""), zm = std::nan(""), zb = std::nan("");
    std::string kind;
    for (const auto& s : states) {
      if (s.kind == StateKind::BIC) {
        zb = s.z.real();
      } else if (s.z.real() > 0.0) {
        zp = s.z.real();
        kind = std::string(to_string(s.kind));
      } else {
        zm = s.z.real();
      }
    }
    t.rows.push_back({num(g), num(zb), num(zp), num(zm), kind});
  }
  return t;
}

std::vector<Panel> panels_for(const RunConfig& base, const std::string& id) {
  using T = ApproximationTag;
  const StateSpec perp{StateSpec::Kind::Perp, 0.0};
  std::vector<Panel> panels;
  auto add_run = [&](const std::string& name, Run run) {
    panels.push_back({name, [base, id, run]() { return evolve_run(base, id, run); }});
  };
  if (id == "fig1") {
    panels.push_back({"fig1", [base]() {
                        return std::vector<std::pair<std::string, io::CsvTable>>{{"fig1_spectrum.csv", spectrum_sweep(base)}};
                      }});
  } else if (id == "fig2a") {
    add_run("fig2a", {1.1, 0.0, perp,
                      {{"fig2a.csv", "linear [0, 100]", linear(0.0, 100.0, 4001), {T::BoundTerm}},
                       {"fig2a_inset.csv", "log [0.1, 1000]", logarithmic(1000.0, 2000), {T::BoundTerm}}}});
  } else if (id == "fig2b") {
    Segment s{"fig2b.csv", "log [0.1, 1000]", logarithmic(1000.0, 4000), {T::NearZoneEarlyProb}, true};
    add_run("fig2b", {1.0, 0.0, perp, {s}});
  } else if (id == "fig2cde") {
    Segment c{"fig2c.csv", "log [0.6, 6000]", logarithmic(6000.0, 3000), {T::NearZoneEarlyProb, T::FarZoneProb}, true};
    Segment d{"fig2d.csv", "linear [0, 30]", linear(0.0, 30.0, 3001),
              {T::NearZoneEarlyProb, T::NearZoneAmp, T::EarlyBessel}, true};
    Segment e{"fig2e.csv", "linear [5950, 6000]", linear(5950.0, 6000.0, 2501), {T::FarZoneProb}};
    add_run("fig2cde", {0.98, 0.0, perp, {c, d, e}});
  } else if (id == "fig3a" || id == "fig3b" || id == "fig3c") {
    const double eps = id == "fig3a" ? 0.005 : (id == "fig3b" ? 0.2 : 0.35);
    add_run(id, {0.9, eps, perp,
                 {{id + ".csv", "log [0.3, 3000]", logarithmic(3000.0, 3000), {T::ResPolePerp, T::ResPole1d}}}});
  } else if (id == "figS1") {
    for (double g : {0.9, 0.7}) {
      const std::string tag = g == 0.9 ? "abc" : "def";
      const std::string p0(1, tag[0]), p1(1, tag[1]), p2(1, tag[2]);
      add_run("figS1_g" + num(g),
              {g, 0.0, perp,
               {{"figS1" + p0 + ".csv", "log [0.2, 2000]", logarithmic(2000.0, 3000), {T::NearZoneEarlyProb, T::FarZoneProb}, true},
                {"figS1" + p1 + ".csv", "linear [0, 30]", linear(0.0, 30.0, 3001), {T::NearZoneEarlyProb, T::NearZoneAmp}, true},
                {"figS1" + p2 + ".csv", "linear [1950, 2000]", linear(1950.0, 2000.0, 2501), {T::FarZoneProb}}}});
    }
  } else if (id == "figS2") {
    add_run("figS2", {0.9, 0.0, perp,
                      {{"figS2.csv", "linear [0, 20]", linear(0.0, 20.0, 2001),
                        {T::NearZoneEarlyProb, T::NearZoneAmp, T::EarlyBessel}, true}}});
  } else if (id == "figS3") {
    const std::pair<const char*, double> ws[] = {{"a", 0.1}, {"b", 0.5}, {"c", 1.0}, {"d", 2.0}};
    for (const auto& [letter, w] : ws) {
      add_run(std::string("figS3") + letter,
              {0.9, 0.0, StateSpec{StateSpec::Kind::W, w},
               {{std::string("figS3") + letter + ".csv", "log [0.1, 1000]", logarithmic(1000.0, 3000), {}}}});
    }
  } else if (id == "figS4") {
    for (double g : {0.7, 0.9, 0.98, 1.0, 1.1}) {
      std::vector<T> overlays;
      if (g < 1.0) overlays.push_back(T::WFarZone);
      if (g == 1.0) overlays.push_back(T::WNearZoneG1);
      add_run("figS4_g" + num(g), {g, 0.0, StateSpec{StateSpec::Kind::W, 1.0},
                                   {{"figS4_g" + num(g) + ".csv", "log [0.1, 1000]", logarithmic(1000.0, 3000), overlays}}});
    }
  } else {
    std::string valid;
    for (const auto& f : figure_ids()) valid += (valid.empty() ? "" : ", ") + f;
    throw InvalidParameter("unknown figure id '" + id + "' (valid: " + valid + ")");
  }
  return panels;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"fig1",  "fig2a", "fig2b", "fig2cde", "fig3a", "fig3b",
                                               "fig3c", "figS1", "figS2", "figS3",   "figS4"};
  return ids;
}

int run_figure(const RunConfig& c) {
  const auto panels = panels_for(c, c.figure_id);
  const std::filesystem::path dir = c.out.empty() || c.out == "-" ? std::filesystem::path("figures")
                                                                   : std::filesystem::path(c.out);
  std::filesystem::create_directories(dir);

  std::vector<std::vector<std::pair<std::string, io::CsvTable>>> results(panels.size());
  std::vector<std::exception_ptr> errors(panels.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < panels.size(); i = next++) {
      try {
        results[i] = panels[i].build();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, c.jobs));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < std::min(n_threads, panels.size()); ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& files : results) {
    for (const auto& [name, table] : files) {
      std::ostringstream os;
      io::write_csv(os, table);
      io::write_text((dir / name).string(), os.str());
      if (!table.warnings.empty()) std::cerr << "warning: " << name << ": " << table.warnings.front() << '\n';
    }
  }
  return kOk;
}

}  // namespace bic::cli
