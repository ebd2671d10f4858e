#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chlab/ch_dynamics.hpp"
#include "chlab/config.hpp"
#include "chlab/csv.hpp"
#include "chlab/peakon.hpp"
#include "chlab/scaling.hpp"
#include "chlab/variational_suite.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerification = 3;

struct CliOptions {
  std::string config_path;
  std::string out_dir = "out";
  int workers = 1;
  std::uint64_t seed = 12345;
  bool fail_on_breaking = false;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
}

void write_json(const fs::path& path, const ordered_json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

chlab::Regime parse_regime(const std::string& name) {
  if (name == "irrotational") return chlab::Regime::irrotational;
  if (name == "shear") return chlab::Regime::shear;
  return chlab::Regime::arbitrary;
}

int run_simulate(const chlab::RunConfig& cfg, const fs::path& dir, const CliOptions& opts) {
  const auto grid = chlab::Grid1D::make(cfg.grid.length, cfg.grid.n);
  const chlab::CHParams params = chlab::build_equation(cfg, grid);
  const chlab::FieldState u0 = chlab::build_initial(cfg, grid);
  const chlab::SimResult res =
      chlab::simulate(u0, params, cfg.dt, cfg.T, cfg.record_every);

  chlab::CsvWriter traj((dir / "trajectory.csv").string(), {"t", "x", "u"});
  for (const auto& u : res.trajectory) {
    for (int j = 0; j < grid.n; ++j)
      traj.row({chlab::fmt_double(u.time), chlab::fmt_double(grid.node(j)),
                chlab::fmt_double(u.values[static_cast<std::size_t>(j)])});
  }

  chlab::CsvWriter diag((dir / "diagnostics.csv").string(),
                        {"t", "M0", "E", "H3", "min_slope", "max_abs_u"});
  for (const auto& r : res.records) {
    diag.row({chlab::fmt_double(r.t), chlab::fmt_double(r.M0), chlab::fmt_double(r.E),
              r.has_H3 ? chlab::fmt_double(r.H3) : std::string(),
              chlab::fmt_double(r.min_slope), chlab::fmt_double(r.max_abs_u)});
  }

  double drift_M0 = 0.0, drift_E = 0.0, drift_H3 = 0.0;
  const auto& r0 = res.records.front();
  for (const auto& r : res.records) {
    drift_M0 = std::max(drift_M0, std::abs(r.M0 - r0.M0));
    drift_E = std::max(drift_E, std::abs(r.E - r0.E));
    if (r.has_H3) drift_H3 = std::max(drift_H3, std::abs(r.H3 - r0.H3));
  }
  const std::optional<double> breaking =
      chlab::detect_breaking(res.records, cfg.breaking_threshold);

  ordered_json summary;
  summary["command"] = "simulate";
  summary["equation"] = cfg.equation.use_F ? "generalized" : "classic";
  summary["n"] = cfg.grid.n;
  summary["length"] = cfg.grid.length;
  summary["dt"] = cfg.dt;
  summary["T"] = cfg.T;
  summary["steps_recorded"] = res.records.size();
  summary["aborted"] = res.aborted;
  summary["abort_reason"] = res.abort_reason;
  summary["warnings"] = res.warnings;
  summary["drift_M0"] = drift_M0;
  summary["drift_E"] = drift_E;
  if (params.classic)
    summary["drift_H3"] = drift_H3;
  else
    summary["drift_H3"] = nullptr;
  if (breaking)
    summary["breaking_time"] = *breaking;
  else
    summary["breaking_time"] = nullptr;
  summary["breaking_threshold"] = cfg.breaking_threshold;
  write_json(dir / "summary.json", summary);

  if (res.aborted) {
    std::cerr << "simulate aborted: " << res.abort_reason << "\n";
    return kExitRuntime;
  }
  if (breaking && opts.fail_on_breaking) {
    std::cerr << "wave breaking detected at t = " << *breaking << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int run_peakon(const chlab::RunConfig& cfg, const fs::path& dir) {
  const chlab::PeakonRunConfig& prc = *cfg.peakon;
  const chlab::PeakonDomain dom =
      prc.periodic ? chlab::PeakonDomain::box(prc.length) : chlab::PeakonDomain::line();
  chlab::PeakonState s0{prc.q, prc.p, 0.0};
  chlab::check_peakon_state(s0, dom);
  const chlab::PeakonTrajectory res =
      chlab::simulate_peakons(s0, dom, cfg.dt, cfg.T, cfg.record_every);

  chlab::CsvWriter traj((dir / "peakons.csv").string(), {"t", "index", "q", "p"});
  for (const auto& s : res.states) {
    for (std::size_t i = 0; i < s.size(); ++i)
      traj.row({chlab::fmt_double(s.t), std::to_string(i), chlab::fmt_double(s.q[i]),
                chlab::fmt_double(s.p[i])});
  }
  chlab::CsvWriter diag((dir / "diagnostics.csv").string(), {"t", "H"});
  for (std::size_t k = 0; k < res.states.size(); ++k)
    diag.row({chlab::fmt_double(res.states[k].t), chlab::fmt_double(res.hamiltonian[k])});

  double drift_H = 0.0;
  for (double h : res.hamiltonian) drift_H = std::max(drift_H, std::abs(h - res.hamiltonian[0]));

  ordered_json summary;
  summary["command"] = "peakon";
  summary["domain"] = prc.periodic ? "box" : "line";
  summary["count"] = prc.q.size();
  summary["dt"] = cfg.dt;
  summary["T"] = cfg.T;
  summary["aborted"] = res.aborted;
  summary["abort_reason"] = res.abort_reason;
  if (res.aborted)
    summary["abort_time"] = res.abort_time;
  else
    summary["abort_time"] = nullptr;
  summary["drift_H"] = drift_H;
  write_json(dir / "summary.json", summary);

  if (res.aborted) {
    std::cerr << "peakon run aborted: " << res.abort_reason << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int run_scale(const chlab::RunConfig& cfg, const fs::path& dir) {
  const chlab::PhysicalParams p = cfg.physical.params();
  const chlab::Regime regime = parse_regime(cfg.physical.regime);
  const chlab::ScaleParams sp = chlab::scale_params(p);

  // round-trip probe through the full chain of variable changes
  chlab::FlowSample probe;
  probe.x = 3.7;
  probe.z = 0.4;
  probe.t = 1.3;
  probe.u = 0.21;
  probe.v = 0.065;
  probe.eta = 0.083;
  probe.pressure = p.p0 + p.rho * p.g * p.h0 * (1.0 - probe.z / p.h0) + 517.0;
  const chlab::FlowSample nd = chlab::nondim_map(p, probe);
  const chlab::FlowSample sc = chlab::eps_scale(nd, sp.eps);
  const chlab::FlowSample lw = chlab::delta_removal(sc, sp.eps, sp.delta);
  const chlab::FlowSample back =
      chlab::redim_map(p, chlab::eps_unscale(chlab::delta_restore(lw, sp.eps, sp.delta), sp.eps));
  double round_trip = 0.0;
  for (auto [a, b] : {std::pair{probe.x, back.x}, {probe.z, back.z}, {probe.t, back.t},
                      {probe.u, back.u}, {probe.v, back.v}, {probe.eta, back.eta},
                      {probe.pressure, back.pressure}})
    round_trip = std::max(round_trip, std::abs(a - b) / std::max(1.0, std::abs(a)));

  ordered_json report;
  report["command"] = "scale";
  report["regime"] = cfg.physical.regime;
  report["eps"] = sp.eps;
  report["delta"] = sp.delta;
  report["eps_over_delta2"] = sp.eps / (sp.delta * sp.delta);
  if (regime == chlab::Regime::arbitrary) {
    report["kappa"] = nullptr;
    report["note"] = "arbitrary regime carries a spatial coefficient F(x), not a scalar kappa";
  } else {
    report["kappa"] = chlab::compute_kappa(regime, p);
  }
  report["round_trip_error"] = round_trip;
  write_json(dir / "report.json", report);

  if (round_trip > 1e-12) {
    std::cerr << "scale round trip error " << round_trip << " exceeds 1e-12\n";
    return kExitVerification;
  }
  return kExitOk;
}

int run_verify_variational(const chlab::RunConfig& cfg, const fs::path& dir,
                           const CliOptions& opts) {
  const auto grid = chlab::Grid1D::make(2.0 * std::numbers::pi, cfg.variational.n);
  const double c0 = cfg.equation.use_F ? cfg.equation.F.offset : cfg.equation.kappa;
  const std::vector<std::pair<std::string, chlab::ActionOffset>> offsets{
      {"zero", chlab::ActionOffset::zero(grid)},
      {"constant", chlab::ActionOffset::constant(grid, c0 != 0.0 ? c0 : 0.4)},
  };

  chlab::CsvWriter table((dir / "identity.csv").string(),
                         {"offset", "n", "m", "lhs", "rhs", "gap", "fd_error"});
  bool pass = true;
  ordered_json checks = ordered_json::array();
  for (const auto& [name, offset] : offsets) {
    const auto rows = chlab::identity_resolution_table(grid, name, offset, cfg.variational.ms,
                                                       cfg.variational.T, opts.seed);
    for (const auto& r : rows)
      table.row({r.offset_name, std::to_string(r.n), std::to_string(r.m),
                 chlab::fmt_double(r.lhs), chlab::fmt_double(r.rhs), chlab::fmt_double(r.gap),
                 chlab::fmt_double(r.fd_error)});
    const double finest_gap = rows.back().gap;
    bool shrinking = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (!(rows[i].gap < rows[i - 1].gap)) shrinking = false;
    const bool ok = finest_gap <= 1e-4 && shrinking;
    pass = pass && ok;
    ordered_json entry;
    entry["offset"] = name;
    entry["finest_gap"] = finest_gap;
    entry["gap_shrinks_with_m"] = shrinking;
    entry["pass"] = ok;
    checks.push_back(entry);
  }

  ordered_json summary;
  summary["command"] = "verify-variational";
  summary["n"] = cfg.variational.n;
  summary["ms"] = cfg.variational.ms;
  summary["T"] = cfg.variational.T;
  summary["seed"] = opts.seed;
  summary["checks"] = checks;
  summary["pass"] = pass;
  write_json(dir / "summary.json", summary);

  if (!pass) {
    std::cerr << "variational identity check failed; see " << (dir / "summary.json").string()
              << "\n";
    return kExitVerification;
  }
  return kExitOk;
}

int run_verify_linear(const chlab::RunConfig& cfg, const fs::path& dir) {
  const chlab::PhysicalParams p = cfg.physical.params();
  const chlab::Regime regime = parse_regime(cfg.physical.regime);
  const auto xgrid = chlab::Grid1D::make(2.0 * std::numbers::pi, cfg.linear.nx);
  const chlab::WaveProfile prof = chlab::sine_profile(cfg.linear.amplitude);
  // background coefficient for the arbitrary regime; its vertical average of
  // F_x vanishes, which the surface/bottom kinematics require
  const chlab::CoefficientField coeffs{
      [](double x, double z) { return 0.3 * std::sin(x) * std::cos(2.0 * std::numbers::pi * z); },
      [](double x, double z) { return 0.3 * std::cos(x) * std::cos(2.0 * std::numbers::pi * z); }};
  const chlab::CoefficientField* cp = regime == chlab::Regime::arbitrary ? &coeffs : nullptr;
  const chlab::LinearFields lf = chlab::make_linear_fields(regime, prof, p, cp);
  const std::vector<double> zs{0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<double> ts{0.0, 0.3, 0.7};
  const chlab::ResidualReport rep = chlab::verify_linear_system(lf, xgrid, zs, ts);
  const bool pass = rep.max() <= 1e-6;

  ordered_json report;
  report["command"] = "verify-linear";
  report["regime"] = cfg.physical.regime;
  report["amplitude"] = cfg.linear.amplitude;
  report["nx"] = cfg.linear.nx;
  report["residuals"]["euler_x"] = rep.euler_x;
  report["residuals"]["euler_z"] = rep.euler_z;
  report["residuals"]["mass"] = rep.mass;
  report["residuals"]["surface_kinematic"] = rep.surface_kinematic;
  report["residuals"]["surface_dynamic"] = rep.surface_dynamic;
  report["residuals"]["bottom"] = rep.bottom;
  report["max_residual"] = rep.max();
  report["pass"] = pass;
  write_json(dir / "report.json", report);

  if (!pass) {
    std::cerr << "linear system residual " << rep.max() << " exceeds 1e-6\n";
    return kExitVerification;
  }
  return kExitOk;
}

int run_command(const chlab::RunConfig& cfg, const fs::path& dir, const CliOptions& opts);

int run_sweep(const chlab::RunConfig& cfg, const fs::path& dir, const CliOptions& opts) {
  const auto children = chlab::expand_sweep(cfg);
  struct Child {
    fs::path dir;
    chlab::RunConfig cfg;
    ordered_json value;
    int exit_code = kExitOk;
    std::string error;
  };
  std::vector<Child> runs;
  for (std::size_t i = 0; i < children.size(); ++i) {
    std::ostringstream name;
    name << "run_" << std::setw(3) << std::setfill('0') << i;
    Child c;
    c.dir = dir / name.str();
    c.value = cfg.sweep->values[i];
    chlab::ParseResult parsed = chlab::parse_config(children[i].dump());
    if (!parsed.ok()) {
      c.exit_code = kExitValidation;
      for (const auto& e : parsed.errors) c.error += e + "; ";
    } else {
      c.cfg = std::move(*parsed.config);
    }
    runs.push_back(std::move(c));
  }

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      Child& c = runs[i];
      if (c.exit_code != kExitOk) continue;
      try {
        fs::create_directories(c.dir);
        c.exit_code = run_command(c.cfg, c.dir, opts);
      } catch (const std::exception& e) {
        c.exit_code = kExitRuntime;
        std::lock_guard<std::mutex> lock(log_mutex);
        c.error = e.what();
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(opts.workers, static_cast<int>(runs.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int exit_code = kExitOk;
  ordered_json entries = ordered_json::array();
  for (const auto& c : runs) {
    ordered_json e;
    e["directory"] = c.dir.filename().string();
    e["parameter"] = cfg.sweep->parameter;
    e["value"] = c.value;
    e["exit_code"] = c.exit_code;
    if (!c.error.empty()) e["error"] = c.error;
    entries.push_back(e);
    exit_code = std::max(exit_code, c.exit_code);
  }
  ordered_json summary;
  summary["command"] = "sweep";
  summary["child_command"] = cfg.sweep->command;
  summary["parameter"] = cfg.sweep->parameter;
  summary["runs"] = entries;
  summary["exit_code"] = exit_code;
  write_json(dir / "summary.json", summary);
  return exit_code;
}

int run_command(const chlab::RunConfig& cfg, const fs::path& dir, const CliOptions& opts) {
  write_json(dir / "config.json", cfg.raw);
  const auto start = std::chrono::steady_clock::now();
  int code = kExitOk;
  switch (cfg.command) {
    case chlab::Command::simulate:
      code = run_simulate(cfg, dir, opts);
      break;
    case chlab::Command::peakon:
      code = run_peakon(cfg, dir);
      break;
    case chlab::Command::scale:
      code = run_scale(cfg, dir);
      break;
    case chlab::Command::verify_variational:
      code = run_verify_variational(cfg, dir, opts);
      break;
    case chlab::Command::verify_linear:
      code = run_verify_linear(cfg, dir);
      break;
    case chlab::Command::sweep:
      code = run_sweep(cfg, dir, opts);
      break;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // appended after the command writes its summary so reruns differ in this
  // one line only
  ordered_json timing;
  timing["command"] = chlab::command_name(cfg.command);
  timing["exit_code"] = code;
  timing["wall_clock_seconds"] = seconds;
  write_json(dir / "timing.json", timing);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chlab: a numerical laboratory for the Camassa-Holm family"};
  CliOptions opts;
  app.add_option("--config", opts.config_path, "JSON run configuration")->required();
  app.add_option("--out", opts.out_dir, "output directory");
  app.add_option("--workers", opts.workers, "worker threads for sweeps")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", opts.seed, "random seed for the variational checks");
  app.add_flag("--fail-on-breaking", opts.fail_on_breaking,
               "treat detected wave breaking as a failure");
  CLI11_PARSE(app, argc, argv);

  std::ifstream in(opts.config_path);
  if (!in) {
    std::cerr << "cannot read config file: " << opts.config_path << "\n";
    return kExitValidation;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const chlab::ParseResult parsed = chlab::parse_config(buf.str());
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) std::cerr << e << "\n";
    return kExitValidation;
  }

  try {
    fs::create_directories(opts.out_dir);
    return run_command(*parsed.config, opts.out_dir, opts);
  } catch (const chlab::blow_up_error& e) {
    std::cerr << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitRuntime;
  }
}
