// bosonlab: command-line driver for the mean-field experiments.
//
//   bosonlab <subcommand> [-c config] [--key value ...]
//
// Every configuration key is also a flag; flags override the config file.
// Exit status: 0 success, 2 precondition refusal, 3 numeric failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "bosonlab/gp.hpp"
#include "bosonlab/hierarchy.hpp"
#include "bosonlab/lab/config.hpp"
#include "bosonlab/lab/io.hpp"
#include "bosonlab/lab/plots.hpp"
#include "bosonlab/lab/sweep.hpp"
#include "bosonlab/scattering.hpp"
#include "json.hpp"

using namespace bosonlab;
using namespace bosonlab::lab;
using nlohmann::json;

namespace {

struct Globals {
  std::string config_path;
  std::map<std::string, std::string> flags;
  bool quiet = false;

  ExperimentConfig load(bool validate = true) const {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = apply_entries(cfg, read_config_file(config_path));
    ConfigEntries set;
    for (const auto& [k, v] : flags)
      if (!v.empty()) set[k] = v;
    cfg = apply_entries(cfg, set);
    if (validate) cfg.validate();
    return cfg;
  }
};

void note(const Globals& g, const std::string& msg) {
  if (!g.quiet) std::cerr << msg << "\n";
}

std::string num(double x) { return CsvWriter::number(x); }

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

int first_n(const ExperimentConfig& cfg, int n) { return n > 0 ? n : cfg.n_list.front(); }

// -- propagate ---------------------------------------------------------------

int cmd_propagate(const Globals& g, int n_flag, const std::string& resume) {
  const ExperimentConfig cfg = g.load();
  const int n = first_n(cfg, n_flag);
  const ManyBodyConfig mb = cfg.manybody(n);
  const std::string hash = cfg.dynamics_hash();
  ManyBodyState psi;
  if (!resume.empty()) {
    psi = read_checkpoint(resume, hash);
    require(psi.particles == n && psi.grid == mb.grid(), "checkpoint does not match the requested N and grid");
  } else {
    psi = build_product_state(default_initial_field(mb.grid(), cfg.initial_amplitude), n);
  }
  const double remaining = cfg.duration - psi.time;
  require(remaining >= -1e-12, "checkpoint time " + num(psi.time) + " is past the requested duration");
  const double e0 = energy_moments(psi, mb, 1)[1];
  if (remaining > 1e-12) psi = propagate(std::move(psi), mb, remaining);
  const double e1 = energy_moments(psi, mb, 1)[1];
  const auto stem = fs::path(cfg.output_dir) / ("checkpoint_N" + std::to_string(n));
  write_checkpoint(stem, psi, hash);
  std::cout << "N=" << n << " t=" << num(psi.time) << " norm=" << num(norm(psi))
            << " symmetry=" << num(symmetry_residual(psi)) << " energy_drift=" << num(std::abs(e1 - e0))
            << "\ncheckpoint " << stem.string() << ".bin\n";
  return 0;
}

// -- gp ----------------------------------------------------------------------

int cmd_gp(const Globals& g) {
  const ExperimentConfig cfg = g.load();
  const Grid grid = make_grid(cfg.d, cfg.points_per_axis);
  const double b = coupling_b(cfg.potential(), cfg.d);
  FieldState phi = default_initial_field(grid, cfg.initial_amplitude);
  std::vector<FieldState> snaps;
  solve_gp_with_snapshots(phi, b, cfg.duration, cfg.dt, cfg.spacing(),
                          [&](const FieldState& f) { snaps.push_back(f); });
  const auto stem = fs::path(cfg.output_dir) / "gp_trajectory";
  write_field_trajectory(stem, snaps, cfg.hash());
  std::cout << "b=" << num(b) << " snapshots=" << snaps.size() << " energy=" << num(gp_energy(snaps.back(), b))
            << "\ntrajectory " << stem.string() << ".bin\n";
  return 0;
}

// -- marginals ---------------------------------------------------------------

int cmd_marginals(const Globals& g, int n_flag, const std::string& checkpoint) {
  const ExperimentConfig cfg = g.load();
  const int n = first_n(cfg, n_flag);
  const ManyBodyConfig mb = cfg.manybody(n);
  ManyBodyState psi;
  if (!checkpoint.empty())
    psi = read_checkpoint(checkpoint, cfg.dynamics_hash());
  else
    psi = propagate(build_product_state(default_initial_field(mb.grid(), cfg.initial_amplitude), n), mb,
                    cfg.duration);
  const MarginalFamily fam = reduce_family(psi, std::min(cfg.k_max, psi.particles));
  bool ok = true;
  for (int k = 1; k <= fam.k_max(); ++k) {
    const auto& gk = fam.sector(k);
    const auto inv = check_invariants(gk);
    const double compat = k < fam.k_max() ? compatibility_error(gk, fam.sector(k + 1)) : 0.0;
    ok = ok && inv.ok() && compat <= 1e-10;
    const auto stem = fs::path(cfg.output_dir) / ("gamma" + std::to_string(k) + "_N" + std::to_string(n));
    write_kernel(stem, gk, cfg.hash());
    std::cout << "k=" << k << " hermiticity=" << num(inv.hermiticity) << " min_eig=" << num(inv.min_eigenvalue)
              << " trace_error=" << num(inv.trace_error) << " bosonic=" << num(inv.bosonic)
              << " compatibility=" << num(compat) << " sobolev=" << num(sobolev_trace_norm(gk)) << "\n";
  }
  const double h = hminus_norm(fam);
  std::cout << "hminus=" << num(h) << "\n";
  if (!ok || h > 1.0 + 1e-12) throw NumericError("marginal invariants violated");
  return 0;
}

// -- residuals ---------------------------------------------------------------

int cmd_residuals(const Globals& g) {
  const ExperimentConfig cfg = g.load();
  const Grid grid = make_grid(cfg.d, cfg.points_per_axis);
  const double b = coupling_b(cfg.potential(), cfg.d);
  const FieldState phi0 = default_initial_field(grid, cfg.initial_amplitude);
  std::vector<TestKernel> kernels;
  for (const auto& j : test_kernel_family(grid, cfg.family_size))
    if (j.k == 1) kernels.push_back(j);

  const fs::path dir = cfg.output_dir;
  CsvWriter csv(dir / "residuals.csv", {"kind", "N", "kernel", "t", "residual", "max_term", "relative", "datum",
                                        "kinetic", "intra", "collision"});
  json detail = json::array();
  auto emit = [&](const std::string& kind, int n, const ResidualReport& r, double t) {
    const double mt = r.max_term();
    csv.row({kind, std::to_string(n), std::to_string(r.kernel_id), num(t), num(r.magnitude()), num(mt),
             num(mt > 0 ? r.magnitude() / mt : 0.0), num(std::abs(r.parts.datum)), num(std::abs(r.parts.kinetic)),
             num(std::abs(r.parts.intra)), num(std::abs(r.parts.collision))});
    detail.push_back({{"kind", kind},
                      {"n", n},
                      {"kernel", r.kernel_id},
                      {"t", t},
                      {"residual", cjson(r.residual)},
                      {"datum", cjson(r.parts.datum)},
                      {"kinetic", cjson(r.parts.kinetic)},
                      {"intra", cjson(r.parts.intra)},
                      {"collision", cjson(r.parts.collision)},
                      {"snapshot_spacing", r.snapshot_spacing},
                      {"beta", r.beta},
                      {"eta", r.eta}});
  };

  const auto gp = gp_trajectory(phi0, b, cfg.duration, cfg.dt, cfg.spacing(), 2);
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    auto r = gp_residual(gp, kernels[i], b, cfg.beta, cfg.eta);
    r.kernel_id = static_cast<int>(i);
    emit("gp", 0, r, gp.final_time());
  }
  for (int n : cfg.n_list) {
    const ManyBodyConfig mb = cfg.manybody(n);
    note(g, "simulating N = " + std::to_string(n));
    const auto traj = simulate_trajectory(mb, phi0, cfg.duration, cfg.spacing(), 2);
    for (std::size_t i = 0; i < kernels.size(); ++i) {
      auto r = bbgky_residual(traj, kernels[i], mb);
      r.kernel_id = static_cast<int>(i);
      emit("bbgky", n, r, traj.final_time());
    }
  }
  std::ofstream(dir / "residuals.json") << json{{"config_hash", cfg.hash()}, {"b", b}, {"reports", detail}}.dump(2)
                                        << "\n";
  std::cout << "wrote " << (dir / "residuals.csv").string() << "\n";
  return 0;
}

// -- scattering --------------------------------------------------------------

int cmd_scattering(const Globals& g, const std::vector<double>& n_values) {
  // The flow is a continuum computation; the lattice guards do not apply.
  const ExperimentConfig cfg = g.load(false);
  cfg.potential().validate();
  require(cfg.epsilon.has_value(), "scattering needs epsilon (the flow uses a = N^-epsilon)");
  const auto rows = coupling_flow(cfg.potential(), *cfg.epsilon, n_values);
  const fs::path dir = cfg.output_dir;
  CsvWriter csv(dir / "scattering.csv", {"N", "a", "N*a0", "eff_coupling", "b", "rel_dev"});
  for (const auto& r : rows) {
    csv.row({num(r.n), num(r.a), num(r.n_a0), num(r.eff_coupling), num(r.b), num(r.rel_dev)});
    std::cout << "N=" << num(r.n) << " N*a0=" << num(r.n_a0) << " eff=" << num(r.eff_coupling)
              << " rel_dev=" << num(r.rel_dev) << "\n";
  }
  return 0;
}

// -- sweep -------------------------------------------------------------------

int cmd_sweep(const Globals& g, bool plots) {
  const ExperimentConfig cfg = g.load();
  SweepOptions opt;
  opt.progress = [&](const std::string& m) { note(g, m); };
  const SweepReport report = run_sweep(cfg, opt);
  if (plots) {
    const auto files = write_sweep_plots(report, fs::path(cfg.output_dir) / "plots");
    if (files.empty()) std::cerr << "warning: empty sweep, no plots written\n";
  }
  std::cout << "rows=" << report.rows.size() << " config_hash=" << report.config_hash << "\n";
  return 0;
}

// -- check -------------------------------------------------------------------

int cmd_check(const Globals& g) {
  const ExperimentConfig cfg = g.load();
  bool all = true;
  auto line = [&](const std::string& name, double value, double tol) {
    const bool pass = std::isfinite(value) && value <= tol;
    all = all && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << name << " = " << num(value) << " (tol " << num(tol) << ")\n";
  };
  for (int n : cfg.n_list) {
    const ManyBodyConfig mb = cfg.manybody(n);
    const std::string tag = "N=" + std::to_string(n) + " ";
    ManyBodyState psi = build_product_state(default_initial_field(mb.grid(), cfg.initial_amplitude), n);
    const double e0 = energy_moments(psi, mb, 1)[1];
    double worst_herm = 0, worst_psd = 0, worst_trace = 0, worst_compat = 0, worst_h = 0;
    propagate_with_snapshots(psi, mb, cfg.duration, cfg.spacing(), [&](const ManyBodyState& s) {
      const auto fam = reduce_family(s, std::min(cfg.k_max, n));
      for (int k = 1; k <= fam.k_max(); ++k) {
        const auto inv = check_invariants(fam.sector(k));
        worst_herm = std::max(worst_herm, inv.hermiticity);
        worst_psd = std::max(worst_psd, -inv.min_eigenvalue);
        worst_trace = std::max(worst_trace, inv.trace_error);
        if (k < fam.k_max()) worst_compat = std::max(worst_compat, compatibility_error(fam.sector(k), fam.sector(k + 1)));
      }
      worst_h = std::max(worst_h, hminus_norm(fam));
    });
    line(tag + "norm drift", std::abs(norm(psi) - 1.0), 1e-9);
    line(tag + "symmetry residual", symmetry_residual(psi), 1e-9);
    line(tag + "relative energy drift", std::abs(energy_moments(psi, mb, 1)[1] - e0) / std::max(std::abs(e0), 1.0),
         1e-3);
    line(tag + "hermiticity", worst_herm, 1e-10);
    line(tag + "negative eigenvalue", worst_psd, 1e-9);
    line(tag + "trace error", worst_trace, 1e-9);
    line(tag + "compatibility", worst_compat, 1e-10);
    line(tag + "hminus norm", worst_h, 1.0);
  }
  if (!all) throw NumericError("invariant suite failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bosonlab: mean-field dynamics of bosons on a periodic lattice"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("-c,--config", g.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_flag("-q,--quiet", g.quiet, "suppress progress messages");
  for (const auto& key : config_keys()) app.add_option("--" + key, g.flags[key], "config key " + key);
  app.fallthrough();

  int n = 0;
  std::string resume, checkpoint;
  std::vector<double> n_values{1e2, 1e3, 1e4};
  bool plots = true;

  auto* propagate_cmd = app.add_subcommand("propagate", "propagate one N-body state and write a checkpoint");
  propagate_cmd->add_option("-n,--particles", n, "N (default: first of n_list)");
  propagate_cmd->add_option("--resume", resume, "checkpoint stem to continue from");
  auto* gp_cmd = app.add_subcommand("gp", "solve the GP equation and export the trajectory");
  auto* marg_cmd = app.add_subcommand("marginals", "reduce to gamma^(k), export kernels, report invariants");
  marg_cmd->add_option("-n,--particles", n, "N (default: first of n_list)");
  marg_cmd->add_option("--checkpoint", checkpoint, "checkpoint stem to reduce instead of propagating");
  auto* res_cmd = app.add_subcommand("residuals", "BBGKY and GP weak-form residuals");
  auto* sc_cmd = app.add_subcommand("scattering", "scattering length and coupling flow");
  sc_cmd->add_option("--n-values", n_values, "particle numbers for the flow")->delimiter(',');
  auto* sweep_cmd = app.add_subcommand("sweep", "convergence sweep over n_list");
  sweep_cmd->add_flag("!--no-plots", plots, "skip SVG plots");
  auto* check_cmd = app.add_subcommand("check", "run the invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*propagate_cmd) return cmd_propagate(g, n, resume);
    if (*gp_cmd) return cmd_gp(g);
    if (*marg_cmd) return cmd_marginals(g, n, checkpoint);
    if (*res_cmd) return cmd_residuals(g);
    if (*sc_cmd) return cmd_scattering(g, n_values);
    if (*sweep_cmd) return cmd_sweep(g, plots);
    if (*check_cmd) return cmd_check(g);
  } catch (const PreconditionError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
