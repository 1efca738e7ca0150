// Acceptance run: one PASS/FAIL line per criterion G1..G9.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "bosonlab/hierarchy.hpp"
#include "bosonlab/lab/sweep.hpp"
#include "bosonlab/scattering.hpp"
#include "dense_oracle.hpp"
#include "json.hpp"

using namespace bosonlab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<TestKernel> sector_one(const Grid& g) {
  std::vector<TestKernel> out;
  for (const auto& j : test_kernel_family(g, 8))
    if (j.k == 1) out.push_back(j);
  return out;
}

double bump_b1() { return coupling_b(PotentialProfile::bump(), 1); }

Eigen::Map<const Eigen::VectorXcd> as_vector(const ManyBodyState& psi) {
  return {psi.values.data(), static_cast<Eigen::Index>(psi.values.size())};
}

void g1(Outcome& o) {
  ManyBodyConfig cfg;
  cfg.points_per_axis = 16;
  cfg.particles = 2;
  cfg.range = 0.25;
  const auto psi0 = build_product_state(default_initial_field(cfg.grid()), 2);
  const Eigen::MatrixXcd h = oracle::hamiltonian_1d(16, 2, 0.25);
  const Eigen::VectorXcd ref = oracle::evolve(h, as_vector(psi0), 0.5);
  auto err = [&](double dt) {
    cfg.dt = dt;
    return (as_vector(propagate(psi0, cfg, 0.5)) - ref).norm() * cfg.grid().cell_volume();
  };
  const double e1 = err(1e-3), e2 = err(5e-4), e3 = err(2.5e-4);
  o.detail << "L2 error " << e1 << ", halved dt ratio " << e1 / e2 << " (next halving " << e2 / e3 << ") ";
  o.expect(e1 <= 1e-4, "error <= 1e-4");
  o.expect(std::abs(e1 / e2 - 4.0) <= 0.4, "ratio 4 +- 10%");
}

void g2_g3(Outcome& o2, Outcome& o3, double& g2_seconds) {
  const auto t0 = Clock::now();
  ManyBodyConfig cfg;
  cfg.points_per_axis = 32;
  cfg.particles = 3;
  cfg.range = 0.25;
  cfg.dt = 1e-3;
  auto psi = build_product_state(default_initial_field(cfg.grid()), 3);
  double norm_drift = 0.0, sym = 0.0;
  std::vector<ManyBodyState> snaps;
  propagate_with_snapshots(psi, cfg, 1.0, 0.1, [&](const ManyBodyState& s) {
    norm_drift = std::max(norm_drift, std::abs(norm(s) - 1.0));
    sym = std::max(sym, symmetry_residual(s));
    snaps.push_back(s);
  });
  // Energy order on a shorter window: the second-order regime needs dt well
  // below the stiffest kinetic scale of the M = 32 grid.
  const auto start = build_product_state(default_initial_field(cfg.grid()), 3);
  const double e0 = energy_moments(start, cfg, 1)[1];
  auto drift = [&](double dt) {
    auto c = cfg;
    c.dt = dt;
    return std::abs(energy_moments(propagate(start, c, 0.1), c, 1)[1] - e0);
  };
  const double d1 = drift(1.25e-4), d2 = drift(6.25e-5);
  const double order = std::log2(d1 / d2);
  g2_seconds = since(t0);
  o2.detail << "norm drift " << norm_drift << ", symmetry " << sym << ", energy drift " << d1 << " -> " << d2
            << " (order " << order << ") ";
  o2.expect(norm_drift <= 1e-9, "norm drift <= 1e-9");
  o2.expect(sym <= 1e-9, "symmetry <= 1e-9");
  o2.expect(order >= 1.8 && order <= 2.2, "energy drift order in [1.8, 2.2]");
  o2.expect(g2_seconds < 120.0, "runtime < 2 min");

  double herm = 0, min_eig = 0, trace_err = 0, bos = 0, compat = 0, hminus = 0;
  bool all_ok = true;
  for (const auto& s : snaps) {
    const auto fam = reduce_family(s, 2);
    for (const auto& g : fam.sectors) {
      const auto inv = check_invariants(g);
      all_ok = all_ok && inv.ok();
      herm = std::max(herm, inv.hermiticity);
      min_eig = std::min(min_eig, inv.min_eigenvalue);
      trace_err = std::max(trace_err, inv.trace_error);
      bos = std::max(bos, inv.bosonic);
    }
    compat = std::max(compat, compatibility_error(fam.sector(1), fam.sector(2)));
    hminus = std::max(hminus, hminus_norm(fam));
  }
  o3.detail << snaps.size() << " snapshots: hermiticity " << herm << ", min eigenvalue " << min_eig << ", trace "
            << trace_err << ", bosonic " << bos << ", compatibility " << compat << ", max H- norm " << hminus << " ";
  o3.expect(all_ok, "invariants within tolerance");
  o3.expect(compat <= 1e-9, "compatibility <= 1e-9");
  o3.expect(hminus <= 1.0, "H- norm <= 1");
}

double worst_gp(double b_dynamics, double b) {
  const Grid g = make_grid(1, 64);
  double w = 0.0;
  for (const auto& r : gp_residuals_streamed(default_initial_field(g), b_dynamics, b, 0.1, 1e-4, 1e-3, sector_one(g),
                                             1.0 / 32, 1.0 / 32))
    w = std::max(w, r.magnitude());
  return w;
}

void g4(Outcome& o, const nlohmann::json& cal) {
  const double tol = cal.at("g4").at("tol");
  const double b = bump_b1();
  const double r = worst_gp(b, b);
  const double wrong = worst_gp(2 * b, b);
  o.detail << "residual " << r << ", tol_G4 " << tol << ", 2b control " << wrong << " ";
  o.expect(r <= tol, "residual <= tol_G4");
  o.expect(wrong > 10 * tol, "2b control > 10 tol_G4");
}

void g5(Outcome& o) {
  ManyBodyConfig cfg;
  cfg.points_per_axis = 32;
  cfg.particles = 3;
  cfg.range = 0.25;
  cfg.dt = 1e-4;
  const auto traj = simulate_trajectory(cfg, default_initial_field(cfg.grid()), 0.1, 1e-3, 2);
  const auto kernels = sector_one(cfg.grid());
  auto measure = [&](int stride, double& scale) {
    const auto sub = traj.subsampled(stride);
    double worst = 0.0;
    scale = 0.0;
    for (const auto& j : kernels) {
      const auto r = bbgky_residual(sub, j, cfg);
      worst = std::max(worst, r.magnitude());
      scale = std::max(scale, r.max_term());
    }
    return worst;
  };
  double s1 = 0, s2 = 0;
  const double coarse = measure(2, s1);
  const double fine = measure(1, s2);
  o.detail << "spacing 2e-3: " << coarse << " (" << coarse / s1 << " of max term), 1e-3: " << fine << " ("
           << fine / s2 << "), shrink " << coarse / fine << " ";
  o.expect(fine <= 1e-3 * s2, "residual <= 1e-3 max term");
  o.expect(coarse / fine >= 3.0, "halving spacing shrinks >= 3x");
}

// Trace distances at t = 0.1 from the first verified run.
const std::vector<double> frozen_g6{0.0018519064294169221, 0.001295998767541605, 0.0010112327377823607,
                                    0.000816517086853276};

void g6_g7_g9gap(Outcome& o6, Outcome& o7, Outcome& gap_out, const nlohmann::json& cal, double& seconds) {
  const auto t0 = Clock::now();
  lab::ExperimentConfig cfg;
  cfg.points_per_axis = 32;
  cfg.n_list = {2, 3, 4, 5};
  cfg.epsilon = 0.4;
  cfg.duration = 0.1;
  cfg.output_dir = "acceptance-sweep";
  lab::SweepOptions opt;
  opt.energy_moments = false;
  opt.progress = [](const std::string& m) { std::cerr << "  sweep: " << m << "\n"; };
  const auto report = lab::run_sweep(cfg, opt);
  seconds = since(t0);

  std::vector<double> last;
  std::map<int, double> sob0;
  double sob_ratio = 0.0;
  for (const auto& r : report.rows) {
    if (r.t == 0.0) sob0[r.n] = r.sobolev_k1;
    sob_ratio = std::max(sob_ratio, r.sobolev_k1 / sob0.at(r.n));
    if (std::abs(r.t - cfg.duration) <= 1e-12) last.push_back(r.trace_distance);
  }
  o6.detail << "trace distance at t=0.1:";
  for (double v : last) o6.detail << " " << v;
  o6.detail << " ";
  bool monotone = last.size() == 4;
  for (std::size_t i = 1; i < last.size(); ++i) monotone = monotone && last[i] <= 1.1 * last[i - 1];
  o6.expect(monotone, "non-increasing within 10%");
  o6.expect(last.size() == 4 && last[3] <= 0.7 * last[0], "N=5 <= 0.7 N=2");
  if (!frozen_g6.empty()) {
    double dev = 0.0;
    for (std::size_t i = 0; i < last.size(); ++i) dev = std::max(dev, std::abs(last[i] / frozen_g6[i] - 1.0));
    o6.detail << "(max rel. change vs frozen " << dev << ") ";
    o6.expect(dev <= 1e-6, "matches frozen values");
  }
  o6.expect(seconds < 1800.0, "runtime < 30 min");

  o7.detail << "max sobolev ratio to t=0 " << sob_ratio << " ";
  o7.expect(sob_ratio <= 2.0, "ratio <= 2");

  const double c = cal.at("gap").at("c");
  double worst = 0.0;
  for (const auto& run : report.runs)
    for (const auto& g : run.gaps) worst = std::max(worst, g.magnitude() / g.envelope);
  gap_out.detail << "gap/envelope max " << worst << " (C " << c << ") ";
  gap_out.expect(worst <= c, "gap within C envelope");
}

void g8(Outcome& o) {
  const double expect = square_well_scattering_length(8.0, 0.25, 1.0);
  const double a0 = scattering_length({PotentialProfile::square_well(8.0, 0.25), 1.0});
  const double kappa = std::sqrt(4.0);
  const double closed = 0.25 - std::tanh(kappa * 0.25) / kappa;
  o.detail << "square well |a0 - closed form| " << std::abs(a0 - closed) << " ";
  o.expect(std::abs(a0 - closed) <= 1e-8 && std::abs(expect - closed) <= 1e-14, "square well to 1e-8");

  const auto prof = PotentialProfile::bump();
  const double b = coupling_b(prof, 3);
  const std::vector<double> ns{1e2, 1e3, 1e4, 1e5, 1e6};
  const auto rows = coupling_flow(prof, 0.4, ns);
  const double target = b / (8.0 * std::numbers::pi);
  const double dev4 = std::abs(rows[2].n_a0 / target - 1.0);
  o.detail << "N a0 at N=1e4 off by " << dev4 << " ";
  o.expect(dev4 <= 0.05, "N a0 within 5% of b/(8 pi)");
  std::vector<double> x, y;
  for (const auto& r : rows) {
    x.push_back(1.0 / (r.n * r.a));
    y.push_back(r.rel_dev);
  }
  const auto fit = fit_line(x, y);
  o.detail << "rel_dev fit slope " << fit.slope << ", intercept " << fit.intercept << " +- " << fit.intercept_se << " ";
  o.expect(std::abs(fit.intercept) <= std::max(3.0 * fit.intercept_se, 1e-3), "intercept consistent with 0");
}

void g9_sobsob(Outcome& o, const nlohmann::json& cal) {
  const double c = cal.at("sobsob").at("c");
  const Grid g = make_grid(1, 32);
  const double b = bump_b1();
  const auto phi0 = default_initial_field(g);
  const std::vector<FieldState> inputs{phi0, default_initial_field(g, 0.8), solve_gp(phi0, b, 0.1, 1e-3)};
  double worst = 0.0;
  for (const auto& f : inputs) {
    const auto g2 = tensor_projector(f.phi, 2);
    for (const auto& j : sector_one(g))
      for (double beta : {0.25, 0.125, 0.0625}) worst = std::max(worst, sobsob_bound_check(j, g2, 1, beta, beta).ratio());
  }
  o.detail << "max lhs/rhs " << worst << " (C " << c << ") ";
  o.expect(worst <= c, "lhs <= C rhs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bosonlab acceptance run"};
  std::vector<std::string> only;
  std::string cal_path = BOSONLAB_CALIBRATION;
  app.add_option("--only", only, "criteria to run, e.g. G1 G4");
  std::vector<std::string> known;
  app.add_option("--calibration", cal_path, "tolerance calibration JSON");
  app.add_option("--known-failure", known, "criteria reported but not counted in the exit status");
  CLI11_PARSE(app, argc, argv);
  auto wanted = [&](const std::string& id) {
    return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
  };

  nlohmann::json cal;
  {
    std::ifstream in(cal_path);
    if (!in) {
      std::cerr << "cannot read calibration " << cal_path << "\n";
      return 2;
    }
    in >> cal;
  }

  bool all = true;
  std::vector<std::string> failed;
  auto line = [&](const std::string& id, const std::string& title, Outcome& o, double seconds) {
    const bool is_known = std::find(known.begin(), known.end(), id) != known.end();
    if (!o.pass) {
      failed.push_back(id);
      if (!is_known) all = false;
    }
    std::cout << id << " " << (o.pass ? "PASS" : "FAIL") << (!o.pass && is_known ? " (known)" : "") << "  " << title << ": " << o.detail.str() << "["
              << seconds << " s]" << std::endl;
  };
  auto timed = [&](const std::string& id, const std::string& title, const std::function<void(Outcome&)>& f,
                   double budget) {
    if (!wanted(id)) return;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      f(o);
    } catch (const std::exception& e) {
      o.expect(false, e.what());
    }
    const double s = since(t0);
    if (budget > 0) o.expect(s < budget, "runtime budget");
    line(id, title, o, s);
  };

  timed("G1", "oracle equivalence", g1, 10.0);
  if (wanted("G2") || wanted("G3")) {
    Outcome o2, o3;
    double s = 0;
    const auto t0 = Clock::now();
    try {
      g2_g3(o2, o3, s);
    } catch (const std::exception& e) {
      o2.expect(false, e.what());
      o3.expect(false, e.what());
    }
    line("G2", "conservation", o2, s);
    line("G3", "marginal structure", o3, since(t0) - s);
  }
  timed("G4", "GP hierarchy consistency", [&](Outcome& o) { g4(o, cal); }, 120.0);
  timed("G5", "BBGKY residual", g5, 300.0);
  Outcome gap;
  bool gap_ran = false;
  if (wanted("G6") || wanted("G7") || wanted("G9")) {
    Outcome o6, o7;
    double s = 0;
    try {
      g6_g7_g9gap(o6, o7, gap, cal, s);
    } catch (const std::exception& e) {
      o6.expect(false, e.what());
      o7.expect(false, e.what());
      gap.expect(false, e.what());
    }
    gap_ran = true;
    line("G6", "mean-field trend", o6, s);
    line("G7", "a-priori bound shadow", o7, 0.0);
  }
  timed("G8", "scattering and coupling", g8, 30.0);
  if (wanted("G9")) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      g9_sobsob(o, cal);
    } catch (const std::exception& e) {
      o.expect(false, e.what());
    }
    if (gap_ran) {
      o.detail << gap.detail.str();
      o.pass = o.pass && gap.pass;
    }
    line("G9", "bound checks", o, since(t0));
  }
  if (failed.empty()) {
    std::cout << "ALL PASS" << std::endl;
  } else {
    std::cout << (all ? "ONLY KNOWN FAILURES:" : "FAILED:");
    for (const auto& id : failed) std::cout << " " << id;
    std::cout << std::endl;
  }
  return all ? 0 : 1;
}
