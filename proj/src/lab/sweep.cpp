#include "bosonlab/lab/sweep.hpp"

#include <cmath>
#include <fstream>
#include <memory>

#include "bosonlab/lab/io.hpp"
#include "json.hpp"

namespace bosonlab::lab {

namespace {

using nlohmann::json;

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json gap_json(const GapReport& g) {
  return json{{"gap", complex_json(g.gap)},
              {"gap_beta", complex_json(g.gap_beta)},
              {"gap_range", complex_json(g.gap_range)},
              {"gap_finite_n", complex_json(g.gap_finite_n)},
              {"sup_sobolev2", g.sup_sobolev2},
              {"envelope", g.envelope},
              {"ratio", g.envelope > 0.0 ? g.magnitude() / g.envelope : 0.0}};
}

void write_report_json(const fs::path& path, const ExperimentConfig& cfg, const SweepReport& report,
                       const std::string& status, const std::string& error) {
  json runs = json::array();
  for (const auto& r : report.runs) {
    json gaps = json::array();
    for (const auto& g : r.gaps) gaps.push_back(gap_json(g));
    runs.push_back({{"n", r.n}, {"a", r.a}, {"energy_constants", r.energy_constants}, {"gaps", gaps}});
  }
  json j{{"config_hash", report.config_hash},
         {"config", cfg.canonical()},
         {"b", report.b},
         {"status", status},
         {"rows", report.rows.size()},
         {"runs", runs}};
  if (!error.empty()) j["error"] = error;
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

}  // namespace

bool SweepRow::finite() const {
  for (double v : {epsilon, a, t, trace_distance, sobolev_k1, sobolev_k2, hminus, rho_to_factorized,
                   bbgky_residual_max, gp_residual_max})
    if (!std::isfinite(v)) return false;
  return true;
}

std::vector<double> SweepReport::times() const {
  std::vector<double> t;
  for (const auto& r : rows)
    if (r.n == rows.front().n) t.push_back(r.t);
  return t;
}

std::vector<int> SweepReport::particle_counts() const {
  std::vector<int> n;
  for (const auto& r : rows)
    if (n.empty() || n.back() != r.n) n.push_back(r.n);
  return n;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols{
      "N",      "epsilon", "a",           "t",
      "trace_distance",    "sobolev_k1",  "sobolev_k2",
      "hminus", "rho_to_factorized",      "bbgky_residual_max", "gp_residual_max"};
  return cols;
}

std::vector<std::string> sweep_cells(const SweepRow& r) {
  auto f = CsvWriter::number;
  return {std::to_string(r.n), f(r.epsilon),   f(r.a),      f(r.t),
          f(r.trace_distance), f(r.sobolev_k1), f(r.sobolev_k2), f(r.hminus),
          f(r.rho_to_factorized), f(r.bbgky_residual_max), f(r.gp_residual_max)};
}

SweepReport run_sweep(const ExperimentConfig& cfg, const SweepOptions& options) {
  cfg.validate();
  require(cfg.k_max == 2, "the sweep needs k_max = 2 (residuals pair sector 1 against sector 2)");
  auto say = [&](const std::string& msg) {
    if (options.progress) options.progress(msg);
  };

  SweepReport report;
  report.config_hash = cfg.hash();
  const PotentialProfile profile = cfg.potential();
  report.b = coupling_b(profile, cfg.d);
  const Grid grid = make_grid(cfg.d, cfg.points_per_axis);
  const FieldState phi0 = default_initial_field(grid, cfg.initial_amplitude);
  const auto family = test_kernel_family(grid, cfg.family_size);
  std::vector<TestKernel> residual_kernels;
  for (const auto& j : family)
    if (j.k == 1) residual_kernels.push_back(j);

  const fs::path dir = cfg.output_dir;
  std::unique_ptr<CsvWriter> csv;
  if (options.write_files) {
    fs::create_directories(dir);
    csv = std::make_unique<CsvWriter>(dir / "sweep.csv", sweep_columns());
  }

  try {
    // GP reference, shared by every N.
    say("solving GP reference");
    std::vector<FieldState> gp;
    std::vector<std::vector<HierarchyTerms>> gp_terms(residual_kernels.size());
    TermOptions gp_opt;
    gp_opt.beta = cfg.beta;
    gp_opt.eta = cfg.eta;
    FieldState phi = phi0;
    solve_gp_with_snapshots(phi, report.b, cfg.duration, cfg.dt, cfg.spacing(), [&](const FieldState& f) {
      gp.push_back(f);
      const auto t = evaluate_terms_factorized(f, residual_kernels, gp_opt);
      for (std::size_t i = 0; i < residual_kernels.size(); ++i) gp_terms[i].push_back(t[i]);
    });

    for (int n : cfg.n_list) {
      const ManyBodyConfig mb = cfg.manybody(n);
      say("N = " + std::to_string(n) + ", a = " + CsvWriter::number(mb.range));
      SweepRun run;
      run.n = n;
      run.a = mb.range;
      ManyBodyState psi = build_product_state(phi0, n);
      if (options.energy_moments) {
        const auto moments = energy_moments(psi, mb, 3);
        for (int k = 1; k <= 3; ++k)
          run.energy_constants.push_back(std::pow(std::max(moments[static_cast<std::size_t>(k)], 0.0), 1.0 / k) / n);
      }
      TermOptions opt;
      opt.potential = sample_scaled_real(mb.scaled_potential(), grid);
      opt.sharp = true;
      opt.beta = cfg.beta;
      opt.eta = cfg.eta;
      std::vector<std::vector<HierarchyTerms>> terms(residual_kernels.size());
      double sup_sob2 = 0.0;
      std::size_t s = 0;
      propagate_with_snapshots(psi, mb, cfg.duration, cfg.spacing(), [&](const ManyBodyState& state) {
        const MarginalFamily fam = reduce_family(state, 2);
        SweepRow row;
        row.n = n;
        row.epsilon = cfg.epsilon.value_or(-std::log(mb.range) / std::log(static_cast<double>(n)));
        row.a = mb.range;
        row.t = state.time;
        row.trace_distance = trace_distance(fam.sector(1), tensor_projector(gp[s].phi, 1));
        row.sobolev_k1 = sobolev_trace_norm(fam.sector(1));
        row.sobolev_k2 = sobolev_trace_norm(fam.sector(2));
        sup_sob2 = std::max(sup_sob2, row.sobolev_k2);
        row.hminus = hminus_norm(fam);
        row.rho_to_factorized = rho_metric(fam, factorized_family(gp[s], 2), family);
        const auto now = evaluate_terms(fam, residual_kernels, opt);
        for (std::size_t i = 0; i < residual_kernels.size(); ++i) {
          terms[i].push_back(now[i]);
          const std::vector<HierarchyTerms> g(gp_terms[i].begin(), gp_terms[i].begin() + static_cast<std::ptrdiff_t>(s + 1));
          row.bbgky_residual_max = std::max(row.bbgky_residual_max, assemble_bbgky(terms[i], 1, n).magnitude());
          row.gp_residual_max =
              std::max(row.gp_residual_max, assemble_gp(g, 1, report.b, cfg.beta, cfg.eta).magnitude());
        }
        if (!row.finite()) throw NumericError("non-finite sweep metric at N = " + std::to_string(n));
        report.rows.push_back(row);
        if (csv) csv->row(sweep_cells(row));
        ++s;
      });
      for (const auto& t : terms) run.gaps.push_back(assemble_gap(t, 1, mb, report.b, cfg.beta, sup_sob2));
      report.runs.push_back(std::move(run));
    }
  } catch (const std::exception& e) {
    if (options.write_files) write_report_json(dir / "sweep.json", cfg, report, "aborted", e.what());
    throw;
  }
  if (options.write_files) write_report_json(dir / "sweep.json", cfg, report, "complete", "");
  return report;
}

}  // namespace bosonlab::lab
