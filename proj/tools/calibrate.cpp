// Measures the tolerances the acceptance run checks against and writes them
// as JSON. Rerun only when the numerics change; the output is committed.

#include <algorithm>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "bosonlab/hierarchy.hpp"
#include "bosonlab/lab/sweep.hpp"
#include "json.hpp"

using namespace bosonlab;

namespace {

std::vector<TestKernel> sector_one(const Grid& g) {
  std::vector<TestKernel> out;
  for (const auto& j : test_kernel_family(g, 8))
    if (j.k == 1) out.push_back(j);
  return out;
}

double worst_gp_residual(double b_dynamics, double b) {
  const Grid g = make_grid(1, 64);
  double w = 0.0;
  for (const auto& r : gp_residuals_streamed(default_initial_field(g), b_dynamics, b, 0.1, 1e-4, 1e-3, sector_one(g),
                                             1.0 / 32, 1.0 / 32))
    w = std::max(w, r.magnitude());
  return w;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bosonlab tolerance calibration"};
  std::string out_path = "data/calibration.json";
  app.add_option("-o,--output", out_path, "output JSON");
  CLI11_PARSE(app, argc, argv);

  const double b = coupling_b(PotentialProfile::bump(), 1);
  nlohmann::json j;

  const double g4 = worst_gp_residual(b, b);
  j["g4"] = {{"setup", "d=1 M=64 T=0.1 dt=1e-4 spacing=1e-3 beta=eta=1/32, max over k=1 kernels"},
             {"measured", g4},
             {"tol", 2.0 * g4}};
  std::cout << "G4 residual " << g4 << "\n";

  // Sobsob constant from the canonical factorized input at beta = 1/4 only.
  {
    const Grid g = make_grid(1, 32);
    const auto g2 = tensor_projector(default_initial_field(g).phi, 2);
    double worst = 0.0;
    for (const auto& k : sector_one(g)) worst = std::max(worst, sobsob_bound_check(k, g2, 1, 0.25, 0.25).ratio());
    j["sobsob"] = {{"setup", "d=1 M=32 canonical field, beta=1/4, k=1 kernels"}, {"max_ratio", worst}, {"c", 2.0 * worst}};
    std::cout << "sobsob ratio " << worst << "\n";
  }

  // Gap constant from the N = 2 run of the mean-field sweep.
  {
    lab::ExperimentConfig cfg;
    cfg.n_list = {2};
    cfg.epsilon = 0.4;
    cfg.duration = 0.1;
    lab::SweepOptions opt;
    opt.write_files = false;
    opt.energy_moments = false;
    const auto report = lab::run_sweep(cfg, opt);
    double worst = 0.0;
    for (const auto& gap : report.runs.front().gaps) worst = std::max(worst, gap.magnitude() / gap.envelope);
    j["gap"] = {{"setup", "d=1 M=32 eps=0.4 N=2 T=0.1 beta=eta=1/16"}, {"max_ratio", worst}, {"c", std::max(1.0, 2.0 * worst)}};
    std::cout << "gap ratio " << worst << "\n";
  }

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return 3;
  }
  out << j.dump(2) << "\n";
  return 0;
}
