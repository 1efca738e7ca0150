#pragma once

// Convergence sweep over N: propagate the product state, reduce, solve GP from
// the same initial field and tabulate the distance and regularity metrics at
// every snapshot.

#include <functional>
#include <string>
#include <vector>

#include "bosonlab/hierarchy.hpp"
#include "bosonlab/lab/config.hpp"

namespace bosonlab::lab {

struct SweepRow {
  int n = 0;
  double epsilon = 0.0;  // -ln a / ln N when the run fixes a instead
  double a = 0.0;
  double t = 0.0;
  double trace_distance = 0.0;  // gamma^(1)_{N,t} vs |phi_t><phi_t|
  double sobolev_k1 = 0.0;
  double sobolev_k2 = 0.0;
  double hminus = 0.0;
  double rho_to_factorized = 0.0;
  double bbgky_residual_max = 0.0;  // over [0, t], max over the k = 1 kernels
  double gp_residual_max = 0.0;

  bool finite() const;
};

struct SweepRun {
  int n = 0;
  double a = 0.0;
  std::vector<double> energy_constants;  // (<H^k>)^{1/k} / N, k = 1..3
  std::vector<GapReport> gaps;           // per k = 1 kernel, over [0, T]
};

struct SweepReport {
  std::string config_hash;
  double b = 0.0;
  std::vector<SweepRow> rows;
  std::vector<SweepRun> runs;

  std::vector<double> times() const;
  std::vector<int> particle_counts() const;
};

const std::vector<std::string>& sweep_columns();
std::vector<std::string> sweep_cells(const SweepRow& row);

struct SweepOptions {
  bool write_files = true;
  bool energy_moments = true;
  std::function<void(const std::string&)> progress;
};

/// Runs the sweep. Writes <output_dir>/sweep.csv row by row and
/// <output_dir>/sweep.json at the end; on an exception the JSON records the
/// abort and the rows already produced stay on disk.
SweepReport run_sweep(const ExperimentConfig& cfg, const SweepOptions& options = {});

}  // namespace bosonlab::lab
