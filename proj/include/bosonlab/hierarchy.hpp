#pragma once

// Weak-form residuals of the finite BBGKY hierarchy and of the regularized GP
// hierarchy on snapshot trajectories, plus the mollifier-error checks.
//
// Pairings use <J, gamma> = int conj(J) gamma. For a sector-k test kernel J the
// BBGKY identity reads
//
//   <J,g_t> - <J,g_0> + i int_0^t K(s) ds + (i/N) int_0^t I(s) ds
//                     + i (1 - k/N) int_0^t C_V(s) ds = 0
//
// with K the kinetic pairing sum_j <J, (-Delta_j + Delta'_j) g^(k)>, I the
// intra-sector pairing and C_V the collision pairing against g^(k+1) on the
// diagonal x_{k+1} = x'_{k+1}. The GP identity replaces the last two terms by
// i b int C_reg with C_reg built from ball mollifiers delta_beta (collision)
// and delta_eta (diagonal). Time integrals use the composite trapezoid rule
// over uniformly spaced snapshots.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bosonlab/gp.hpp"
#include "bosonlab/manybody.hpp"
#include "bosonlab/marginals.hpp"

namespace bosonlab {

enum class Provenance { simulation, factorized_gp };

struct SnapshotTrajectory {
  std::vector<MarginalFamily> snapshots;  // uniformly spaced, first at t = 0
  Provenance provenance = Provenance::simulation;

  double spacing() const;
  double final_time() const { return snapshots.empty() ? 0.0 : snapshots.back().time; }
  /// Every `stride`-th snapshot (stride divides the snapshot count minus one).
  SnapshotTrajectory subsampled(int stride) const;
  void validate() const;
};

/// Propagate the N-body state and store reduced families up to k_max.
SnapshotTrajectory simulate_trajectory(const ManyBodyConfig& cfg, const FieldState& phi0, double duration,
                                       double snapshot_spacing, int k_max = 2);
/// Solve the GP equation and store the factorized families up to k_max.
SnapshotTrajectory gp_trajectory(const FieldState& phi0, double b, double duration, double dt,
                                 double snapshot_spacing, int k_max = 2);

/// Which collision integrands evaluate_terms should compute.
struct TermOptions {
  std::optional<std::vector<double>> potential;  // V_a samples: intra and C_V
  bool sharp = false;                            // sharp-diagonal delta collision
  std::optional<double> beta;                    // regularized collision with
  std::optional<double> eta;                     // delta_beta / delta_eta
};

/// Integrand values for one test kernel at one snapshot.
struct HierarchyTerms {
  double time = 0.0;
  cplx pairing{};          // <J, g^(k)>
  cplx kinetic{};          // sum_j <J, (-Delta_j + Delta'_j) g^(k)>
  cplx intra{};            // sum_{j < l} <J, (V(x_j - x_l) - V(x'_j - x'_l)) g^(k)>
  cplx collision_v{};      // sum_j <J, int dy (V(x_j - y) - V(x'_j - y)) g^(k+1)(.,y;.,y)>
  cplx collision_sharp{};  // sum_j <J, g^(k+1)(.,x_j;.,x_j) - g^(k+1)(.,x'_j;.,x'_j)>
  cplx collision_reg{};    // mollified version of collision_sharp
};

HierarchyTerms evaluate_terms(const MarginalFamily& family, const TestKernel& j, const TermOptions& options);
/// Same, for several kernels at once; contractions are shared per sector.
std::vector<HierarchyTerms> evaluate_terms(const MarginalFamily& family, const std::vector<TestKernel>& kernels,
                                           const TermOptions& options);
/// Same terms for the factorized family of `phi`, in closed form without
/// forming the product kernels.
std::vector<HierarchyTerms> evaluate_terms_factorized(const FieldState& phi, const std::vector<TestKernel>& kernels,
                                                      const TermOptions& options);

struct ResidualComponents {
  cplx datum{};      // <J,g_t> - <J,g_0>
  cplx kinetic{};    // i int K
  cplx intra{};      // (i/N) int I        (zero for the GP identity)
  cplx collision{};  // i(1-k/N) int C_V   or  i b int C_reg
};

struct ResidualReport {
  int kernel_id = 0;
  int k = 1;
  cplx residual{};
  ResidualComponents parts;
  double snapshot_spacing = 0.0;
  double beta = 0.0;
  double eta = 0.0;

  double magnitude() const { return std::abs(residual); }
  /// Largest component magnitude, the natural scale of the residual.
  double max_term() const;
};

/// Composite trapezoid rule over uniformly spaced samples.
cplx trapezoid(const std::vector<HierarchyTerms>& terms, cplx HierarchyTerms::*field);

ResidualReport assemble_bbgky(const std::vector<HierarchyTerms>& terms, int k, int particles);
ResidualReport assemble_gp(const std::vector<HierarchyTerms>& terms, int k, double b, double beta, double eta);

ResidualReport bbgky_residual(const SnapshotTrajectory& traj, const TestKernel& j, const ManyBodyConfig& cfg);
ResidualReport gp_residual(const SnapshotTrajectory& traj, const TestKernel& j, double b, double beta, double eta);

/// Streams a GP solve snapshot by snapshot (no trajectory storage) and returns
/// the GP residual for each kernel. Needed at M = 64 where a stored sector-2
/// trajectory would not fit in memory.
std::vector<ResidualReport> gp_residuals_streamed(const FieldState& phi0, double b_dynamics, double b_identity,
                                                  double duration, double dt, double snapshot_spacing,
                                                  const std::vector<TestKernel>& kernels, double beta, double eta);

struct SobsobCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio() const { return rhs > 0.0 ? lhs / rhs : 0.0; }
};

/// (||J||_inf + ||grad_j J||_inf).
double kernel_w1inf_norm(const TestKernel& j, int variable);

/// lhs = |<J, (delta_b1 x delta_b2 smoothing - sharp diagonal) of g^(k+1)>|,
/// rhs = (||J||_inf + ||grad_j J||_inf)(b1 + sqrt b2) Tr|S_j S_{k+1} g S_j S_{k+1}|.
SobsobCheck sobsob_bound_check(const TestKernel& j, const DensityMatrixK& upper, int variable, double beta1,
                               double beta2);

struct GapReport {
  cplx gap{};            // BBGKY interaction pairing minus GP-regularized pairing
  cplx gap_beta{};       // i b int (C_reg - C_sharp): mollifier part
  cplx gap_range{};      // i int (C_V - b C_sharp): finite range a
  cplx gap_finite_n{};   // i int ((-k/N) C_V + I/N): finite N
  double sup_sobolev2 = 0.0;  // sup_s Tr|S_1 S_2 g^(2)_s S_2 S_1|
  double envelope = 0.0;      // t (k b^{1/2} + k a^{1/2} + k^2/(N a^{1/2})) * sup_sobolev2

  double magnitude() const { return std::abs(gap); }
};

/// Gap between the BBGKY and regularized-GP interaction pairings on a
/// simulated trajectory. `sup_sobolev2` may be supplied when already known.
GapReport bbgky_vs_gp_gap(const SnapshotTrajectory& traj, const TestKernel& j, const ManyBodyConfig& cfg, double b,
                          double beta, double eta, std::optional<double> sup_sobolev2 = std::nullopt);
GapReport assemble_gap(const std::vector<HierarchyTerms>& terms, int k, const ManyBodyConfig& cfg, double b,
                       double beta, double sup_sobolev2);

}  // namespace bosonlab
