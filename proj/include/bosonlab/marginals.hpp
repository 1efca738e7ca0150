#pragma once

// Reduced density matrices gamma^(k) and the norms and metrics used on them.
//
// A kernel is stored as a dense (M^{dk}) x (M^{dk}) matrix of grid values
// gamma(x_k; x'_k). As an operator on L^2(Lambda^k) its matrix in the
// orthonormal position basis is cell_volume^k * kernel, which is what the
// spectral quantities (trace norms, eigenvalues) are computed from.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bosonlab/lattice.hpp"
#include "bosonlab/manybody.hpp"
#include "bosonlab/potential.hpp"

namespace bosonlab {

using KernelMatrix = Eigen::MatrixXcd;

struct DensityMatrixK {
  Grid grid;
  int k = 1;
  KernelMatrix kernel;
  double time = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(kernel.rows()); }
  /// cell_volume^k.
  double weight() const;
};

struct MarginalFamily {
  std::vector<DensityMatrixK> sectors;  // sectors[k-1] holds gamma^(k)
  double time = 0.0;

  int k_max() const { return static_cast<int>(sectors.size()); }
  const DensityMatrixK& sector(int k) const;
};

DensityMatrixK reduce(const ManyBodyState& psi, int k);
MarginalFamily reduce_family(const ManyBodyState& psi, int k_max);

/// Tensor product f_1 (x) ... (x) f_k as a flat vector over Lambda^k.
Eigen::VectorXcd kron(const std::vector<GridFunction>& factors);

/// k-fold tensor power of |phi><phi|.
DensityMatrixK tensor_projector(const GridFunction& phi, int k);

/// Tr over the last variable of gamma^(k+1).
DensityMatrixK partial_trace_last(const DensityMatrixK& gamma);

double trace(const DensityMatrixK& gamma);
/// Weighted Hilbert-Schmidt norm (int |gamma|^2)^{1/2}.
double hs_norm(const DensityMatrixK& gamma);
/// Eigenvalues of the Hermitian part of the operator, ascending.
Eigen::VectorXd eigenvalues(const DensityMatrixK& gamma);

struct DensityInvariants {
  double hermiticity = 0.0;   // max |gamma - gamma^*| relative to max |gamma|
  double min_eigenvalue = 0.0;  // relative to the operator norm
  double trace_error = 0.0;     // |Tr gamma - 1|
  double bosonic = 0.0;         // max deviation under swapping two particles (k >= 2)

  bool ok() const {
    return hermiticity <= 1e-10 && min_eigenvalue >= -1e-9 && trace_error <= 1e-9 && bosonic <= 1e-10;
  }
};

DensityInvariants check_invariants(const DensityMatrixK& gamma);
/// HS norm of Tr_{k+1} gamma^(k+1) - gamma^(k).
double compatibility_error(const DensityMatrixK& lower, const DensityMatrixK& upper);

/// (1/2) Tr |gamma - sigma|.
double trace_distance(const DensityMatrixK& gamma, const DensityMatrixK& sigma);

/// Tr |S_1..S_k gamma S_k..S_1| with S = (1 - Delta)^{1/2} on every variable.
double sobolev_trace_norm(const DensityMatrixK& gamma);
/// Same, but S only on the listed variables (1-based).
double sobolev_trace_norm(const DensityMatrixK& gamma, const std::vector<int>& variables);

/// <J, gamma> = int conj(J(x;x')) gamma(x;x') for a kernel of J's sector.
cplx pairing(const TestKernel& j, const KernelMatrix& kernel, const Grid& grid);
inline cplx pairing(const TestKernel& j, const DensityMatrixK& gamma) { return pairing(j, gamma.kernel, gamma.grid); }

/// sum_k 2^{-k} ||gamma^(k)||_2 over the stored sectors.
double hminus_norm(const MarginalFamily& family);

/// sum_i 2^{-i} |sum_k <J_i^(k), gamma^(k) - gamma'^(k)>| over a finite family.
double rho_metric(const MarginalFamily& a, const MarginalFamily& b, const std::vector<TestKernel>& family);

/// Contraction of the extra variable of gamma^(k+1):
///
///   K(x_k; x'_k) = int dy dy' D(y' - y) P(y - x_j) gamma(x_k, y; x'_k, y')
///
/// or, when `primed`, with P(y' - x'_j). An empty `diagonal` means the sharp
/// diagonal y' = y; an empty `pair` means P = delta.
KernelMatrix contract_extra(const DensityMatrixK& upper, int j, bool primed,
                            const std::optional<std::vector<double>>& diagonal,
                            const std::optional<std::vector<double>>& pair);

/// h_r(x'_{k+1} - x_{k+1}) h_{r'}(x_{k+1} - x_j) smoothing of gamma^(k+1)
/// with ball mollifiers of widths r (diagonal) and r_prime (pair).
KernelMatrix regularized_contraction(const DensityMatrixK& upper, int j, double r, double r_prime);

}  // namespace bosonlab
