#pragma once

// Interaction profile V, its scaling V_a(x) = a^{-d} V(x/a), the coupling
// b = int V, ball mollifiers and the trigonometric test-kernel family used in
// weak-form pairings.

#include <cstdint>
#include <string>
#include <vector>

#include "bosonlab/lattice.hpp"

namespace bosonlab {

enum class ProfileKind { bump, square_well, tabulated };

/// Radial, nonnegative, compactly supported profile.
///
/// bump:        v0 * exp(-1 / (1 - (r/R)^2)) for r < R
/// square_well: v0 for r <= R (only meant for the scattering oracle)
/// tabulated:   piecewise-linear through (radii, values), zero beyond radii.back()
struct PotentialProfile {
  ProfileKind kind = ProfileKind::bump;
  double v0 = 1.0;
  double radius = 0.25;
  std::vector<double> radii;
  std::vector<double> values;

  static PotentialProfile bump(double v0 = 1.0, double radius = 0.25);
  static PotentialProfile square_well(double v0, double radius);
  static PotentialProfile tabulated(std::vector<double> radii, std::vector<double> values);

  double operator()(double r) const;
  /// Same shape with r -> r/a and amplitude multiplied by `amplitude_factor`.
  PotentialProfile rescaled(double a, double amplitude_factor) const;
  void validate() const;
};

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

/// b = int_{R^d} V(|x|) dx by adaptive radial quadrature.
double coupling_b(const PotentialProfile& profile, int d);
/// ||V||_{L^{3/2}(R^3)}.
double norm_l32_3d(const PotentialProfile& profile);

struct ScaledPotential {
  PotentialProfile profile;
  double a = 1.0;
  int d = 1;

  double operator()(double r) const;
};

/// Periodic (minimum-image) samples of a^{-d} V(|x|/a) at the lattice points.
/// Requires a*M >= 4 and a*R < 1/2.
GridFunction sample_scaled(const ScaledPotential& sp, const Grid& grid);
/// Real-valued variant of sample_scaled.
std::vector<double> sample_scaled_real(const ScaledPotential& sp, const Grid& grid);

struct Mollifier {
  double beta = 0.125;
  int d = 1;
};

/// Ball indicator chi(|x| <= beta), renormalized so that
/// cell_volume * sum = 1 exactly. Requires beta*M >= 2.
GridFunction sample_mollifier(const Mollifier& m, const Grid& grid);
std::vector<double> sample_mollifier_real(const Mollifier& m, const Grid& grid);

/// Single-particle factors of the test kernels; functions of the first
/// Cartesian coordinate only.
enum class TrigFactor { one, cos1, sin1, cos2 };

GridFunction trig_factor(TrigFactor f, const Grid& grid);

/// J(x_k; x'_k) = prod_j g_j(x_j) * prod_j conj(g'_j(x'_j)).
struct TestKernel {
  int k = 1;
  std::vector<GridFunction> left;   // g_1..g_k
  std::vector<GridFunction> right;  // g'_1..g'_k

  double l2_norm() const;
  /// Same kernel times a scalar (applied to the first left factor).
  TestKernel scaled(cplx s) const;
  bool is_zero() const;
};

TestKernel make_test_kernel(const Grid& grid, const std::vector<TrigFactor>& left, const std::vector<TrigFactor>& right);
TestKernel zero_test_kernel(const Grid& grid, int k);

/// The fixed, enumerated rho-metric family {J_i}: sectors 1 and 2, factors
/// from {1, cos 2 pi x, sin 2 pi x, cos 4 pi x}, each rescaled to
/// ||J_i||_2 = 2^{-k}. Sizes up to 8 are supported; the order is fixed.
std::vector<TestKernel> test_kernel_family(const Grid& grid, int size = 8);

/// max over `trials` random band-limited normalized psi on a d=3 grid of
///   int |psi|^2 a^{-2} V(x/a) / ( ||V||_{3/2} (||grad psi||^2 + ||psi||^2)^{1/2} ).
double sobolev_inequality_check(const PotentialProfile& profile, double a, int trials, std::uint64_t seed,
                                int points_per_axis = 16);

/// Same ratio for one given state (used by the oracle tests).
double sobolev_inequality_ratio(const PotentialProfile& profile, double a, const GridFunction& psi);

/// max over `trials` random band-limited two-body states on a d=3 grid of
///   <psi, a^{-3} V((x-y)/a) psi> / ( ||V||_1 <psi, (1-Delta_x)(1-Delta_y) psi> ).
double two_body_form_ratio(const PotentialProfile& profile, double a, int trials, std::uint64_t seed,
                           int points_per_axis = 8);

}  // namespace bosonlab
