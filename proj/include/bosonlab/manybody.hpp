#pragma once

// The N-body wave function on the tensor grid Lambda^N, the Hamiltonian
//
//   H_N = -sum_j Delta_j + (1/N) sum_{i < j} V_a(x_i - x_j)
//
// and its Strang split-step propagator. Each unordered pair interacts once;
// the marginals then obey the hierarchy with collision factor (1 - k/N) and
// the mean-field limit is the GP equation with coupling b = int V.
//
// Tensor layout: particle 1 is the slowest index; each particle block is a
// row-major single-particle grid index, so the flat index is
// sum_j s_j * (M^d)^(N-1-j).

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "bosonlab/field_state.hpp"
#include "bosonlab/lattice.hpp"
#include "bosonlab/potential.hpp"

namespace bosonlab {

inline constexpr std::size_t default_memory_budget = std::size_t{2} << 30;

struct ManyBodyConfig {
  int d = 1;
  int points_per_axis = 32;
  int particles = 2;
  double range = 0.25;  // a
  PotentialProfile profile = PotentialProfile::bump();
  double dt = 1e-3;
  std::size_t memory_budget = default_memory_budget;

  /// Range from a = N^{-epsilon}.
  static ManyBodyConfig with_epsilon(int d, int points_per_axis, int particles, double epsilon,
                                     PotentialProfile profile, double dt);

  Grid grid() const { return make_grid(d, points_per_axis); }
  ScaledPotential scaled_potential() const { return {profile, range, d}; }
  /// Number of tensor entries (M^d)^N.
  std::size_t tensor_size() const;
  /// Peak bytes held by a propagation run (state + phase table + build scratch).
  std::size_t propagation_bytes() const;

  /// Enforces every guard (grid, resolution, N >= 2, memory budget). Throws
  /// PreconditionError; budget refusals name the largest admissible M.
  void validate() const;
  /// Non-fatal findings, e.g. an epsilon outside (0, 3/5).
  std::vector<std::string> warnings(double epsilon) const;
  /// Largest power-of-two M >= 8 that satisfies the budget and a*M >= 4, or 0.
  int largest_admissible_points() const;
};

struct ManyBodyState {
  Grid grid;
  int particles = 0;
  std::vector<cplx> values;
  double time = 0.0;

  std::size_t sites() const { return grid.size(); }
};

/// psi(x_1..x_N) = prod_j phi0(x_j). phi0 must be normalized.
ManyBodyState build_product_state(const FieldState& phi0, int particles);

/// L^2 norm with cell_volume^N weighting.
double norm(const ManyBodyState& psi);
/// <phi, psi> with cell_volume^N weighting.
cplx inner(const ManyBodyState& phi, const ManyBodyState& psi);

/// max over transpositions (i j) of ||psi - P_ij psi|| / ||psi||.
double symmetry_residual(const ManyBodyState& psi);

/// W(x) = (1/N) sum_{i < j} V_a(x_i - x_j) over the whole tensor (minimum image).
std::vector<double> interaction_field(const ManyBodyConfig& cfg);

ManyBodyState apply_hamiltonian(const ManyBodyState& psi, const ManyBodyConfig& cfg);

/// <psi, H^k psi> for k = 0..k_max (k_max <= 3).
std::vector<double> energy_moments(const ManyBodyState& psi, const ManyBodyConfig& cfg, int k_max);

/// Strang split-step propagator for a fixed step size. Owns the FFT plan and
/// the half-step interaction phase table, so repeated advances reuse them.
class Propagator {
 public:
  Propagator(const ManyBodyConfig& cfg, ManyBodyState& psi);

  /// Advance by `steps` full steps of cfg.dt.
  void advance_steps(ManyBodyState& psi, long steps);
  /// Advance by T; a trailing partial step is taken with a shorter Strang step.
  void advance(ManyBodyState& psi, double duration);

 private:
  void kinetic(ManyBodyState& psi, double tau);
  void half_interaction(ManyBodyState& psi);
  void check_finite(const ManyBodyState& psi) const;

  ManyBodyConfig cfg_;
  TensorFft plan_;
  std::vector<cplx> half_phase_;
};

ManyBodyState propagate(ManyBodyState psi, const ManyBodyConfig& cfg, double duration);

/// Propagate to `duration`, calling `observe` at t0 and after every
/// `snapshot_spacing` (which must be a whole number of steps).
void propagate_with_snapshots(ManyBodyState& psi, const ManyBodyConfig& cfg, double duration,
                              double snapshot_spacing, const std::function<void(const ManyBodyState&)>& observe);

}  // namespace bosonlab
