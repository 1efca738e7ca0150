#pragma once

// Cubic NLS  i d_t phi = -Delta phi + b |phi|^2 phi  with the same Strang
// splitting and grid as the N-body propagator, and the factorized family
// gamma^(k) = |phi><phi|^{(x) k} it generates.

#include <functional>

#include "bosonlab/field_state.hpp"
#include "bosonlab/marginals.hpp"

namespace bosonlab {

FieldState solve_gp(const FieldState& phi0, double b, double duration, double dt);

/// As solve_gp, calling `observe` at t0 and after each `snapshot_spacing`.
void solve_gp_with_snapshots(FieldState& phi, double b, double duration, double dt, double snapshot_spacing,
                             const std::function<void(const FieldState&)>& observe);

/// int |grad phi|^2 + (b/2) int |phi|^4.
double gp_energy(const FieldState& phi, double b);

MarginalFamily factorized_family(const FieldState& phi, int k_max);

}  // namespace bosonlab
