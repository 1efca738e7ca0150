#pragma once

// Zero-energy two-body scattering in three dimensions.
//
// For H = -Delta_1 - Delta_2 + W(x_1 - x_2) the relative zero-energy equation
// is -Delta f + (1/2) W f = 0. With W = lambda V and f = u(r)/r this becomes
//
//   u'' = (lambda/2) V(r) u,   u(0) = 0, u'(0) = 1,
//
// and beyond the support u(r) = c (r - a0). The factor 1/2 is the reduced
// mass of the pair and rescales a0 relative to conventions without it.

#include <vector>

#include "bosonlab/potential.hpp"

namespace bosonlab {

struct RadialProblem {
  PotentialProfile profile;
  double lambda = 1.0;
  double r_max = 0.0;  // 0 selects 4 R

  double end() const { return r_max > 0.0 ? r_max : 4.0 * profile.radius; }
  void validate() const;
};

struct ScatteringSolution {
  double a0 = 0.0;
  double slope = 1.0;         // c in u = c (r - a0)
  double linear_residual = 0.0;  // max |u - c (r - a0)| / c over r in [R, r_max]
  /// int V f dx with f -> 1 at infinity (the unscaled profile, coupling lambda
  /// not included). Equals b at lambda = 0 and 8 pi a0 / lambda otherwise.
  double effective_coupling = 0.0;
};

ScatteringSolution solve_zero_energy(const RadialProblem& p);
double scattering_length(const RadialProblem& p);

/// a0 = R - tanh(kappa R)/kappa with kappa = sqrt(lambda v0 / 2).
double square_well_scattering_length(double v0, double radius, double lambda);

struct CouplingFlowRow {
  double n = 0.0;
  double a = 0.0;
  double n_a0 = 0.0;           // N a0 of the pair potential (1/N) V_a
  double eff_coupling = 0.0;   // int V_a f
  double b = 0.0;
  double rel_dev = 0.0;        // (eff_coupling - b) / b
};

/// One row per N with a = N^{-epsilon}. By scaling, a0((1/N) V_a) equals
/// a * a0(V, lambda = 1/(N a)).
std::vector<CouplingFlowRow> coupling_flow(const PotentialProfile& profile, double epsilon,
                                           const std::vector<double>& n_list);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  double rss = 0.0;
};

/// Ordinary least squares y = slope x + intercept with standard errors.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bosonlab
