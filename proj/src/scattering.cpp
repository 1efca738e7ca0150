#include "bosonlab/scattering.hpp"

#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

namespace bosonlab {

namespace {

using State = std::array<double, 3>;  // u, u', int_0^r 4 pi s V(s) u(s) ds

void integrate(const PotentialProfile& v, double lambda, State& y, double r0, double r1) {
  namespace odeint = boost::numeric::odeint;
  auto rhs = [&](const State& s, State& ds, double r) {
    const double vr = v(r);
    ds[0] = s[1];
    ds[1] = 0.5 * lambda * vr * s[0];
    ds[2] = 4.0 * pi * r * vr * s[0];
  };
  auto stepper = odeint::make_controlled(1e-14, 1e-12, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_adaptive(stepper, rhs, y, r0, r1, (r1 - r0) * 1e-3);
}

}  // namespace

void RadialProblem::validate() const {
  profile.validate();
  require(lambda >= 0.0, "coupling lambda must be nonnegative");
  require(end() >= 4.0 * profile.radius * (1.0 - 1e-12), "r_max must be at least 4 R");
}

ScatteringSolution solve_zero_energy(const RadialProblem& p) {
  p.validate();
  const double radius = p.profile.radius;
  State y{0.0, 1.0, 0.0};
  integrate(p.profile, p.lambda, y, 0.0, radius);
  const double coupling_integral = y[2];

  // Outside the support the solution is linear; sample it and fit.
  constexpr int samples = 64;
  const double r_end = p.end();
  std::vector<double> rs{radius};
  std::vector<double> us{y[0]};
  const PotentialProfile none = PotentialProfile::square_well(0.0, radius);
  for (int i = 1; i <= samples; ++i) {
    const double r1 = radius + (r_end - radius) * i / samples;
    integrate(none, 0.0, y, rs.back(), r1);
    rs.push_back(r1);
    us.push_back(y[0]);
  }
  const LinearFit fit = fit_line(rs, us);
  if (!(fit.slope > 0.0) || !std::isfinite(fit.intercept))
    throw NumericError("zero-energy solution is not asymptotically linear");
  ScatteringSolution s;
  s.slope = fit.slope;
  s.a0 = -fit.intercept / fit.slope;
  for (std::size_t i = 0; i < rs.size(); ++i)
    s.linear_residual = std::max(s.linear_residual, std::abs(us[i] - fit.slope * (rs[i] - s.a0)) / fit.slope);
  s.effective_coupling = coupling_integral / fit.slope;
  return s;
}

double scattering_length(const RadialProblem& p) { return solve_zero_energy(p).a0; }

double square_well_scattering_length(double v0, double radius, double lambda) {
  const double kappa = std::sqrt(0.5 * lambda * v0);
  if (kappa == 0.0) return 0.0;
  return radius - std::tanh(kappa * radius) / kappa;
}

std::vector<CouplingFlowRow> coupling_flow(const PotentialProfile& profile, double epsilon,
                                           const std::vector<double>& n_list) {
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    require(n_list[i] >= 1.0, "particle counts must be at least 1");
    require(i == 0 || n_list[i] > n_list[i - 1], "N list must be ascending");
  }
  const double b = coupling_b(profile, 3);
  require(b > 0.0, "coupling flow needs a nonzero potential");
  std::vector<CouplingFlowRow> rows;
  for (double n : n_list) {
    CouplingFlowRow row;
    row.n = n;
    row.a = std::pow(n, -epsilon);
    const auto sol = solve_zero_energy({profile, 1.0 / (n * row.a), 0.0});
    row.n_a0 = n * row.a * sol.a0;
    row.eff_coupling = sol.effective_coupling;
    row.b = b;
    row.rel_dev = (row.eff_coupling - b) / b;
    rows.push_back(row);
  }
  return rows;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "line fit needs distinct abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.slope * x[i] - f.intercept;
    f.rss += r * r;
  }
  if (x.size() > 2) {
    const double s2 = f.rss / (n - 2.0);
    f.slope_se = std::sqrt(s2 / sxx);
    f.intercept_se = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  }
  return f;
}

}  // namespace bosonlab
