#include "bosonlab/gp.hpp"

#include <cmath>

#include "bosonlab/simd/kernels.hpp"

namespace bosonlab {

namespace {

class GpStepper {
 public:
  GpStepper(FieldState& phi, double b, double dt)
      : b_(b), dt_(dt), plan_(std::vector<int>(phi.grid().dim(), phi.grid().points_per_axis()), phi.phi.values.data()) {
    const auto lap = laplacian_symbol(phi.grid());
    kinetic_phase_.resize(lap.size());
    const double normalization = 1.0 / static_cast<double>(lap.size());
    for (std::size_t i = 0; i < lap.size(); ++i) kinetic_phase_[i] = std::polar(normalization, -dt * lap[i]);
    nonlinear_.resize(lap.size());
  }

  void steps(FieldState& phi, long n) {
    if (n <= 0) return;
    nonlinear(phi, 0.5 * dt_);
    for (long s = 0; s < n; ++s) {
      plan_.forward(phi.phi.values.data());
      simd::cmul(phi.phi.values, kinetic_phase_);
      plan_.backward(phi.phi.values.data());
      nonlinear(phi, s + 1 < n ? dt_ : 0.5 * dt_);
    }
    phi.time += static_cast<double>(n) * dt_;
    const double mass = l2_norm(phi.phi);
    if (!std::isfinite(mass)) throw NumericError("non-finite GP field at t = " + std::to_string(phi.time));
  }

 private:
  void nonlinear(FieldState& phi, double tau) {
    auto& v = phi.phi.values;
    for (std::size_t i = 0; i < v.size(); ++i) nonlinear_[i] = std::polar(1.0, -tau * b_ * std::norm(v[i]));
    simd::cmul(v, nonlinear_);
  }

  double b_;
  double dt_;
  FftPlan plan_;
  std::vector<cplx> kinetic_phase_;
  std::vector<cplx> nonlinear_;
};

void check_normalized(const FieldState& phi) {
  require(std::abs(l2_norm(phi.phi) - 1.0) <= 1e-10, "GP initial field must be normalized");
}

}  // namespace

FieldState solve_gp(const FieldState& phi0, double b, double duration, double dt) {
  check_normalized(phi0);
  require(dt > 0.0 && duration >= 0.0, "GP time step must be positive and duration nonnegative");
  FieldState phi = phi0;
  const double t_end = phi.time + duration;
  const long n = static_cast<long>(std::floor(duration / dt + 1e-9));
  GpStepper(phi, b, dt).steps(phi, n);
  const double rest = duration - static_cast<double>(n) * dt;
  if (rest > 1e-12 * dt) GpStepper(phi, b, rest).steps(phi, 1);
  phi.time = t_end;
  return phi;
}

void solve_gp_with_snapshots(FieldState& phi, double b, double duration, double dt, double snapshot_spacing,
                             const std::function<void(const FieldState&)>& observe) {
  check_normalized(phi);
  const long per_snap = std::lround(snapshot_spacing / dt);
  require(per_snap >= 1 && std::abs(per_snap * dt - snapshot_spacing) <= 1e-9 * snapshot_spacing,
          "snapshot spacing must be a whole number of time steps");
  const long snaps = std::lround(duration / snapshot_spacing);
  require(std::abs(snaps * snapshot_spacing - duration) <= 1e-9 * std::max(duration, 1.0),
          "duration must be a whole number of snapshot spacings");
  const double t0 = phi.time;
  GpStepper stepper(phi, b, dt);
  observe(phi);
  for (long s = 1; s <= snaps; ++s) {
    stepper.steps(phi, per_snap);
    phi.time = t0 + static_cast<double>(s) * snapshot_spacing;
    observe(phi);
  }
}

double gp_energy(const FieldState& phi, double b) {
  const auto c = transform(phi.phi, Direction::forward);
  const auto lap = laplacian_symbol(phi.grid());
  double kinetic = 0.0;
  for (std::size_t i = 0; i < lap.size(); ++i) kinetic += lap[i] * std::norm(c[i]);
  double quartic = 0.0;
  for (const auto& v : phi.phi.values) quartic += std::norm(v) * std::norm(v);
  return kinetic + 0.5 * b * quartic * phi.grid().cell_volume();
}

MarginalFamily factorized_family(const FieldState& phi, int k_max) {
  check_normalized(phi);
  MarginalFamily fam;
  fam.time = phi.time;
  for (int k = 1; k <= k_max; ++k) {
    auto g = tensor_projector(phi.phi, k);
    g.time = phi.time;
    fam.sectors.push_back(std::move(g));
  }
  return fam;
}

}  // namespace bosonlab
