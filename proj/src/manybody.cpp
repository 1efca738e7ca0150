#include "bosonlab/manybody.hpp"

#include <cmath>
#include <sstream>

#include "bosonlab/simd/kernels.hpp"

namespace bosonlab {

namespace {

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

double cell_weight(const ManyBodyState& psi) { return std::pow(psi.grid.cell_volume(), psi.particles); }

// Applies a per-site real symbol that is additive over particles:
// x[s_1..s_N] *= scale * sum_j symbol[s_j].
void multiply_additive_symbol(std::vector<cplx>& x, const std::vector<double>& symbol, int particles, double scale) {
  const std::size_t sites = symbol.size();
  const std::size_t outer = x.size() / sites;
  std::vector<std::size_t> digits(particles > 1 ? particles - 1 : 0, 0);
  std::vector<double> shifted(sites);
  for (std::size_t o = 0; o < outer; ++o) {
    double base = 0.0;
    for (std::size_t dgt : digits) base += symbol[dgt];
    for (std::size_t m = 0; m < sites; ++m) shifted[m] = base + symbol[m];
    simd::rmul_scaled(std::span<cplx>(x.data() + o * sites, sites), shifted, scale);
    for (int j = static_cast<int>(digits.size()) - 1; j >= 0; --j) {
      if (++digits[j] < sites) break;
      digits[j] = 0;
    }
  }
}

}  // namespace

FieldState default_initial_field(const Grid& grid, double amplitude) {
  GridFunction f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    f[i] = 1.0 + amplitude * std::cos(two_pi * grid.unflatten(i)[0] * grid.spacing());
  const double n = l2_norm(f);
  for (auto& v : f.values) v /= n;
  return {f, 0.0};
}

FieldState plane_wave_field(const Grid& grid, int k) {
  GridFunction f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    f[i] = std::polar(1.0, two_pi * k * grid.unflatten(i)[0] * grid.spacing());
  return {f, 0.0};
}

ManyBodyConfig ManyBodyConfig::with_epsilon(int d, int points_per_axis, int particles, double epsilon,
                                            PotentialProfile profile, double dt) {
  ManyBodyConfig cfg;
  cfg.d = d;
  cfg.points_per_axis = points_per_axis;
  cfg.particles = particles;
  cfg.range = std::pow(static_cast<double>(particles), -epsilon);
  cfg.profile = std::move(profile);
  cfg.dt = dt;
  return cfg;
}

std::size_t ManyBodyConfig::tensor_size() const {
  return ipow(ipow(static_cast<std::size_t>(points_per_axis), d), particles);
}

std::size_t ManyBodyConfig::propagation_bytes() const {
  // state + half-step phase (complex) + interaction field while building it.
  return tensor_size() * (2 * sizeof(cplx) + sizeof(double));
}

int ManyBodyConfig::largest_admissible_points() const {
  for (int m = 4096; m >= 8; m /= 2) {
    ManyBodyConfig c = *this;
    c.points_per_axis = m;
    const double log_bytes =
        std::log(static_cast<double>(2 * sizeof(cplx) + sizeof(double))) + particles * d * std::log(double(m));
    if (log_bytes > std::log(static_cast<double>(memory_budget))) continue;
    if (c.propagation_bytes() <= memory_budget && range * m >= 4.0) return m;
  }
  return 0;
}

void ManyBodyConfig::validate() const {
  const Grid g = grid();
  require(particles >= 2, "need at least two particles");
  require(dt > 0.0 && std::isfinite(dt), "time step must be positive");
  require(range > 0.0, "range a must be positive");
  profile.validate();
  require(range * points_per_axis >= 4.0, "under-resolved potential: a*M must be at least 4");
  require(range * profile.radius < 0.5, "scaled potential support a*R must stay below 1/2");
  const double log_elems = particles * d * std::log(double(points_per_axis));
  if (log_elems > std::log(1e15) || propagation_bytes() > memory_budget) {
    std::ostringstream msg;
    msg << "memory budget exceeded: (M^d)^N = " << points_per_axis << "^" << d * particles << " needs ~"
        << (log_elems > std::log(1e15) ? std::string("an astronomical amount") : std::to_string(propagation_bytes() >> 20) + " MiB")
        << ", budget " << (memory_budget >> 20) << " MiB";
    const int m = largest_admissible_points();
    if (m > 0)
      msg << "; largest admissible M for N=" << particles << " is " << m;
    else
      msg << "; no admissible M for N=" << particles;
    throw PreconditionError(msg.str());
  }
  (void)g;
}

std::vector<std::string> ManyBodyConfig::warnings(double epsilon) const {
  std::vector<std::string> out;
  if (!(epsilon > 0.0 && epsilon < 0.6))
    out.push_back("epsilon = " + std::to_string(epsilon) + " lies outside (0, 3/5)");
  return out;
}

ManyBodyState build_product_state(const FieldState& phi0, int particles) {
  require(particles >= 1, "need at least one particle");
  const double n = l2_norm(phi0.phi);
  require(std::abs(n - 1.0) <= 1e-10, "initial field must be normalized");
  ManyBodyState psi;
  psi.grid = phi0.grid();
  psi.particles = particles;
  psi.time = phi0.time;
  const std::size_t sites = psi.grid.size();
  psi.values.assign(1, cplx(1.0));
  for (int j = 0; j < particles; ++j) {
    std::vector<cplx> next(psi.values.size() * sites);
    for (std::size_t o = 0; o < psi.values.size(); ++o)
      for (std::size_t s = 0; s < sites; ++s) next[o * sites + s] = psi.values[o] * phi0.phi[s];
    psi.values = std::move(next);
  }
  return psi;
}

double norm(const ManyBodyState& psi) { return std::sqrt(simd::norm2(psi.values) * cell_weight(psi)); }

cplx inner(const ManyBodyState& phi, const ManyBodyState& psi) {
  require(phi.grid == psi.grid && phi.particles == psi.particles, "state shape mismatch");
  return simd::cdot(phi.values, psi.values) * cell_weight(psi);
}

double symmetry_residual(const ManyBodyState& psi) {
  const std::size_t sites = psi.sites();
  const int n = psi.particles;
  std::vector<std::size_t> stride(n);
  for (int j = 0; j < n; ++j) stride[j] = ipow(sites, n - 1 - j);
  const double total = simd::norm2(psi.values);
  if (total == 0.0) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t idx = 0; idx < psi.values.size(); ++idx) {
        const std::size_t si = (idx / stride[i]) % sites;
        const std::size_t sj = (idx / stride[j]) % sites;
        const std::size_t swapped = idx + (sj - si) * stride[i] + (si - sj) * stride[j];
        acc += std::norm(psi.values[idx] - psi.values[swapped]);
      }
      worst = std::max(worst, std::sqrt(acc / total));
    }
  }
  return worst;
}

std::vector<double> interaction_field(const ManyBodyConfig& cfg) {
  const Grid grid = cfg.grid();
  const auto va = sample_scaled_real(cfg.scaled_potential(), grid);
  const SiteDifference diff(grid);
  const std::size_t sites = grid.size();
  const int n = cfg.particles;
  std::vector<double> w(cfg.tensor_size(), 0.0);
  std::vector<std::size_t> digits(n, 0);
  const double coupling = 1.0 / n;
  for (std::size_t idx = 0; idx < w.size(); ++idx) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += va[diff(digits[i], digits[j])];
    w[idx] = coupling * s;
    for (int j = n - 1; j >= 0; --j) {
      if (++digits[j] < sites) break;
      digits[j] = 0;
    }
  }
  return w;
}

ManyBodyState apply_hamiltonian(const ManyBodyState& psi, const ManyBodyConfig& cfg) {
  require(psi.grid == cfg.grid() && psi.particles == cfg.particles, "state does not match configuration");
  ManyBodyState out = psi;
  const TensorFft plan(cfg.d * cfg.particles, cfg.points_per_axis);
  plan.forward(out.values.data());
  multiply_additive_symbol(out.values, laplacian_symbol(psi.grid), psi.particles,
                           1.0 / static_cast<double>(out.values.size()));
  plan.backward(out.values.data());
  const auto w = interaction_field(cfg);
  simd::raxpy(out.values, w, psi.values);
  return out;
}

std::vector<double> energy_moments(const ManyBodyState& psi, const ManyBodyConfig& cfg, int k_max) {
  require(k_max >= 0 && k_max <= 3, "energy moments are limited to k <= 3");
  const std::size_t need = cfg.tensor_size() * (3 * sizeof(cplx) + sizeof(double));
  require(need <= cfg.memory_budget, "energy moments exceed the memory budget");
  std::vector<double> out{inner(psi, psi).real()};
  if (k_max == 0) return out;
  const auto h1 = apply_hamiltonian(psi, cfg);
  out.push_back(inner(psi, h1).real());
  if (k_max == 1) return out;
  out.push_back(inner(h1, h1).real());
  if (k_max == 2) return out;
  const auto h2 = apply_hamiltonian(h1, cfg);
  out.push_back(inner(h1, h2).real());
  return out;
}

Propagator::Propagator(const ManyBodyConfig& cfg, ManyBodyState& psi)
    : cfg_(cfg),
      plan_(cfg.d * cfg.particles, cfg.points_per_axis) {
  cfg_.validate();
  require(psi.grid == cfg.grid() && psi.particles == cfg.particles, "state does not match configuration");
  auto w = interaction_field(cfg_);
  half_phase_.resize(w.size());
  const double tau = 0.5 * cfg_.dt;
  for (std::size_t i = 0; i < w.size(); ++i) half_phase_[i] = std::polar(1.0, -tau * w[i]);
}

void Propagator::kinetic(ManyBodyState& psi, double tau) {
  const Grid& grid = psi.grid;
  const auto lap = laplacian_symbol(grid);
  const std::size_t sites = grid.size();
  std::vector<cplx> p1(sites);
  for (std::size_t m = 0; m < sites; ++m) p1[m] = std::polar(1.0, -tau * lap[m]);
  plan_.forward(psi.values.data());
  const std::size_t outer = psi.values.size() / sites;
  const double normalization = 1.0 / static_cast<double>(psi.values.size());
  std::vector<std::size_t> digits(psi.particles - 1, 0);
  for (std::size_t o = 0; o < outer; ++o) {
    cplx s = normalization;
    for (std::size_t dgt : digits) s *= p1[dgt];
    simd::cmul_scaled(std::span<cplx>(psi.values.data() + o * sites, sites), p1, s);
    for (int j = static_cast<int>(digits.size()) - 1; j >= 0; --j) {
      if (++digits[j] < sites) break;
      digits[j] = 0;
    }
  }
  plan_.backward(psi.values.data());
}

void Propagator::half_interaction(ManyBodyState& psi) { simd::cmul(psi.values, half_phase_); }

void Propagator::check_finite(const ManyBodyState& psi) const {
  const double n = norm(psi);
  if (!std::isfinite(n))
    throw NumericError("non-finite wave function at t = " + std::to_string(psi.time));
}

void Propagator::advance_steps(ManyBodyState& psi, long steps) {
  if (steps <= 0) return;
  half_interaction(psi);
  for (long s = 0; s < steps; ++s) {
    kinetic(psi, cfg_.dt);
    half_interaction(psi);
    if (s + 1 < steps) half_interaction(psi);
  }
  psi.time += static_cast<double>(steps) * cfg_.dt;
  check_finite(psi);
}

void Propagator::advance(ManyBodyState& psi, double duration) {
  require(duration >= 0.0, "duration must be nonnegative");
  const long steps = static_cast<long>(std::floor(duration / cfg_.dt + 1e-9));
  const double t_end = psi.time + duration;
  advance_steps(psi, steps);
  const double rest = duration - static_cast<double>(steps) * cfg_.dt;
  if (rest > 1e-12 * cfg_.dt) {
    ManyBodyConfig partial = cfg_;
    partial.dt = rest;
    Propagator(partial, psi).advance_steps(psi, 1);
  }
  psi.time = t_end;
}

ManyBodyState propagate(ManyBodyState psi, const ManyBodyConfig& cfg, double duration) {
  Propagator prop(cfg, psi);
  prop.advance(psi, duration);
  return psi;
}

void propagate_with_snapshots(ManyBodyState& psi, const ManyBodyConfig& cfg, double duration,
                              double snapshot_spacing, const std::function<void(const ManyBodyState&)>& observe) {
  require(snapshot_spacing > 0.0, "snapshot spacing must be positive");
  const long per_snap = std::lround(snapshot_spacing / cfg.dt);
  require(per_snap >= 1 && std::abs(per_snap * cfg.dt - snapshot_spacing) <= 1e-9 * snapshot_spacing,
          "snapshot spacing must be a whole number of time steps");
  const long snaps = std::lround(duration / snapshot_spacing);
  require(std::abs(snaps * snapshot_spacing - duration) <= 1e-9 * std::max(duration, 1.0),
          "duration must be a whole number of snapshot spacings");
  const double t0 = psi.time;
  Propagator prop(cfg, psi);
  observe(psi);
  for (long s = 1; s <= snaps; ++s) {
    prop.advance_steps(psi, per_snap);
    psi.time = t0 + static_cast<double>(s) * snapshot_spacing;
    observe(psi);
  }
}

}  // namespace bosonlab
