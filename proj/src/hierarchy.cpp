#include "bosonlab/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bosonlab {

namespace {

constexpr cplx I{0.0, 1.0};

// W(x_k) = sum_{j < l} V(x_j - x_l) over the k-particle grid.
Eigen::VectorXd pair_field(const std::vector<double>& potential, const Grid& grid, int k) {
  const std::size_t sites = grid.size();
  std::size_t n = 1;
  for (int i = 0; i < k; ++i) n *= sites;
  const SiteDifference diff(grid);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::vector<std::size_t> digits(static_cast<std::size_t>(k), 0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    double s = 0.0;
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b) s += potential[diff(digits[a], digits[b])];
    w(static_cast<Eigen::Index>(idx)) = s;
    for (int j = k - 1; j >= 0; --j) {
      if (++digits[j] < sites) break;
      digits[j] = 0;
    }
  }
  return w;
}

// (unprimed - primed) contraction for every variable v = 1..k; independent of J.
std::vector<KernelMatrix> collision_kernels(const DensityMatrixK& upper, const std::optional<std::vector<double>>& diagonal,
                                            const std::optional<std::vector<double>>& pair) {
  std::vector<KernelMatrix> out;
  for (int v = 1; v < upper.k; ++v)
    out.push_back(contract_extra(upper, v, false, diagonal, pair) - contract_extra(upper, v, true, diagonal, pair));
  return out;
}

cplx collision(const TestKernel& j, const std::vector<KernelMatrix>& kernels, const Grid& grid) {
  cplx s = 0.0;
  for (const auto& c : kernels) s += pairing(j, c, grid);
  return s;
}

struct CollisionSet {
  std::vector<KernelMatrix> v, sharp, reg;
};

double sup_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

// d/dx_1 of a grid function, spectrally.
GridFunction first_derivative(const GridFunction& f) {
  auto c = transform(f, Direction::forward);
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    const int m = f.grid.mode(f.grid.unflatten(i)[0]);
    c.values[i] *= cplx(0.0, two_pi * m);
  }
  return transform(c, Direction::inverse);
}

}  // namespace

double SnapshotTrajectory::spacing() const {
  return snapshots.size() < 2 ? 0.0 : snapshots[1].time - snapshots[0].time;
}

SnapshotTrajectory SnapshotTrajectory::subsampled(int stride) const {
  require(stride >= 1 && !snapshots.empty() && (snapshots.size() - 1) % static_cast<std::size_t>(stride) == 0,
          "stride must divide the number of snapshot intervals");
  SnapshotTrajectory out;
  out.provenance = provenance;
  for (std::size_t i = 0; i < snapshots.size(); i += static_cast<std::size_t>(stride)) out.snapshots.push_back(snapshots[i]);
  return out;
}

void SnapshotTrajectory::validate() const {
  require(snapshots.size() >= 2, "trajectory needs at least two snapshots");
  const double h = spacing();
  require(h > 0.0, "snapshot times must increase");
  const auto& first = snapshots.front();
  require(first.k_max() >= 1, "snapshots must hold at least one sector");
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const auto& s = snapshots[i];
    require(s.k_max() == first.k_max(), "all snapshots must hold the same sectors");
    require(s.sectors.front().grid == first.sectors.front().grid, "all snapshots must share one grid");
    const double expected = first.time + static_cast<double>(i) * h;
    require(std::abs(s.time - expected) <= 1e-9 * std::max(1.0, std::abs(expected)), "snapshot spacing must be uniform");
  }
}

SnapshotTrajectory simulate_trajectory(const ManyBodyConfig& cfg, const FieldState& phi0, double duration,
                                       double snapshot_spacing, int k_max) {
  cfg.validate();
  require(k_max >= 1 && k_max <= cfg.particles, "k_max must satisfy 1 <= k_max <= N");
  SnapshotTrajectory traj;
  traj.provenance = Provenance::simulation;
  ManyBodyState psi = build_product_state(phi0, cfg.particles);
  propagate_with_snapshots(psi, cfg, duration, snapshot_spacing,
                           [&](const ManyBodyState& s) { traj.snapshots.push_back(reduce_family(s, k_max)); });
  return traj;
}

SnapshotTrajectory gp_trajectory(const FieldState& phi0, double b, double duration, double dt,
                                 double snapshot_spacing, int k_max) {
  SnapshotTrajectory traj;
  traj.provenance = Provenance::factorized_gp;
  FieldState phi = phi0;
  solve_gp_with_snapshots(phi, b, duration, dt, snapshot_spacing,
                          [&](const FieldState& f) { traj.snapshots.push_back(factorized_family(f, k_max)); });
  return traj;
}

std::vector<HierarchyTerms> evaluate_terms(const MarginalFamily& family, const std::vector<TestKernel>& kernels,
                                           const TermOptions& options) {
  const bool needs_upper = options.potential || options.sharp || options.beta;
  if (options.beta) require(options.eta.has_value(), "regularized collision needs both beta and eta");
  std::map<int, CollisionSet> cache;
  std::vector<HierarchyTerms> out;
  out.reserve(kernels.size());
  for (const auto& j : kernels) {
    require(j.k >= 1 && j.k <= family.k_max(), "test kernel sector is not stored in the family");
    const auto& gamma = family.sector(j.k);
    const Grid& grid = gamma.grid;
    HierarchyTerms t;
    t.time = family.time;
    t.pairing = pairing(j, gamma);

    for (int v = 0; v < j.k; ++v) {
      TestKernel left = j;
      left.left[static_cast<std::size_t>(v)] = apply_neg_laplacian(j.left[static_cast<std::size_t>(v)]);
      TestKernel right = j;
      right.right[static_cast<std::size_t>(v)] = apply_neg_laplacian(j.right[static_cast<std::size_t>(v)]);
      t.kinetic += pairing(left, gamma) - pairing(right, gamma);
    }

    if (options.potential && j.k >= 2) {
      const Eigen::VectorXd w = pair_field(*options.potential, grid, j.k);
      const Eigen::VectorXcd g = kron(j.left);
      const Eigen::VectorXcd gp = kron(j.right);
      const Eigen::VectorXcd wg = w.cast<cplx>().cwiseProduct(g);
      const Eigen::VectorXcd wgp = w.cast<cplx>().cwiseProduct(gp);
      const double weight = std::pow(grid.cell_volume(), 2 * j.k);
      t.intra = weight * (wg.dot(gamma.kernel * gp) - g.dot(gamma.kernel * wgp));
    }

    if (needs_upper) {
      require(family.k_max() >= j.k + 1, "collision terms need sector k+1");
      const auto& upper = family.sector(j.k + 1);
      auto [it, fresh] = cache.try_emplace(j.k);
      auto& c = it->second;
      if (fresh) {
        if (options.potential) c.v = collision_kernels(upper, std::nullopt, *options.potential);
        if (options.sharp) c.sharp = collision_kernels(upper, std::nullopt, std::nullopt);
        if (options.beta) {
          const auto delta_beta = sample_mollifier_real({*options.beta, grid.dim()}, grid);
          const auto delta_eta = sample_mollifier_real({*options.eta, grid.dim()}, grid);
          c.reg = collision_kernels(upper, delta_eta, delta_beta);
        }
      }
      t.collision_v = collision(j, c.v, grid);
      t.collision_sharp = collision(j, c.sharp, grid);
      t.collision_reg = collision(j, c.reg, grid);
    }
    out.push_back(t);
  }
  return out;
}

HierarchyTerms evaluate_terms(const MarginalFamily& family, const TestKernel& j, const TermOptions& options) {
  return evaluate_terms(family, std::vector<TestKernel>{j}, options).front();
}

namespace {

// sum conj(a) b, without the cell volume.
cplx raw_dot(const GridFunction& a, const GridFunction& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::conj(a.values[i]) * b.values[i];
  return s;
}

// For g^(k+1) = |phi^(x)k+1><phi^(x)k+1| the contraction on variable v is
// Phi(x) conj Phi(x') F(x_v) (unprimed) or Phi(x) conj Phi(x') F(x'_v) (primed).
std::vector<cplx> contraction_profile(const GridFunction& phi, bool primed,
                                      const std::optional<std::vector<double>>& diagonal,
                                      const std::optional<std::vector<double>>& pair) {
  const Grid& grid = phi.grid;
  const std::size_t n1 = grid.size();
  const double vol = grid.cell_volume();
  const SiteDifference diff(grid);
  std::vector<cplx> f(n1);
  for (std::size_t y = 0; y < n1; ++y) {
    if (!diagonal) {
      f[y] = std::norm(phi.values[y]);
      continue;
    }
    cplx s = 0.0;
    for (std::size_t o = 0; o < n1; ++o) {
      const double dval = (*diagonal)[diff(o, y)];
      if (dval != 0.0) s += dval * (primed ? phi.values[o] : std::conj(phi.values[o]));
    }
    f[y] = vol * s * (primed ? std::conj(phi.values[y]) : phi.values[y]);
  }
  if (!pair) return f;
  std::vector<cplx> out(n1);
  for (std::size_t z = 0; z < n1; ++z) {
    cplx s = 0.0;
    for (std::size_t y = 0; y < n1; ++y) {
      const double pval = (*pair)[diff(y, z)];
      if (pval != 0.0) s += pval * f[y];
    }
    out[z] = vol * s;
  }
  return out;
}

struct FactorizedProfiles {
  std::vector<cplx> unprimed, primed;
};

FactorizedProfiles profiles(const GridFunction& phi, const std::optional<std::vector<double>>& diagonal,
                            const std::optional<std::vector<double>>& pair) {
  return {contraction_profile(phi, false, diagonal, pair), contraction_profile(phi, true, diagonal, pair)};
}

cplx product_except(const std::vector<cplx>& v, std::size_t skip) {
  cplx p = 1.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (i != skip) p *= v[i];
  return p;
}

cplx factorized_collision(const TestKernel& j, const GridFunction& phi, const std::vector<cplx>& a,
                          const std::vector<cplx>& b, const FactorizedProfiles& f) {
  const std::size_t none = a.size();
  cplx s = 0.0;
  for (std::size_t v = 0; v < a.size(); ++v) {
    cplx zu = 0.0;
    cplx zp = 0.0;
    for (std::size_t z = 0; z < phi.values.size(); ++z) {
      zu += std::conj(j.left[v].values[z]) * phi.values[z] * f.unprimed[z];
      zp += std::conj(phi.values[z]) * j.right[v].values[z] * f.primed[z];
    }
    s += product_except(a, v) * zu * product_except(b, none) - product_except(a, none) * product_except(b, v) * zp;
  }
  return s;
}

}  // namespace

std::vector<HierarchyTerms> evaluate_terms_factorized(const FieldState& phi, const std::vector<TestKernel>& kernels,
                                                      const TermOptions& options) {
  if (options.beta) require(options.eta.has_value(), "regularized collision needs both beta and eta");
  const Grid& grid = phi.grid();
  std::optional<FactorizedProfiles> pv, ps, pr;
  if (options.potential) pv = profiles(phi.phi, std::nullopt, *options.potential);
  if (options.sharp) ps = profiles(phi.phi, std::nullopt, std::nullopt);
  if (options.beta) {
    const auto delta_beta = sample_mollifier_real({*options.beta, grid.dim()}, grid);
    const auto delta_eta = sample_mollifier_real({*options.eta, grid.dim()}, grid);
    pr = profiles(phi.phi, delta_eta, delta_beta);
  }
  std::vector<HierarchyTerms> out;
  out.reserve(kernels.size());
  for (const auto& j : kernels) {
    require(j.k >= 1 && j.left.front().grid == grid, "test kernel does not live on the field's grid");
    const auto k = static_cast<std::size_t>(j.k);
    const double weight = std::pow(grid.cell_volume(), 2 * j.k);
    std::vector<cplx> a(k), b(k);
    for (std::size_t v = 0; v < k; ++v) {
      a[v] = raw_dot(j.left[v], phi.phi);
      b[v] = raw_dot(phi.phi, j.right[v]);
    }
    const cplx pa = product_except(a, k);
    const cplx pb = product_except(b, k);
    HierarchyTerms t;
    t.time = phi.time;
    t.pairing = weight * pa * pb;
    for (std::size_t v = 0; v < k; ++v) {
      const cplx la = raw_dot(apply_neg_laplacian(j.left[v]), phi.phi);
      const cplx rb = raw_dot(phi.phi, apply_neg_laplacian(j.right[v]));
      t.kinetic += weight * (la * product_except(a, v) * pb - pa * rb * product_except(b, v));
    }
    if (options.potential && j.k >= 2) {
      const Eigen::VectorXd w = pair_field(*options.potential, grid, j.k);
      const Eigen::VectorXcd big = kron(std::vector<GridFunction>(k, phi.phi));
      const Eigen::VectorXcd g = kron(j.left);
      const Eigen::VectorXcd gp = kron(j.right);
      const Eigen::VectorXcd wg = w.cast<cplx>().cwiseProduct(g);
      const Eigen::VectorXcd wgp = w.cast<cplx>().cwiseProduct(gp);
      t.intra = weight * (wg.dot(big) * big.dot(gp) - g.dot(big) * big.dot(wgp));
    }
    if (pv) t.collision_v = weight * factorized_collision(j, phi.phi, a, b, *pv);
    if (ps) t.collision_sharp = weight * factorized_collision(j, phi.phi, a, b, *ps);
    if (pr) t.collision_reg = weight * factorized_collision(j, phi.phi, a, b, *pr);
    out.push_back(t);
  }
  return out;
}

double ResidualReport::max_term() const {
  return std::max({std::abs(parts.datum), std::abs(parts.kinetic), std::abs(parts.intra), std::abs(parts.collision)});
}

cplx trapezoid(const std::vector<HierarchyTerms>& terms, cplx HierarchyTerms::*field) {
  if (terms.size() < 2) return 0.0;
  const double h = terms[1].time - terms[0].time;
  cplx s = 0.5 * (terms.front().*field + terms.back().*field);
  for (std::size_t i = 1; i + 1 < terms.size(); ++i) s += terms[i].*field;
  return h * s;
}

ResidualReport assemble_bbgky(const std::vector<HierarchyTerms>& terms, int k, int particles) {
  require(!terms.empty(), "residual needs at least one snapshot");
  ResidualReport r;
  r.k = k;
  if (terms.size() >= 2) r.snapshot_spacing = terms[1].time - terms[0].time;
  const double n = particles;
  r.parts.datum = terms.back().pairing - terms.front().pairing;
  r.parts.kinetic = I * trapezoid(terms, &HierarchyTerms::kinetic);
  r.parts.intra = (I / n) * trapezoid(terms, &HierarchyTerms::intra);
  r.parts.collision = I * (1.0 - k / n) * trapezoid(terms, &HierarchyTerms::collision_v);
  r.residual = r.parts.datum + r.parts.kinetic + r.parts.intra + r.parts.collision;
  return r;
}

ResidualReport assemble_gp(const std::vector<HierarchyTerms>& terms, int k, double b, double beta, double eta) {
  require(!terms.empty(), "residual needs at least one snapshot");
  ResidualReport r;
  r.k = k;
  r.beta = beta;
  r.eta = eta;
  if (terms.size() >= 2) r.snapshot_spacing = terms[1].time - terms[0].time;
  r.parts.datum = terms.back().pairing - terms.front().pairing;
  r.parts.kinetic = I * trapezoid(terms, &HierarchyTerms::kinetic);
  r.parts.collision = I * b * trapezoid(terms, &HierarchyTerms::collision_reg);
  r.residual = r.parts.datum + r.parts.kinetic + r.parts.intra + r.parts.collision;
  return r;
}

ResidualReport bbgky_residual(const SnapshotTrajectory& traj, const TestKernel& j, const ManyBodyConfig& cfg) {
  traj.validate();
  require(traj.snapshots.front().k_max() >= j.k + 1, "BBGKY residual needs sectors k and k+1");
  const Grid grid = traj.snapshots.front().sectors.front().grid;
  require(grid == cfg.grid(), "trajectory grid differs from the configuration");
  TermOptions opt;
  opt.potential = sample_scaled_real(cfg.scaled_potential(), grid);
  std::vector<HierarchyTerms> terms;
  terms.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) terms.push_back(evaluate_terms(s, j, opt));
  return assemble_bbgky(terms, j.k, cfg.particles);
}

ResidualReport gp_residual(const SnapshotTrajectory& traj, const TestKernel& j, double b, double beta, double eta) {
  traj.validate();
  require(traj.snapshots.front().k_max() >= j.k + 1, "GP residual needs sectors k and k+1");
  TermOptions opt;
  opt.beta = beta;
  opt.eta = eta;
  std::vector<HierarchyTerms> terms;
  terms.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) terms.push_back(evaluate_terms(s, j, opt));
  return assemble_gp(terms, j.k, b, beta, eta);
}

std::vector<ResidualReport> gp_residuals_streamed(const FieldState& phi0, double b_dynamics, double b_identity,
                                                  double duration, double dt, double snapshot_spacing,
                                                  const std::vector<TestKernel>& kernels, double beta, double eta) {
  TermOptions opt;
  opt.beta = beta;
  opt.eta = eta;
  std::vector<std::vector<HierarchyTerms>> terms(kernels.size());
  FieldState phi = phi0;
  solve_gp_with_snapshots(phi, b_dynamics, duration, dt, snapshot_spacing, [&](const FieldState& f) {
    const auto t = evaluate_terms_factorized(f, kernels, opt);
    for (std::size_t i = 0; i < kernels.size(); ++i) terms[i].push_back(t[i]);
  });
  std::vector<ResidualReport> out;
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    auto r = assemble_gp(terms[i], kernels[i].k, b_identity, beta, eta);
    r.kernel_id = static_cast<int>(i);
    out.push_back(r);
  }
  return out;
}

double kernel_w1inf_norm(const TestKernel& j, int variable) {
  require(variable >= 1 && variable <= j.k, "derivative variable out of range");
  double sup = 1.0;
  double grad = 1.0;
  for (int v = 0; v < j.k; ++v) {
    const auto& g = j.left[static_cast<std::size_t>(v)];
    const double s = sup_abs(g.values);
    sup *= s;
    grad *= v + 1 == variable ? sup_abs(first_derivative(g).values) : s;
    const double sp = sup_abs(j.right[static_cast<std::size_t>(v)].values);
    sup *= sp;
    grad *= sp;
  }
  return sup + grad;
}

SobsobCheck sobsob_bound_check(const TestKernel& j, const DensityMatrixK& upper, int variable, double beta1,
                               double beta2) {
  require(upper.k == j.k + 1, "sobsob check needs a sector k+1 kernel");
  const Grid& grid = upper.grid;
  const auto d1 = sample_mollifier_real({beta1, grid.dim()}, grid);
  const auto d2 = sample_mollifier_real({beta2, grid.dim()}, grid);
  const KernelMatrix diff =
      contract_extra(upper, variable, false, d1, d2) - contract_extra(upper, variable, false, std::nullopt, std::nullopt);
  SobsobCheck c;
  c.lhs = std::abs(pairing(j, diff, grid));
  c.rhs = kernel_w1inf_norm(j, variable) * (beta1 + std::sqrt(beta2)) *
          sobolev_trace_norm(upper, {variable, upper.k});
  return c;
}

GapReport assemble_gap(const std::vector<HierarchyTerms>& terms, int k, const ManyBodyConfig& cfg, double b,
                       double beta, double sup_sobolev2) {
  require(!terms.empty(), "gap needs at least one snapshot");
  const double n = cfg.particles;
  const cplx cv = trapezoid(terms, &HierarchyTerms::collision_v);
  const cplx cs = trapezoid(terms, &HierarchyTerms::collision_sharp);
  const cplx cr = trapezoid(terms, &HierarchyTerms::collision_reg);
  const cplx in = trapezoid(terms, &HierarchyTerms::intra);
  GapReport g;
  g.gap_range = I * (cv - b * cs);
  g.gap_finite_n = I * (-(k / n) * cv + in / n);
  g.gap_beta = I * b * (cr - cs);
  g.gap = g.gap_range + g.gap_finite_n - g.gap_beta;
  g.sup_sobolev2 = sup_sobolev2;
  const double t = terms.back().time - terms.front().time;
  const double sa = std::sqrt(cfg.range);
  g.envelope = t * (k * std::sqrt(beta) + k * sa + k * k / (n * sa)) * sup_sobolev2;
  return g;
}

GapReport bbgky_vs_gp_gap(const SnapshotTrajectory& traj, const TestKernel& j, const ManyBodyConfig& cfg, double b,
                          double beta, double eta, std::optional<double> sup_sobolev2) {
  traj.validate();
  require(traj.snapshots.front().k_max() >= std::max(2, j.k + 1), "gap needs sectors k+1 and 2");
  const Grid grid = traj.snapshots.front().sectors.front().grid;
  require(grid == cfg.grid(), "trajectory grid differs from the configuration");
  TermOptions opt;
  opt.potential = sample_scaled_real(cfg.scaled_potential(), grid);
  opt.sharp = true;
  opt.beta = beta;
  opt.eta = eta;
  std::vector<HierarchyTerms> terms;
  double sup = 0.0;
  for (const auto& s : traj.snapshots) {
    terms.push_back(evaluate_terms(s, j, opt));
    if (!sup_sobolev2) sup = std::max(sup, sobolev_trace_norm(s.sector(2)));
  }
  return assemble_gap(terms, j.k, cfg, b, beta, sup_sobolev2.value_or(sup));
}

}  // namespace bosonlab
