#include "bosonlab/marginals.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "bosonlab/simd/kernels.hpp"

namespace bosonlab {

namespace {

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Site of 1-based variable v inside a k-particle flat index.
std::size_t site_of(std::size_t index, int v, int k, std::size_t sites) {
  return (index / ipow(sites, k - v)) % sites;
}

// Unitary DFT on every variable of both kernel indices: F X F^*.
KernelMatrix to_momentum(const KernelMatrix& x, const Grid& grid, int k) {
  KernelMatrix y = x;
  const auto n = static_cast<int>(y.rows());
  const std::vector<int> dims(static_cast<std::size_t>(grid.dim() * k), grid.points_per_axis());
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  FftPlan columns(dims, y.data(), n, 1, n);
  columns.forward(y.data());
  y *= scale;
  KernelMatrix z = y.adjoint();
  columns.forward(z.data());
  z *= scale;
  return z.adjoint();
}

double sum_abs_eigenvalues(const KernelMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<KernelMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace

Eigen::VectorXcd kron(const std::vector<GridFunction>& factors) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Ones(1);
  for (const auto& f : factors) {
    Eigen::VectorXcd next(out.size() * static_cast<Eigen::Index>(f.values.size()));
    const auto n1 = static_cast<Eigen::Index>(f.values.size());
    for (Eigen::Index o = 0; o < out.size(); ++o)
      for (Eigen::Index s = 0; s < n1; ++s) next(o * n1 + s) = out(o) * f.values[static_cast<std::size_t>(s)];
    out = std::move(next);
  }
  return out;
}

double DensityMatrixK::weight() const { return std::pow(grid.cell_volume(), k); }

const DensityMatrixK& MarginalFamily::sector(int k) const {
  require(k >= 1 && k <= k_max(), "marginal family does not hold sector " + std::to_string(k));
  return sectors[static_cast<std::size_t>(k - 1)];
}

DensityMatrixK reduce(const ManyBodyState& psi, int k) {
  require(k >= 1 && k <= psi.particles, "marginal sector must satisfy 1 <= k <= N");
  const std::size_t rows = ipow(psi.sites(), k);
  require(rows * rows * sizeof(cplx) <= default_memory_budget, "marginal kernel exceeds the memory budget");
  const std::size_t cols = psi.values.size() / rows;
  DensityMatrixK out;
  out.grid = psi.grid;
  out.k = k;
  out.time = psi.time;
  const double w = std::pow(psi.grid.cell_volume(), psi.particles - k);
  out.kernel.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
  simd::kernels().gram(psi.values.data(), rows, cols, w, out.kernel.data());
  return out;
}

MarginalFamily reduce_family(const ManyBodyState& psi, int k_max) {
  MarginalFamily fam;
  fam.time = psi.time;
  for (int k = 1; k <= k_max; ++k) fam.sectors.push_back(reduce(psi, k));
  return fam;
}

DensityMatrixK tensor_projector(const GridFunction& phi, int k) {
  require(k >= 1, "sector must be positive");
  const Eigen::VectorXcd g = kron(std::vector<GridFunction>(static_cast<std::size_t>(k), phi));
  DensityMatrixK out;
  out.grid = phi.grid;
  out.k = k;
  out.kernel = g * g.adjoint();
  return out;
}

DensityMatrixK partial_trace_last(const DensityMatrixK& gamma) {
  require(gamma.k >= 2, "partial trace needs k >= 2");
  const auto n1 = static_cast<Eigen::Index>(gamma.grid.size());
  const Eigen::Index nk = gamma.kernel.rows() / n1;
  DensityMatrixK out;
  out.grid = gamma.grid;
  out.k = gamma.k - 1;
  out.time = gamma.time;
  out.kernel = KernelMatrix::Zero(nk, nk);
  for (Eigen::Index xp = 0; xp < nk; ++xp)
    for (Eigen::Index x = 0; x < nk; ++x) {
      cplx s = 0.0;
      for (Eigen::Index y = 0; y < n1; ++y) s += gamma.kernel(x * n1 + y, xp * n1 + y);
      out.kernel(x, xp) = s * gamma.grid.cell_volume();
    }
  return out;
}

double trace(const DensityMatrixK& gamma) { return gamma.kernel.diagonal().real().sum() * gamma.weight(); }

double hs_norm(const DensityMatrixK& gamma) { return gamma.kernel.norm() * gamma.weight(); }

Eigen::VectorXd eigenvalues(const DensityMatrixK& gamma) {
  const KernelMatrix h = 0.5 * gamma.weight() * (gamma.kernel + gamma.kernel.adjoint());
  Eigen::SelfAdjointEigenSolver<KernelMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

DensityInvariants check_invariants(const DensityMatrixK& gamma) {
  DensityInvariants inv;
  const double scale = gamma.kernel.cwiseAbs().maxCoeff();
  if (scale > 0.0) inv.hermiticity = (gamma.kernel - gamma.kernel.adjoint()).cwiseAbs().maxCoeff() / scale;
  const auto ev = eigenvalues(gamma);
  const double opnorm = ev.cwiseAbs().maxCoeff();
  if (opnorm > 0.0) inv.min_eigenvalue = ev.minCoeff() / opnorm;
  inv.trace_error = std::abs(trace(gamma) - 1.0);
  if (gamma.k >= 2 && scale > 0.0) {
    const std::size_t sites = gamma.grid.size();
    const auto n = static_cast<std::size_t>(gamma.kernel.rows());
    const std::size_t s1 = ipow(sites, gamma.k - 1);
    const std::size_t s2 = ipow(sites, gamma.k - 2);
    auto swap12 = [&](std::size_t idx) {
      const std::size_t a = (idx / s1) % sites;
      const std::size_t b = (idx / s2) % sites;
      return idx + (b - a) * s1 + (a - b) * s2;
    };
    double worst = 0.0;
    for (std::size_t xp = 0; xp < n; ++xp)
      for (std::size_t x = 0; x < n; ++x)
        worst = std::max(worst, std::abs(gamma.kernel(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(xp)) -
                                         gamma.kernel(static_cast<Eigen::Index>(swap12(x)),
                                                      static_cast<Eigen::Index>(swap12(xp)))));
    inv.bosonic = worst / scale;
  }
  return inv;
}

double compatibility_error(const DensityMatrixK& lower, const DensityMatrixK& upper) {
  require(upper.k == lower.k + 1 && upper.grid == lower.grid, "compatibility needs sectors k and k+1");
  DensityMatrixK diff = partial_trace_last(upper);
  diff.kernel -= lower.kernel;
  return hs_norm(diff);
}

double trace_distance(const DensityMatrixK& gamma, const DensityMatrixK& sigma) {
  require(gamma.grid == sigma.grid && gamma.k == sigma.k, "trace distance needs matching grid and sector");
  const KernelMatrix d = gamma.weight() * (gamma.kernel - sigma.kernel);
  return 0.5 * sum_abs_eigenvalues(0.5 * (d + d.adjoint()));
}

double sobolev_trace_norm(const DensityMatrixK& gamma, const std::vector<int>& variables) {
  for (int v : variables) require(v >= 1 && v <= gamma.k, "Sobolev weight on a nonexistent variable");
  KernelMatrix p = to_momentum(gamma.weight() * gamma.kernel, gamma.grid, gamma.k);
  const auto s1 = sobolev_symbol(gamma.grid);
  const std::size_t sites = gamma.grid.size();
  const auto n = static_cast<std::size_t>(p.rows());
  Eigen::VectorXd mult(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double m = 1.0;
    for (int v : variables) m *= s1[site_of(i, v, gamma.k, sites)];
    mult(static_cast<Eigen::Index>(i)) = m;
  }
  p = mult.asDiagonal() * p * mult.asDiagonal();
  return sum_abs_eigenvalues(0.5 * (p + p.adjoint()));
}

double sobolev_trace_norm(const DensityMatrixK& gamma) {
  std::vector<int> all(static_cast<std::size_t>(gamma.k));
  for (int v = 1; v <= gamma.k; ++v) all[static_cast<std::size_t>(v - 1)] = v;
  return sobolev_trace_norm(gamma, all);
}

cplx pairing(const TestKernel& j, const KernelMatrix& kernel, const Grid& grid) {
  const Eigen::VectorXcd g = kron(j.left);
  const Eigen::VectorXcd gp = kron(j.right);
  require(g.size() == kernel.rows() && gp.size() == kernel.cols(), "test kernel sector differs from kernel sector");
  const double w = std::pow(grid.cell_volume(), 2 * j.k);
  return w * g.dot(kernel * gp);  // Eigen's dot conjugates the first argument
}

double hminus_norm(const MarginalFamily& family) {
  double s = 0.0;
  for (const auto& g : family.sectors) s += std::ldexp(hs_norm(g), -g.k);
  return s;
}

double rho_metric(const MarginalFamily& a, const MarginalFamily& b, const std::vector<TestKernel>& family) {
  require(a.k_max() == b.k_max(), "rho metric needs families with the same truncation");
  double s = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& j = family[i];
    if (j.k > a.k_max()) continue;
    const auto& ga = a.sector(j.k);
    const auto& gb = b.sector(j.k);
    require(ga.grid == gb.grid, "rho metric needs families on one grid");
    const cplx p = pairing(j, ga.kernel - gb.kernel, ga.grid);
    s += std::ldexp(std::abs(p), -static_cast<int>(i + 1));
  }
  return s;
}

KernelMatrix contract_extra(const DensityMatrixK& upper, int j, bool primed,
                            const std::optional<std::vector<double>>& diagonal,
                            const std::optional<std::vector<double>>& pair) {
  const int k = upper.k - 1;
  require(k >= 1, "contraction needs a sector k+1 >= 2 kernel");
  require(j >= 1 && j <= k, "contraction index j must satisfy 1 <= j <= k");
  const Grid& grid = upper.grid;
  const std::size_t n1 = grid.size();
  const std::size_t nk = static_cast<std::size_t>(upper.kernel.rows()) / n1;
  const double vol = grid.cell_volume();
  if (diagonal) require(diagonal->size() == n1, "diagonal smoothing kernel has the wrong length");
  if (pair) require(pair->size() == n1, "pair kernel has the wrong length");
  const SiteDifference diff(grid);
  KernelMatrix out = KernelMatrix::Zero(static_cast<Eigen::Index>(nk), static_cast<Eigen::Index>(nk));
  std::vector<cplx> smoothed(n1);
  const auto& g = upper.kernel;
  for (std::size_t xp = 0; xp < nk; ++xp) {
    for (std::size_t x = 0; x < nk; ++x) {
      const std::size_t z = site_of(primed ? xp : x, j, k, grid.size());
      // Column yp of the (x, x') block is contiguous in y.
      auto column = [&](std::size_t yp) {
        return g.data() + (xp * n1 + yp) * static_cast<std::size_t>(g.rows()) + x * n1;
      };
      if (!diagonal && !pair) {
        out(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(xp)) = column(z)[z];
        continue;
      }
      // Unprimed: smoothed(y) = int dy' D(y' - y) gamma(x, y; x', y').
      // Primed: the roles of y and y' swap, so P always weighs the variable
      // on the same side as z.
      if (!diagonal) {
        for (std::size_t y = 0; y < n1; ++y) smoothed[y] = column(y)[y];
      } else if (!primed) {
        std::fill(smoothed.begin(), smoothed.end(), cplx{});
        for (std::size_t other = 0; other < n1; ++other) {
          const cplx* col = column(other);
          for (std::size_t y = 0; y < n1; ++y) {
            const double dval = (*diagonal)[diff(other, y)];
            if (dval != 0.0) smoothed[y] += dval * col[y];
          }
        }
        for (auto& v : smoothed) v *= vol;
      } else {
        for (std::size_t y = 0; y < n1; ++y) {
          const cplx* col = column(y);
          cplx s = 0.0;
          for (std::size_t other = 0; other < n1; ++other) {
            const double dval = (*diagonal)[diff(other, y)];
            if (dval != 0.0) s += dval * col[other];
          }
          smoothed[y] = s * vol;
        }
      }
      cplx value;
      if (!pair) {
        value = smoothed[z];
      } else {
        value = 0.0;
        for (std::size_t y = 0; y < n1; ++y) {
          const double pval = (*pair)[diff(y, z)];
          if (pval != 0.0) value += pval * smoothed[y];
        }
        value *= vol;
      }
      out(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(xp)) = value;
    }
  }
  return out;
}

KernelMatrix regularized_contraction(const DensityMatrixK& upper, int j, double r, double r_prime) {
  const auto h_r = sample_mollifier_real({r, upper.grid.dim()}, upper.grid);
  const auto h_rp = sample_mollifier_real({r_prime, upper.grid.dim()}, upper.grid);
  return contract_extra(upper, j, false, h_r, h_rp);
}

}  // namespace bosonlab
