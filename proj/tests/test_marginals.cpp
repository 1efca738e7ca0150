#include <random>

#include "bosonlab/gp.hpp"
#include "bosonlab/marginals.hpp"
#include "doctest.h"

using namespace bosonlab;

namespace {

GridFunction normalized(GridFunction f) {
  const double n = l2_norm(f);
  for (auto& z : f.values) z /= n;
  return f;
}

GridFunction mode(const Grid& g, int k) { return plane_wave_field(g, k).phi; }

GridFunction constant(const Grid& g) {
  GridFunction f(g);
  for (auto& z : f.values) z = 1.0;
  return f;
}

// Reference partial trace by explicit loops over the traced particles.
Eigen::MatrixXcd reference_reduce(const ManyBodyState& psi, int k) {
  const std::size_t s = psi.grid.size();
  std::size_t rows = 1, cols = 1;
  for (int i = 0; i < k; ++i) rows *= s;
  for (int i = k; i < psi.particles; ++i) cols *= s;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows, rows);
  const double w = std::pow(psi.grid.cell_volume(), psi.particles - k);
  for (std::size_t x = 0; x < rows; ++x)
    for (std::size_t xp = 0; xp < rows; ++xp) {
      cplx acc = 0;
      for (std::size_t y = 0; y < cols; ++y) acc += psi.values[x * cols + y] * std::conj(psi.values[xp * cols + y]);
      out(x, xp) = w * acc;
    }
  return out;
}

ManyBodyState random_symmetric_triple(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const std::size_t m = g.size();
  ManyBodyState psi;
  psi.grid = g;
  psi.particles = 3;
  psi.values.assign(m * m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      for (std::size_t l = 0; l <= j; ++l) {
        const cplx z{nd(rng), nd(rng)};
        for (auto [a, b, c] : {std::array{i, j, l}, {i, l, j}, {j, i, l}, {j, l, i}, {l, i, j}, {l, j, i}})
          psi.values[(a * m + b) * m + c] = z;
      }
  const double n = norm(psi);
  for (auto& z : psi.values) z /= n;
  return psi;
}

}  // namespace

TEST_CASE("reduce on product states") {
  const Grid g = make_grid(1, 16);
  const auto phi0 = default_initial_field(g);
  const auto psi = build_product_state(phi0, 3);
  const auto g1 = reduce(psi, 1);
  const auto ev = eigenvalues(g1);
  CHECK(ev.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  int big = 0;
  for (auto e : ev) big += std::abs(e) > 1e-10;
  CHECK(big == 1);
  CHECK(trace(g1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((g1.kernel - tensor_projector(phi0.phi, 1).kernel).norm() <= 1e-12 * g1.kernel.norm());
  const auto g2 = reduce(psi, 2);
  CHECK((g2.kernel - tensor_projector(phi0.phi, 2).kernel).norm() <= 1e-12 * g2.kernel.norm());
  CHECK(compatibility_error(g1, g2) <= 1e-12);
  CHECK(check_invariants(g2).ok());
  CHECK_THROWS_AS(reduce(psi, 4), PreconditionError);
  CHECK_THROWS_AS(reduce(psi, 0), PreconditionError);
}

TEST_CASE("reduce on a correlated state matches explicit loops") {
  const Grid g = make_grid(1, 8);
  const auto psi = random_symmetric_triple(g, 4);
  for (int k : {1, 2}) {
    const auto gk = reduce(psi, k);
    const auto ref = reference_reduce(psi, k);
    CHECK((gk.kernel - ref).norm() <= 1e-12 * ref.norm());
    const auto inv = check_invariants(gk);
    CAPTURE(k);
    CHECK(inv.hermiticity <= 1e-10);
    CHECK(inv.min_eigenvalue >= -1e-9);
    CHECK(inv.trace_error <= 1e-9);
    CHECK(inv.bosonic <= 1e-10);
  }
  const auto fam = reduce_family(psi, 2);
  CHECK(compatibility_error(fam.sector(1), fam.sector(2)) <= 1e-12);
  CHECK((partial_trace_last(fam.sector(2)).kernel - fam.sector(1).kernel).norm() <= 1e-12);
  CHECK(hminus_norm(fam) <= 1.0);
  CHECK(hs_norm(fam.sector(1)) < 1.0);
}

TEST_CASE("trace distance") {
  const Grid g = make_grid(1, 32);
  const auto p0 = tensor_projector(constant(g), 1);
  const auto p1 = tensor_projector(mode(g, 1), 1);
  CHECK(trace_distance(p0, p0) <= 1e-14);
  CHECK(trace_distance(p0, p1) == doctest::Approx(1.0).epsilon(1e-12));
  GridFunction mix(g);
  for (std::size_t i = 0; i < g.size(); ++i) mix[i] = (1.0 + mode(g, 1)[i]) / std::sqrt(2.0);
  CHECK(trace_distance(p0, tensor_projector(mix, 1)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(trace_distance(p0, tensor_projector(mix, 1)) == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK_THROWS_AS(trace_distance(p0, tensor_projector(constant(g), 2)), PreconditionError);
}

TEST_CASE("Sobolev trace norm") {
  const Grid g = make_grid(1, 32);
  CHECK(sobolev_trace_norm(tensor_projector(constant(g), 1)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sobolev_trace_norm(tensor_projector(mode(g, 1), 1)) == doctest::Approx(1 + 4 * pi * pi).epsilon(1e-12));
  CHECK(sobolev_trace_norm(tensor_projector(mode(g, 1), 1)) == doctest::Approx(40.478).epsilon(1e-4));
  // 1 + cos(2 pi x)/2 normalized: coefficients c_0 = c, c_{+-1} = c/4 with c^2 = 1/(1 + 1/8).
  const double expected = (1.0 + (1.0 + 4 * pi * pi) / 8.0) / 1.125;
  const auto phi = default_initial_field(g).phi;
  CHECK(sobolev_trace_norm(tensor_projector(phi, 1)) == doctest::Approx(expected).epsilon(1e-10));
  // Tensor products multiply.
  CHECK(sobolev_trace_norm(tensor_projector(phi, 2)) == doctest::Approx(expected * expected).epsilon(1e-9));
  CHECK(sobolev_trace_norm(tensor_projector(phi, 2), {1}) == doctest::Approx(expected).epsilon(1e-10));
  CHECK_THROWS_AS(sobolev_trace_norm(tensor_projector(phi, 1), {2}), PreconditionError);
}

TEST_CASE("H- norm and rho metric") {
  const Grid g = make_grid(1, 16);
  const auto phi = default_initial_field(g);
  MarginalFamily one;
  one.sectors.push_back(tensor_projector(phi.phi, 1));
  CHECK(hminus_norm(one) == doctest::Approx(0.5).epsilon(1e-12));
  const auto fam = factorized_family(phi, 2);
  CHECK(hminus_norm(fam) == doctest::Approx(0.75).epsilon(1e-12));
  const auto kernels = test_kernel_family(g, 8);
  CHECK(rho_metric(fam, fam, kernels) == 0.0);
  const auto other = factorized_family(plane_wave_field(g, 1), 2);
  const double r = rho_metric(fam, other, kernels);
  CHECK(r > 0.0);
  CHECK(r == doctest::Approx(rho_metric(other, fam, kernels)));
  // Each term is at most 2^-i (|<J, gamma>| <= ||J||_2 ||gamma||_2 <= 2^-k).
  CHECK(r <= 2.0);
  MarginalFamily trunc;
  trunc.sectors.push_back(fam.sector(1));
  CHECK_THROWS_AS(rho_metric(fam, trunc, kernels), PreconditionError);
}

TEST_CASE("pairing against explicit sums") {
  const Grid g = make_grid(1, 8);
  const auto psi = random_symmetric_triple(g, 9);
  const auto g2 = reduce(psi, 2);
  const auto j = test_kernel_family(g, 8)[6];
  REQUIRE(j.k == 2);
  cplx ref = 0;
  const std::size_t s = g.size();
  for (std::size_t x1 = 0; x1 < s; ++x1)
    for (std::size_t x2 = 0; x2 < s; ++x2)
      for (std::size_t y1 = 0; y1 < s; ++y1)
        for (std::size_t y2 = 0; y2 < s; ++y2) {
          const cplx jv = j.left[0][x1] * j.left[1][x2] * std::conj(j.right[0][y1] * j.right[1][y2]);
          ref += std::conj(jv) * g2.kernel(x1 * s + x2, y1 * s + y2);
        }
  ref *= std::pow(g.cell_volume(), 4);
  CHECK(std::abs(pairing(j, g2) - ref) <= 1e-13);
  CHECK(pairing(zero_test_kernel(g, 2), g2) == cplx(0.0));
}

TEST_CASE("regularized contraction on factorized input") {
  const Grid g = make_grid(1, 32);
  const auto phi = default_initial_field(g).phi;
  const auto g2 = tensor_projector(phi, 2);
  const double vol = g.cell_volume();
  double prev = 1e300;
  for (double r : {1.0 / 8, 1.0 / 16}) {
    const auto k = regularized_contraction(g2, 1, r, r);
    // Independent double sum: phi(x) conj phi(x') int h_r(y'-y) h_r(y-x) phi(y) conj phi(y').
    const auto h = sample_mollifier_real({r, 1}, g);
    auto hh = [&](long d) { return h[static_cast<std::size_t>(((d % 32) + 32) % 32)]; };
    double err_exact = 0, err_limit = 0;
    for (long x = 0; x < 32; ++x) {
      cplx inner_sum = 0;
      for (long y = 0; y < 32; ++y)
        for (long yp = 0; yp < 32; ++yp) inner_sum += hh(yp - y) * hh(y - x) * phi[y] * std::conj(phi[yp]);
      inner_sum *= vol * vol;
      for (long xp = 0; xp < 32; ++xp) {
        const cplx ref = phi[x] * std::conj(phi[xp]) * inner_sum;
        err_exact = std::max(err_exact, std::abs(k(x, xp) - ref));
        err_limit = std::max(err_limit, std::abs(k(x, xp) - std::norm(phi[x]) * phi[x] * std::conj(phi[xp])));
      }
    }
    CAPTURE(r);
    CHECK(err_exact <= 1e-12);
    CHECK(err_limit < prev / 2);
    prev = err_limit;
  }
  CHECK_THROWS_AS(regularized_contraction(g2, 2, 0.125, 0.125), PreconditionError);
  CHECK_THROWS_AS(regularized_contraction(g2, 0, 0.125, 0.125), PreconditionError);
  CHECK_THROWS_AS(regularized_contraction(tensor_projector(phi, 1), 1, 0.125, 0.125), PreconditionError);
}

TEST_CASE("regularized contraction refinement on a simulated marginal") {
  ManyBodyConfig cfg;
  cfg.points_per_axis = 32;
  cfg.particles = 3;
  cfg.range = 0.25;
  auto psi = propagate(build_product_state(default_initial_field(cfg.grid()), 3), cfg, 0.05);
  const auto g2 = reduce(psi, 2);
  const auto j = test_kernel_family(cfg.grid(), 8)[1];
  std::vector<cplx> p;
  for (double r : {1.0 / 4, 1.0 / 8, 1.0 / 16})
    p.push_back(pairing(j, regularized_contraction(g2, 1, r, r), cfg.grid()));
  const double d1 = std::abs(p[0] - p[1]), d2 = std::abs(p[1] - p[2]);
  MESSAGE("Cauchy differences " << d1 << " " << d2);
  CHECK(d2 < d1);
}

TEST_CASE("invariants hold along a simulated trajectory") {
  ManyBodyConfig cfg;
  cfg.points_per_axis = 32;
  cfg.particles = 3;
  cfg.range = 0.25;
  auto psi = build_product_state(default_initial_field(cfg.grid()), 3);
  propagate_with_snapshots(psi, cfg, 0.1, 0.05, [&](const ManyBodyState& s) {
    const auto fam = reduce_family(s, 2);
    for (int k = 1; k <= 2; ++k) {
      CHECK(check_invariants(fam.sector(k)).ok());
      CHECK(std::abs(trace(fam.sector(k)) - 1.0) <= 1e-9);
    }
    CHECK(compatibility_error(fam.sector(1), fam.sector(2)) <= 1e-9);
    CHECK(hminus_norm(fam) <= 1.0);
  });
}
