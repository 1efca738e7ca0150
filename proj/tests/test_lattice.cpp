#include <random>

#include "bosonlab/lattice.hpp"
#include "doctest.h"

using namespace bosonlab;

namespace {

GridFunction random_function(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  GridFunction f(g);
  for (auto& z : f.values) z = {n(rng), n(rng)};
  return f;
}

GridFunction plane_wave(const Grid& g, std::array<int, 3> k) {
  GridFunction f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto m = g.unflatten(i);
    double phase = 0;
    for (int a = 0; a < g.dim(); ++a) phase += two_pi * k[a] * m[a] / g.points_per_axis();
    f[i] = std::polar(1.0, phase);
  }
  return f;
}

double l2_dist(const GridFunction& a, const GridFunction& b) {
  GridFunction d(a.grid);
  for (std::size_t i = 0; i < d.values.size(); ++i) d[i] = a[i] - b[i];
  return l2_norm(d);
}

}  // namespace

TEST_CASE("make_grid") {
  const Grid g1 = make_grid(1, 32);
  CHECK(g1.cell_volume() == 1.0 / 32);
  CHECK(g1.size() == 32u);
  const Grid g3 = make_grid(3, 16);
  CHECK(g3.cell_volume() == doctest::Approx(1.0 / 4096).epsilon(1e-15));
  CHECK(g3.cell_volume() * static_cast<double>(g3.size()) == 1.0);
  CHECK_THROWS_AS(make_grid(1, 33), PreconditionError);
  CHECK_THROWS_AS(make_grid(1, 4), PreconditionError);
  CHECK_THROWS_AS(make_grid(4, 8), PreconditionError);
  CHECK_THROWS_AS(make_grid(0, 8), PreconditionError);
}

TEST_CASE("flatten and unflatten are inverse") {
  const Grid g = make_grid(3, 8);
  for (std::size_t i = 0; i < g.size(); i += 37) CHECK(g.flatten(g.unflatten(i)) == i);
  CHECK(g.flatten({-1, 0, 0}) == g.flatten({7, 0, 0}));
  CHECK(g.min_image(5) == doctest::Approx(-3.0 / 8));
}

TEST_CASE("transform: DC, pure mode, round trip and Parseval") {
  const Grid g = make_grid(1, 32);
  GridFunction one(g);
  for (auto& z : one.values) z = 1.0;
  const auto c = transform(one, Direction::forward);
  CHECK(std::abs(c[0] - 1.0) <= 1e-14);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(std::abs(c[i]) <= 1e-14);

  const auto e1 = transform(plane_wave(g, {1, 0, 0}), Direction::forward);
  CHECK(std::abs(e1[1] - 1.0) <= 1e-14);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (i != 1) CHECK(std::abs(e1[i]) <= 1e-14);

  for (int d : {1, 2, 3}) {
    const Grid gd = make_grid(d, d == 3 ? 8 : 16);
    for (unsigned seed = 0; seed < 100; ++seed) {
      const auto f = random_function(gd, seed);
      const auto fh = transform(f, Direction::forward);
      double coeff = 0;
      for (const auto& z : fh.values) coeff += std::norm(z);
      CHECK(std::abs(l2_norm(f) - std::sqrt(coeff)) <= 1e-12 * l2_norm(f));
      CHECK(l2_dist(transform(fh, Direction::inverse), f) <= 1e-12 * l2_norm(f));
    }
  }
}

TEST_CASE("laplacian symbol") {
  const auto s1 = laplacian_symbol(make_grid(1, 16));
  CHECK(s1[0] == 0.0);
  CHECK(s1[1] == doctest::Approx(4 * pi * pi));
  CHECK(s1[1] == doctest::Approx(39.4784176).epsilon(1e-8));
  CHECK(s1[15] == doctest::Approx(4 * pi * pi));
  CHECK(s1[8] == doctest::Approx(4 * pi * pi * 64));  // mode -8
  const Grid g3 = make_grid(3, 8);
  const auto s3 = laplacian_symbol(g3);
  CHECK(s3[g3.flatten({1, 1, 0})] == doctest::Approx(8 * pi * pi));
  for (std::size_t i = 0; i < s3.size(); ++i) {
    CHECK(s3[i] >= 0.0);
    if (i != 0) CHECK(s3[i] > 0.0);
  }
  const auto sob = sobolev_symbol(g3);
  for (std::size_t i = 0; i < s3.size(); ++i) CHECK(sob[i] * sob[i] == doctest::Approx(1 + s3[i]));
}

TEST_CASE("inner product") {
  const Grid g = make_grid(1, 32);
  GridFunction one(g);
  for (auto& z : one.values) z = 1.0;
  const auto e = plane_wave(g, {1, 0, 0});
  CHECK(std::abs(inner(one, one) - 1.0) <= 1e-14);
  CHECK(std::abs(inner(e, e) - 1.0) <= 1e-14);
  CHECK(std::abs(inner(e, one)) <= 1e-12);
  const auto f = random_function(g, 3), h = random_function(g, 4);
  CHECK(std::abs(inner(f, h) - std::conj(inner(h, f))) <= 1e-13);
  GridFunction if_(g);
  for (std::size_t i = 0; i < g.size(); ++i) if_[i] = cplx{0, 1} * f[i];
  CHECK(std::abs(inner(if_, h) - cplx{0, -1} * inner(f, h)) <= 1e-13);
  CHECK_THROWS_AS(inner(f, GridFunction(make_grid(1, 16))), PreconditionError);
}

TEST_CASE("negative laplacian on a plane wave") {
  const Grid g = make_grid(2, 16);
  const auto e = plane_wave(g, {1, -2, 0});
  const auto le = apply_neg_laplacian(e);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(le[i] - 5 * 4 * pi * pi * e[i]) <= 1e-10);
}

TEST_CASE("TensorFft matches a full FFTW plan") {
  for (auto [rank, side] : {std::pair{1, 16}, {2, 8}, {3, 16}, {4, 16}, {5, 8}, {4, 32}}) {
    CAPTURE(rank);
    CAPTURE(side);
    std::size_t n = 1;
    for (int r = 0; r < rank; ++r) n *= static_cast<std::size_t>(side);
    std::mt19937_64 rng(rank * 100 + side);
    std::normal_distribution<double> nd;
    std::vector<cplx> a(n);
    for (auto& z : a) z = {nd(rng), nd(rng)};
    auto b = a;
    const std::vector<int> dims(static_cast<std::size_t>(rank), side);
    FftPlan full(dims, b.data());
    full.forward(b.data());
    auto c = a;
    TensorFft tf(rank, side);
    tf.forward(c.data());
    double err = 0, scale = 0;
    for (std::size_t i = 0; i < n; ++i) {
      err = std::max(err, std::abs(b[i] - c[i]));
      scale = std::max(scale, std::abs(b[i]));
    }
    CHECK(err <= 1e-12 * scale);
    tf.backward(c.data());
    for (std::size_t i = 0; i < n; i += 97) CHECK(std::abs(c[i] / static_cast<double>(n) - a[i]) <= 1e-12);
  }
}
