#include "bosonlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bosonlab/simd/kernels.hpp"

namespace bosonlab {

namespace {

double radial_integral(const PotentialProfile& p, double power, int d) {
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [&](double r) {
    const double v = std::pow(p(r), power);
    switch (d) {
      case 1: return 2.0 * v;
      case 2: return two_pi * r * v;
      default: return 4.0 * pi * r * r * v;
    }
  };
  if (p.kind == ProfileKind::tabulated) {
    double total = 0.0;
    double lo = 0.0;
    for (double hi : p.radii) {
      if (hi > lo) total += gauss_kronrod<double, 61>::integrate(integrand, lo, hi, 15, 1e-13);
      lo = hi;
    }
    return total;
  }
  return gauss_kronrod<double, 61>::integrate(integrand, 0.0, p.radius, 15, 1e-13);
}

// Band-limited random coefficients (|k_a| <= 2 per axis), inverse
// transformed and normalized.
GridFunction random_band_limited(const Grid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  GridFunction c(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto m = grid.unflatten(i);
    bool inside = true;
    for (int a = 0; a < grid.dim(); ++a) inside = inside && std::abs(grid.mode(m[a])) <= 2;
    if (inside) {
      const double re = normal(rng);
      const double im = normal(rng);
      c[i] = {re, im};
    }
  }
  auto f = transform(c, Direction::inverse);
  const double n = l2_norm(f);
  for (auto& v : f.values) v /= n;
  return f;
}

double min_image_radius(const Grid& grid, std::size_t i) {
  const auto m = grid.unflatten(i);
  double r2 = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    const double x = grid.min_image(m[a]);
    r2 += x * x;
  }
  return std::sqrt(r2);
}

}  // namespace

PotentialProfile PotentialProfile::bump(double v0, double radius) {
  PotentialProfile p;
  p.kind = ProfileKind::bump;
  p.v0 = v0;
  p.radius = radius;
  p.validate();
  return p;
}

PotentialProfile PotentialProfile::square_well(double v0, double radius) {
  PotentialProfile p;
  p.kind = ProfileKind::square_well;
  p.v0 = v0;
  p.radius = radius;
  p.validate();
  return p;
}

PotentialProfile PotentialProfile::tabulated(std::vector<double> radii, std::vector<double> values) {
  PotentialProfile p;
  p.kind = ProfileKind::tabulated;
  p.radii = std::move(radii);
  p.values = std::move(values);
  p.radius = p.radii.empty() ? 0.0 : p.radii.back();
  p.v0 = p.values.empty() ? 0.0 : *std::max_element(p.values.begin(), p.values.end());
  p.validate();
  return p;
}

void PotentialProfile::validate() const {
  require(v0 >= 0.0, "potential amplitude must be nonnegative");
  require(radius > 0.0, "potential support radius must be positive");
  if (kind == ProfileKind::tabulated) {
    require(radii.size() >= 2 && radii.size() == values.size(), "tabulated profile needs matching radii/values");
    require(std::is_sorted(radii.begin(), radii.end()) && radii.front() >= 0.0, "tabulated radii must ascend");
    require(std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; }),
            "tabulated profile must be nonnegative");
  }
}

double PotentialProfile::operator()(double r) const {
  r = std::abs(r);
  switch (kind) {
    case ProfileKind::bump: {
      if (r >= radius) return 0.0;
      const double u = r / radius;
      return v0 * std::exp(-1.0 / (1.0 - u * u));
    }
    case ProfileKind::square_well:
      return r <= radius ? v0 : 0.0;
    case ProfileKind::tabulated: {
      if (r >= radii.back()) return 0.0;
      if (r <= radii.front()) return values.front();
      const auto it = std::upper_bound(radii.begin(), radii.end(), r);
      const std::size_t j = static_cast<std::size_t>(it - radii.begin());
      const double t = (r - radii[j - 1]) / (radii[j] - radii[j - 1]);
      return (1.0 - t) * values[j - 1] + t * values[j];
    }
  }
  return 0.0;
}

PotentialProfile PotentialProfile::rescaled(double a, double amplitude_factor) const {
  PotentialProfile p = *this;
  p.radius = radius * a;
  p.v0 = v0 * amplitude_factor;
  for (auto& r : p.radii) r *= a;
  for (auto& v : p.values) v *= amplitude_factor;
  return p;
}

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::bump: return "bump";
    case ProfileKind::square_well: return "square_well";
    case ProfileKind::tabulated: return "tabulated";
  }
  return "?";
}

ProfileKind profile_kind_from_string(const std::string& name) {
  if (name == "bump") return ProfileKind::bump;
  if (name == "square_well") return ProfileKind::square_well;
  if (name == "tabulated") return ProfileKind::tabulated;
  throw PreconditionError("unknown potential profile '" + name + "'");
}

double coupling_b(const PotentialProfile& profile, int d) {
  require(d >= 1 && d <= 3, "dimension must be 1, 2 or 3");
  if (profile.v0 == 0.0) return 0.0;
  return radial_integral(profile, 1.0, d);
}

double norm_l32_3d(const PotentialProfile& profile) {
  if (profile.v0 == 0.0) return 0.0;
  return std::pow(radial_integral(profile, 1.5, 3), 2.0 / 3.0);
}

double ScaledPotential::operator()(double r) const { return std::pow(a, -d) * profile(r / a); }

std::vector<double> sample_scaled_real(const ScaledPotential& sp, const Grid& grid) {
  require(sp.d == grid.dim(), "scaled potential dimension differs from grid dimension");
  require(sp.a * grid.points_per_axis() >= 4.0,
          "under-resolved potential: a*M must be at least 4 (support spans too few cells)");
  require(sp.a * sp.profile.radius < 0.5, "scaled potential support a*R must stay below 1/2");
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = sp(min_image_radius(grid, i));
  return out;
}

GridFunction sample_scaled(const ScaledPotential& sp, const Grid& grid) {
  const auto v = sample_scaled_real(sp, grid);
  return GridFunction(grid, std::vector<cplx>(v.begin(), v.end()));
}

std::vector<double> sample_mollifier_real(const Mollifier& m, const Grid& grid) {
  require(m.d == grid.dim(), "mollifier dimension differs from grid dimension");
  require(m.beta * grid.points_per_axis() >= 2.0, "mollifier width too small: beta*M must be at least 2");
  require(m.beta < 0.5, "mollifier width must be below 1/2");
  std::vector<double> out(grid.size(), 0.0);
  std::size_t count = 0;
  const double cut = m.beta * (1.0 + 1e-12);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (min_image_radius(grid, i) <= cut) {
      out[i] = 1.0;
      ++count;
    }
  }
  const double value = 1.0 / (static_cast<double>(count) * grid.cell_volume());
  for (auto& v : out) v *= value;
  return out;
}

GridFunction sample_mollifier(const Mollifier& m, const Grid& grid) {
  const auto v = sample_mollifier_real(m, grid);
  return GridFunction(grid, std::vector<cplx>(v.begin(), v.end()));
}

GridFunction trig_factor(TrigFactor f, const Grid& grid) {
  GridFunction g(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.unflatten(i)[0] * grid.spacing();
    switch (f) {
      case TrigFactor::one: g[i] = 1.0; break;
      case TrigFactor::cos1: g[i] = std::cos(two_pi * x); break;
      case TrigFactor::sin1: g[i] = std::sin(two_pi * x); break;
      case TrigFactor::cos2: g[i] = std::cos(2.0 * two_pi * x); break;
    }
  }
  return g;
}

double TestKernel::l2_norm() const {
  double n = 1.0;
  for (const auto& g : left) n *= bosonlab::l2_norm(g);
  for (const auto& g : right) n *= bosonlab::l2_norm(g);
  return n;
}

TestKernel TestKernel::scaled(cplx s) const {
  TestKernel out = *this;
  for (auto& v : out.left.front().values) v *= s;
  return out;
}

bool TestKernel::is_zero() const {
  auto zero = [](const GridFunction& g) {
    return std::all_of(g.values.begin(), g.values.end(), [](cplx v) { return v == cplx(0.0); });
  };
  return std::any_of(left.begin(), left.end(), zero) || std::any_of(right.begin(), right.end(), zero);
}

TestKernel make_test_kernel(const Grid& grid, const std::vector<TrigFactor>& left,
                            const std::vector<TrigFactor>& right) {
  require(!left.empty() && left.size() == right.size(), "test kernel needs k left and k right factors");
  TestKernel j;
  j.k = static_cast<int>(left.size());
  for (auto f : left) j.left.push_back(trig_factor(f, grid));
  for (auto f : right) j.right.push_back(trig_factor(f, grid));
  return j;
}

TestKernel zero_test_kernel(const Grid& grid, int k) {
  TestKernel j;
  j.k = k;
  j.left.assign(k, GridFunction(grid));
  j.right.assign(k, GridFunction(grid));
  return j;
}

std::vector<TestKernel> test_kernel_family(const Grid& grid, int size) {
  using enum TrigFactor;
  // Fixed enumeration order; index i (1-based) weights the rho metric by 2^-i.
  const std::vector<std::pair<std::vector<TrigFactor>, std::vector<TrigFactor>>> table = {
      {{one}, {one}},
      {{cos1}, {one}},
      {{one}, {sin1}},
      {{sin1}, {cos1}},
      {{cos2}, {cos1}},
      {{cos1, one}, {one, one}},
      {{cos1, sin1}, {cos1, one}},
      {{cos2, one}, {one, cos1}},
  };
  require(size >= 1 && size <= static_cast<int>(table.size()), "test kernel family size must be in 1..8");
  std::vector<TestKernel> out;
  for (int i = 0; i < size; ++i) {
    auto j = make_test_kernel(grid, table[i].first, table[i].second);
    const double target = std::ldexp(1.0, -j.k);
    out.push_back(j.scaled(target / j.l2_norm()));
  }
  return out;
}

double sobolev_inequality_ratio(const PotentialProfile& profile, double a, const GridFunction& psi) {
  const Grid& grid = psi.grid;
  require(grid.dim() == 3, "Sobolev inequality check runs on d=3 grids");
  require(a * grid.points_per_axis() >= 4.0, "under-resolved potential: a*M must be at least 4");
  require(a * profile.radius < 0.5, "scaled potential support a*R must stay below 1/2");
  const double vnorm = norm_l32_3d(profile);
  if (vnorm == 0.0) return 0.0;
  double num = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    num += std::norm(psi[i]) * profile(min_image_radius(grid, i) / a) / (a * a);
  num *= grid.cell_volume();
  const auto c = transform(psi, Direction::forward);
  const auto lap = laplacian_symbol(grid);
  double h1 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) h1 += std::norm(c[i]) * (1.0 + lap[i]);
  return num / (vnorm * std::sqrt(h1));
}

double sobolev_inequality_check(const PotentialProfile& profile, double a, int trials, std::uint64_t seed,
                                int points_per_axis) {
  require(points_per_axis >= 16, "Sobolev inequality check needs M >= 16");
  require(trials >= 1, "at least one trial");
  const Grid grid = make_grid(3, points_per_axis);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) worst = std::max(worst, sobolev_inequality_ratio(profile, a, random_band_limited(grid, rng)));
  return worst;
}

double two_body_form_ratio(const PotentialProfile& profile, double a, int trials, std::uint64_t seed,
                           int points_per_axis) {
  const Grid grid = make_grid(3, points_per_axis);
  const ScaledPotential sp{profile, a, 3};
  const auto va = sample_scaled_real(sp, grid);
  const double vl1 = coupling_b(profile, 3);
  if (vl1 == 0.0) return 0.0;
  const std::size_t n = grid.size();
  const auto lap = laplacian_symbol(grid);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<cplx> psi(n * n);
  const std::vector<int> dims(6, points_per_axis);
  FftPlan plan(dims, psi.data());
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    // Band-limited coefficients in all six axes.
    std::fill(psi.begin(), psi.end(), cplx(0.0));
    for (std::size_t i = 0; i < n; ++i) {
      const auto mi = grid.unflatten(i);
      if (std::abs(grid.mode(mi[0])) > 2 || std::abs(grid.mode(mi[1])) > 2 || std::abs(grid.mode(mi[2])) > 2) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const auto mj = grid.unflatten(j);
        if (std::abs(grid.mode(mj[0])) > 2 || std::abs(grid.mode(mj[1])) > 2 || std::abs(grid.mode(mj[2])) > 2)
          continue;
        const double re = normal(rng);
        const double im = normal(rng);
        psi[i * n + j] = {re, im};
      }
    }
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) denom += std::norm(psi[i * n + j]) * (1.0 + lap[i]) * (1.0 + lap[j]);
    // Coefficients -> values; Parseval weight cancels in the ratio once both
    // sides use the same normalization: sum |c|^2 = vol^2 sum |psi(x,y)|^2.
    plan.backward(psi.data());
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = grid.unflatten(i);
      for (std::size_t j = 0; j < n; ++j) {
        const auto yj = grid.unflatten(j);
        const std::size_t diff = grid.flatten({xi[0] - yj[0], xi[1] - yj[1], xi[2] - yj[2]});
        num += va[diff] * std::norm(psi[i * n + j]);
      }
    }
    num *= grid.cell_volume() * grid.cell_volume();
    worst = std::max(worst, num / (vl1 * denom));
  }
  return worst;
}

}  // namespace bosonlab
