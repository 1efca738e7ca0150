#include "bosonlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "bosonlab/simd/kernels.hpp"

namespace bosonlab {

namespace {
// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Grid make_grid(int d, int points_per_axis) {
  require(d >= 1 && d <= 3, "grid dimension must be 1, 2 or 3");
  const int m = points_per_axis;
  require(m >= 8 && (m & (m - 1)) == 0, "points per axis must be a power of two and at least 8");
  Grid g;
  g.d_ = d;
  g.m_ = m;
  g.size_ = 1;
  for (int a = 0; a < d; ++a) g.size_ *= static_cast<std::size_t>(m);
  g.cell_volume_ = 1.0 / static_cast<double>(g.size_);
  return g;
}

std::array<int, 3> Grid::unflatten(std::size_t i) const {
  std::array<int, 3> out{0, 0, 0};
  for (int a = d_ - 1; a >= 0; --a) {
    out[a] = static_cast<int>(i % m_);
    i /= m_;
  }
  return out;
}

std::size_t Grid::flatten(const std::array<int, 3>& m) const {
  std::size_t i = 0;
  for (int a = 0; a < d_; ++a) i = i * m_ + static_cast<std::size_t>(((m[a] % m_) + m_) % m_);
  return i;
}

SiteDifference::SiteDifference(const Grid& grid) : grid_(grid), coords_(grid.size()) {
  for (std::size_t s = 0; s < grid.size(); ++s) coords_[s] = grid.unflatten(s);
}

GridFunction::GridFunction(const Grid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
  require(values.size() == grid.size(), "grid function length must equal M^d");
}

GridFunction transform(const GridFunction& f, Direction direction) {
  require(f.values.size() == f.grid.size(), "grid function shape mismatch");
  GridFunction out = f;
  std::vector<int> dims(f.grid.dim(), f.grid.points_per_axis());
  FftPlan plan(dims, out.values.data());
  if (direction == Direction::forward) {
    plan.forward(out.values.data());
    for (auto& v : out.values) v *= f.grid.cell_volume();
  } else {
    plan.backward(out.values.data());
  }
  return out;
}

std::vector<double> laplacian_symbol(const Grid& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto m = grid.unflatten(i);
    double s = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double k = two_pi * grid.mode(m[a]);
      s += k * k;
    }
    out[i] = s;
  }
  return out;
}

std::vector<double> sobolev_symbol(const Grid& grid) {
  auto out = laplacian_symbol(grid);
  for (auto& v : out) v = std::sqrt(1.0 + v);
  return out;
}

cplx inner(const GridFunction& f, const GridFunction& g) {
  require(f.grid == g.grid, "inner product of functions on different grids");
  return simd::cdot(f.values, g.values) * f.grid.cell_volume();
}

double l2_norm(const GridFunction& f) { return std::sqrt(simd::norm2(f.values) * f.grid.cell_volume()); }

GridFunction apply_neg_laplacian(const GridFunction& f) {
  auto c = transform(f, Direction::forward);
  const auto sym = laplacian_symbol(f.grid);
  for (std::size_t i = 0; i < sym.size(); ++i) c.values[i] *= sym[i];
  return transform(c, Direction::inverse);
}

FftPlan::FftPlan(std::span<const int> dims, cplx* data, int howmany, int stride, int dist) {
  int n = 1;
  for (int v : dims) n *= v;
  if (dist == 0) dist = n;
  auto* p = reinterpret_cast<fftw_complex*>(data);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  fwd_ = fftw_plan_many_dft(static_cast<int>(dims.size()), dims.data(), howmany, p, nullptr, stride, dist, p,
                            nullptr, stride, dist, FFTW_FORWARD, flags);
  bwd_ = fftw_plan_many_dft(static_cast<int>(dims.size()), dims.data(), howmany, p, nullptr, stride, dist, p,
                            nullptr, stride, dist, FFTW_BACKWARD, flags);
  if (fwd_ == nullptr || bwd_ == nullptr) throw NumericError("FFTW failed to create a plan");
}

FftPlan::FftPlan(FftPlan&& other) noexcept : fwd_(other.fwd_), bwd_(other.bwd_) {
  other.fwd_ = nullptr;
  other.bwd_ = nullptr;
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  if (fwd_ != nullptr) fftw_destroy_plan(fwd_);
  if (bwd_ != nullptr) fftw_destroy_plan(bwd_);
}

void FftPlan::forward(cplx* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(fwd_, p, p);
}

void FftPlan::backward(cplx* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(bwd_, p, p);
}

TensorFft::TensorFft(int rank, int side)
    : rank_(rank), side_(side), total_(1), chunk_(64), buffer_(static_cast<std::size_t>(side) * 64) {
  require(rank >= 1 && side >= 2, "tensor transform needs rank >= 1 and side >= 2");
  for (int i = 0; i < rank; ++i) total_ *= static_cast<std::size_t>(side);
  // Trailing axes whose joint block stays cache-sized go through one
  // contiguous batched plan; the rest are gathered into buffer_ chunk by chunk.
  block_ = static_cast<std::size_t>(side);
  inner_rank_ = 1;
  while (inner_rank_ < rank && block_ * static_cast<std::size_t>(side) <= (std::size_t{1} << 15)) {
    block_ *= static_cast<std::size_t>(side);
    ++inner_rank_;
  }
  require(block_ == total_ || block_ % chunk_ == 0, "tensor transform block must be a multiple of the chunk width");
  const int signs[2] = {FFTW_FORWARD, FFTW_BACKWARD};
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  auto* buf = reinterpret_cast<fftw_complex*>(buffer_.data());
  const std::vector<int> dims(static_cast<std::size_t>(inner_rank_), side);
  const int wide = static_cast<int>(chunk_);
  const int blk = static_cast<int>(block_);
  std::vector<cplx> probe(block_);
  auto* pr = reinterpret_cast<fftw_complex*>(probe.data());
  std::lock_guard lock(planner_mutex());
  for (int d = 0; d < 2; ++d) {
    // With FFTW_ESTIMATE the arrays are not touched while planning; execution
    // on the real data goes through fftw_execute_dft.
    inner_[d] = fftw_plan_many_dft(inner_rank_, dims.data(), static_cast<int>(total_ / block_), pr, nullptr, 1, blk,
                                   pr, nullptr, 1, blk, signs[d], flags);
    chunk_plan_[d] = fftw_plan_many_dft(1, &side_, wide, buf, nullptr, wide, 1, buf, nullptr, wide, 1, signs[d], flags);
    if (!inner_[d] || !chunk_plan_[d]) throw NumericError("FFTW failed to create a tensor plan");
  }
}

TensorFft::~TensorFft() {
  std::lock_guard lock(planner_mutex());
  for (auto* set : {inner_, chunk_plan_})
    for (int d = 0; d < 2; ++d)
      if (set[d] != nullptr) fftw_destroy_plan(set[d]);
}

void TensorFft::run(cplx* data, int dir) const {
  const auto m = static_cast<std::size_t>(side_);
  fftw_execute_dft(inner_[dir], reinterpret_cast<fftw_complex*>(data), reinterpret_cast<fftw_complex*>(data));
  auto* buf = reinterpret_cast<fftw_complex*>(buffer_.data());
  for (std::size_t stride = block_; stride < total_; stride *= m) {
    const std::size_t outer = total_ / (m * stride);
    for (std::size_t o = 0; o < outer; ++o) {
      cplx* base = data + o * m * stride;
      for (std::size_t c0 = 0; c0 < stride; c0 += chunk_) {
        for (std::size_t r = 0; r < m; ++r) std::copy_n(base + r * stride + c0, chunk_, buffer_.data() + r * chunk_);
        fftw_execute_dft(chunk_plan_[dir], buf, buf);
        for (std::size_t r = 0; r < m; ++r) std::copy_n(buffer_.data() + r * chunk_, chunk_, base + r * stride + c0);
      }
    }
  }
}

}  // namespace bosonlab
