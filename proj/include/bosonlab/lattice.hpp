#pragma once

// Periodic spectral grid on the unit box [0,1)^d.
//
// Lattice points are x = m/M with m in {0..M-1}^d, flattened row-major (axis 0
// slowest). Spectral coefficients follow the Fourier-series convention
//
//   c_k = cell_volume * sum_x f(x) exp(-2 pi i k.x),   f(x) = sum_k c_k exp(2 pi i k.x),
//
// so the constant 1 maps to c_0 = 1 and Parseval reads
// cell_volume * sum |f|^2 = sum |c|^2. Coefficient slot m holds mode
// k = m for m < M/2 and k = m - M otherwise (ladder -M/2..M/2-1).

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <fftw3.h>

#include "bosonlab/common.hpp"

namespace bosonlab {

class Grid {
 public:
  Grid() = default;

  int dim() const { return d_; }
  int points_per_axis() const { return m_; }
  double edge() const { return 1.0; }
  double cell_volume() const { return cell_volume_; }
  double spacing() const { return 1.0 / m_; }
  /// Number of lattice points, M^d.
  std::size_t size() const { return size_; }

  /// Signed mode number stored in coefficient slot m of one axis.
  int mode(int m) const { return m < m_ / 2 ? m : m - m_; }
  /// Per-axis integer coordinates of flat index i.
  std::array<int, 3> unflatten(std::size_t i) const;
  std::size_t flatten(const std::array<int, 3>& m) const;
  /// Minimum-image displacement of lattice offset m (per axis, in units of length).
  double min_image(int m) const { return spacing() * static_cast<double>(mode(((m % m_) + m_) % m_)); }

  friend bool operator==(const Grid& a, const Grid& b) { return a.d_ == b.d_ && a.m_ == b.m_; }

 private:
  friend Grid make_grid(int d, int points_per_axis);
  int d_ = 1;
  int m_ = 8;
  double cell_volume_ = 1.0 / 8;
  std::size_t size_ = 8;
};

/// d in {1,2,3}; M a power of two, M >= 8.
Grid make_grid(int d, int points_per_axis);

struct GridFunction {
  Grid grid;
  std::vector<cplx> values;

  GridFunction() = default;
  explicit GridFunction(const Grid& g) : grid(g), values(g.size()) {}
  GridFunction(const Grid& g, std::vector<cplx> v);

  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }
};

enum class Direction { forward, inverse };

GridFunction transform(const GridFunction& f, Direction direction);

/// Eigenvalues of -Delta per coefficient slot: |2 pi k|^2.
std::vector<double> laplacian_symbol(const Grid& grid);
/// (1 + |2 pi k|^2)^{1/2}, the multiplier of S = (1 - Delta)^{1/2}.
std::vector<double> sobolev_symbol(const Grid& grid);

/// Cell-volume-weighted L^2 pairing, conjugate-linear in f.
cplx inner(const GridFunction& f, const GridFunction& g);
double l2_norm(const GridFunction& f);

/// Apply -Delta spectrally.
GridFunction apply_neg_laplacian(const GridFunction& f);

/// Flat index of the periodic difference between two lattice sites.
class SiteDifference {
 public:
  explicit SiteDifference(const Grid& grid);
  std::size_t operator()(std::size_t s, std::size_t t) const {
    const auto& a = coords_[s];
    const auto& b = coords_[t];
    return grid_.flatten({a[0] - b[0], a[1] - b[1], a[2] - b[2]});
  }

 private:
  Grid grid_;
  std::vector<std::array<int, 3>> coords_;
};

/// In-place unnormalized FFTW transform of `howmany` tensors of rank
/// dims.size(), laid out with the given element stride and batch distance.
class FftPlan {
 public:
  FftPlan(std::span<const int> dims, cplx* data, int howmany = 1, int stride = 1, int dist = 0);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& other) noexcept;
  FftPlan& operator=(FftPlan&&) = delete;

  /// exp(-i ...) convention, no scaling.
  void forward(cplx* data) const;
  /// exp(+i ...) convention, no scaling.
  void backward(cplx* data) const;

 private:
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

/// Unnormalized in-place transform of a rank-r cube of side m, done axis by
/// axis. Strided axes are gathered through a small cache-resident buffer,
/// which beats a single rank-r plan once the tensor is far larger than cache.
/// Not safe for concurrent use of one instance.
class TensorFft {
 public:
  TensorFft(int rank, int side);
  ~TensorFft();
  TensorFft(const TensorFft&) = delete;
  TensorFft& operator=(const TensorFft&) = delete;

  void forward(cplx* data) const { run(data, 0); }
  void backward(cplx* data) const { run(data, 1); }

 private:
  void run(cplx* data, int dir) const;

  int rank_;
  int side_;
  std::size_t total_;
  std::size_t chunk_;
  std::size_t block_ = 1;
  int inner_rank_ = 1;
  fftw_plan inner_[2]{};
  fftw_plan chunk_plan_[2]{};
  mutable std::vector<cplx> buffer_;
};

}  // namespace bosonlab
