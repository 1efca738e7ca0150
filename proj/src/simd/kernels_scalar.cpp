#include "bosonlab/simd/kernels.hpp"
#include "gram.hpp"

namespace bosonlab::simd {
namespace {

// std::complex operator* carries C99 Annex G NaN recovery; spell the
// arithmetic out so the reference path stays a plain multiply-add.
inline void mul_into(double& xr, double& xi, double pr, double pi_) {
  const double r = xr * pr - xi * pi_;
  const double i = xr * pi_ + xi * pr;
  xr = r;
  xi = i;
}

void cmul(cplx* x, const cplx* p, std::size_t n) {
  auto* xd = reinterpret_cast<double*>(x);
  const auto* pd = reinterpret_cast<const double*>(p);
  for (std::size_t i = 0; i < n; ++i) mul_into(xd[2 * i], xd[2 * i + 1], pd[2 * i], pd[2 * i + 1]);
}

void cmul_scaled(cplx* x, const cplx* p, cplx s, std::size_t n) {
  auto* xd = reinterpret_cast<double*>(x);
  const auto* pd = reinterpret_cast<const double*>(p);
  const double sr = s.real(), si = s.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double qr = pd[2 * i] * sr - pd[2 * i + 1] * si;
    const double qi = pd[2 * i] * si + pd[2 * i + 1] * sr;
    mul_into(xd[2 * i], xd[2 * i + 1], qr, qi);
  }
}

void rmul_scaled(cplx* x, const double* w, double s, std::size_t n) {
  auto* xd = reinterpret_cast<double*>(x);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = s * w[i];
    xd[2 * i] *= f;
    xd[2 * i + 1] *= f;
  }
}

void raxpy(cplx* y, const double* w, const cplx* x, std::size_t n) {
  auto* yd = reinterpret_cast<double*>(y);
  const auto* xd = reinterpret_cast<const double*>(x);
  for (std::size_t i = 0; i < n; ++i) {
    yd[2 * i] += w[i] * xd[2 * i];
    yd[2 * i + 1] += w[i] * xd[2 * i + 1];
  }
}

double norm2(const cplx* x, std::size_t n) {
  const auto* xd = reinterpret_cast<const double*>(x);
  double acc[4] = {0, 0, 0, 0};
  const std::size_t m = 2 * n;
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4)
    for (int l = 0; l < 4; ++l) acc[l] += xd[i + l] * xd[i + l];
  for (int l = 0; i < m; ++i, ++l) acc[l] += xd[i] * xd[i];
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

cplx cdot(const cplx* a, const cplx* b, std::size_t n) {
  const auto* ad = reinterpret_cast<const double*>(a);
  const auto* bd = reinterpret_cast<const double*>(b);
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = ad[2 * i], ai = ad[2 * i + 1];
    const double br = bd[2 * i], bi = bd[2 * i + 1];
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

constexpr KernelTable table{cmul, cmul_scaled, rmul_scaled, raxpy, norm2, cdot, gram_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return table; }

}  // namespace bosonlab::simd
