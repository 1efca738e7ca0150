#include "bosonlab/simd/kernels.hpp"
#include "gram.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace bosonlab::simd {
namespace {

// Two interleaved complex doubles per register: [r0 i0 r1 i1].
inline __m256d cmul_pd(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);          // [br0 br0 br1 br1]
  const __m256d b_im = _mm256_permute_pd(b, 0xF);      // [bi0 bi0 bi1 bi1]
  const __m256d a_sw = _mm256_permute_pd(a, 0x5);      // [ai0 ar0 ai1 ar1]
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

inline void mul_tail(double* x, double pr, double pi_) {
  const double r = x[0] * pr - x[1] * pi_;
  const double i = x[0] * pi_ + x[1] * pr;
  x[0] = r;
  x[1] = i;
}

void cmul(cplx* x, const cplx* p, std::size_t n) {
  auto* xd = reinterpret_cast<double*>(x);
  const auto* pd = reinterpret_cast<const double*>(p);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(xd + 2 * i);
    const __m256d b = _mm256_loadu_pd(pd + 2 * i);
    _mm256_storeu_pd(xd + 2 * i, cmul_pd(a, b));
  }
  for (; i < n; ++i) mul_tail(xd + 2 * i, pd[2 * i], pd[2 * i + 1]);
}

void cmul_scaled(cplx* x, const cplx* p, cplx s, std::size_t n) {
  auto* xd = reinterpret_cast<double*>(x);
  const auto* pd = reinterpret_cast<const double*>(p);
  const __m256d sv = _mm256_setr_pd(s.real(), s.imag(), s.real(), s.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(xd + 2 * i);
    const __m256d q = cmul_pd(_mm256_loadu_pd(pd + 2 * i), sv);
    _mm256_storeu_pd(xd + 2 * i, cmul_pd(a, q));
  }
  for (; i < n; ++i) {
    const double qr = pd[2 * i] * s.real() - pd[2 * i + 1] * s.imag();
    const double qi = pd[2 * i] * s.imag() + pd[2 * i + 1] * s.real();
    mul_tail(xd + 2 * i, qr, qi);
  }
}

void rmul_scaled(cplx* x, const double* w, double s, std::size_t n) {
  auto* xd = reinterpret_cast<double*>(x);
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // [w0 w0 w1 w1]
    const __m128d w2 = _mm_loadu_pd(w + i);
    const __m256d wv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(w2), 0x50);
    const __m256d f = _mm256_mul_pd(sv, wv);
    _mm256_storeu_pd(xd + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(xd + 2 * i), f));
  }
  for (; i < n; ++i) {
    const double f = s * w[i];
    xd[2 * i] *= f;
    xd[2 * i + 1] *= f;
  }
}

void raxpy(cplx* y, const double* w, const cplx* x, std::size_t n) {
  auto* yd = reinterpret_cast<double*>(y);
  const auto* xd = reinterpret_cast<const double*>(x);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m128d w2 = _mm_loadu_pd(w + i);
    const __m256d wv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(w2), 0x50);
    const __m256d r = _mm256_fmadd_pd(wv, _mm256_loadu_pd(xd + 2 * i), _mm256_loadu_pd(yd + 2 * i));
    _mm256_storeu_pd(yd + 2 * i, r);
  }
  for (; i < n; ++i) {
    yd[2 * i] += w[i] * xd[2 * i];
    yd[2 * i + 1] += w[i] * xd[2 * i + 1];
  }
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);  // [l0+h0, l1+h1]
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

double norm2(const cplx* x, std::size_t n) {
  const auto* xd = reinterpret_cast<const double*>(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(xd + 2 * i);
    acc = _mm256_fmadd_pd(a, a, acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += xd[2 * i] * xd[2 * i] + xd[2 * i + 1] * xd[2 * i + 1];
  return hsum(acc) + tail;
}

cplx cdot(const cplx* a, const cplx* b, std::size_t n) {
  const auto* ad = reinterpret_cast<const double*>(a);
  const auto* bd = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();  // [ar*br, ai*bi, ...]
  __m256d acc_im = _mm256_setzero_pd();  // [ar*bi, ai*br, ...]
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d av = _mm256_loadu_pd(ad + 2 * i);
    const __m256d bv = _mm256_loadu_pd(bd + 2 * i);
    acc_re = _mm256_fmadd_pd(av, bv, acc_re);
    acc_im = _mm256_fmadd_pd(av, _mm256_permute_pd(bv, 0x5), acc_im);
  }
  const __m256d sign = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
  double re = hsum(acc_re);
  double im = hsum(_mm256_mul_pd(acc_im, sign));
  for (; i < n; ++i) {
    const double ar = ad[2 * i], ai = ad[2 * i + 1];
    const double br = bd[2 * i], bi = bd[2 * i + 1];
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

constexpr KernelTable table{cmul, cmul_scaled, rmul_scaled, raxpy, norm2, cdot, gram_avx2};

}  // namespace

const KernelTable& avx2_kernels() { return table; }

}  // namespace bosonlab::simd

#else

namespace bosonlab::simd {
// Built without AVX2 support; dispatch never selects this table.
const KernelTable& avx2_kernels() { return scalar_kernels(); }
}  // namespace bosonlab::simd

#endif
