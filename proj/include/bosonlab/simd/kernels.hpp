#pragma once

// Data-parallel inner loops shared by the propagators, reductions and
// pairings. Each kernel has a scalar reference and an AVX2/FMA variant; the
// variant is chosen once at startup from CPUID and may be forced to the
// scalar path with BOSONLAB_SIMD=scalar.

#include <cstddef>
#include <span>
#include <string_view>

#include "bosonlab/common.hpp"

namespace bosonlab::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  // x[i] *= p[i]
  void (*cmul)(cplx* x, const cplx* p, std::size_t n);
  // x[i] *= s * p[i]
  void (*cmul_scaled)(cplx* x, const cplx* p, cplx s, std::size_t n);
  // x[i] *= s * w[i] for real w
  void (*rmul_scaled)(cplx* x, const double* w, double s, std::size_t n);
  // y[i] += w[i] * x[i] for real w
  void (*raxpy)(cplx* y, const double* w, const cplx* x, std::size_t n);
  // sum |x[i]|^2
  double (*norm2)(const cplx* x, std::size_t n);
  // sum conj(a[i]) * b[i]
  cplx (*cdot)(const cplx* a, const cplx* b, std::size_t n);
  // out (column-major rows x rows) = w A A^* for row-major A (rows x cols)
  void (*gram)(const cplx* a, std::size_t rows, std::size_t cols, double w, cplx* out);
};

const KernelTable& scalar_kernels();
const KernelTable& avx2_kernels();

bool isa_supported(Isa isa);
Isa active_isa();
std::string_view isa_name(Isa isa);
const KernelTable& kernels_for(Isa isa);
const KernelTable& kernels();

inline void cmul(std::span<cplx> x, std::span<const cplx> p) {
  kernels().cmul(x.data(), p.data(), x.size());
}
inline void cmul_scaled(std::span<cplx> x, std::span<const cplx> p, cplx s) {
  kernels().cmul_scaled(x.data(), p.data(), s, x.size());
}
inline void rmul_scaled(std::span<cplx> x, std::span<const double> w, double s) {
  kernels().rmul_scaled(x.data(), w.data(), s, x.size());
}
inline void raxpy(std::span<cplx> y, std::span<const double> w, std::span<const cplx> x) {
  kernels().raxpy(y.data(), w.data(), x.data(), y.size());
}
inline double norm2(std::span<const cplx> x) { return kernels().norm2(x.data(), x.size()); }
inline cplx cdot(std::span<const cplx> a, std::span<const cplx> b) {
  return kernels().cdot(a.data(), b.data(), a.size());
}

}  // namespace bosonlab::simd
