#include "gram.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include "gram_impl.hpp"

namespace bosonlab::simd {

void gram_avx2(const cplx* a, std::size_t rows, std::size_t cols, double w, cplx* out) {
  if (rows * cols >= (std::size_t{1} << 31)) return gram_scalar(a, rows, cols, w, out);
  gram_impl(a, rows, cols, w, out);
}

}  // namespace bosonlab::simd
#else
namespace bosonlab::simd {

void gram_avx2(const cplx* a, std::size_t rows, std::size_t cols, double w, cplx* out) {
  gram_scalar(a, rows, cols, w, out);
}

}  // namespace bosonlab::simd
#endif
