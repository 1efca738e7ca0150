#include "gram_impl.hpp"
#include "gram.hpp"

namespace bosonlab::simd {

void gram_scalar(const cplx* a, std::size_t rows, std::size_t cols, double w, cplx* out) {
  gram_impl(a, rows, cols, w, out);
}

}  // namespace bosonlab::simd
