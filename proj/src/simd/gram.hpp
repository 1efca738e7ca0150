#pragma once

#include <cstddef>

#include "bosonlab/common.hpp"

namespace bosonlab::simd {

void gram_scalar(const cplx* a, std::size_t rows, std::size_t cols, double w, cplx* out);
void gram_avx2(const cplx* a, std::size_t rows, std::size_t cols, double w, cplx* out);

}  // namespace bosonlab::simd
