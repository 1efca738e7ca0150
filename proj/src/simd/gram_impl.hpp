#pragma once

// Included once per instruction set.

#include <Eigen/Dense>

#include "bosonlab/common.hpp"

namespace bosonlab::simd {
namespace {

// out (column-major, rows x rows) = w * A A^* for row-major A (rows x cols).
void gram_impl(const cplx* a, std::size_t rows, std::size_t cols, double w, cplx* out) {
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Index = Eigen::Index;
  const Eigen::Map<const RowMat> am(a, static_cast<Index>(rows), static_cast<Index>(cols));
  Eigen::Map<Eigen::MatrixXcd> g(out, static_cast<Index>(rows), static_cast<Index>(rows));
  g.setZero();
  g.selfadjointView<Eigen::Lower>().rankUpdate(am, w);
  for (Index c = 1; c < g.cols(); ++c)
    for (Index r = 0; r < c; ++r) g(r, c) = std::conj(g(c, r));
}

}  // namespace
}  // namespace bosonlab::simd
