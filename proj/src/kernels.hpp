#pragma once

// Dense kernels shared by the single-sample and batched code paths.
// Every output element is accumulated in ascending index order starting
// from 0.0, so a batched forward pass reproduces the single-sample one
// bit for bit.

#include <cstddef>

#include "sparsenet/network.hpp"

namespace sparsenet::detail {

using BatchMatrix = Matrix;  // features x batch, batch contiguous

// z = W h
template <typename W>
void matvec(const W& weights, const Vector& h, Vector& z) {
  const Eigen::Index rows = weights.rows();
  const Eigen::Index cols = weights.cols();
  z.resize(rows);
  for (Eigen::Index j = 0; j < rows; ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < cols; ++i) acc += weights(j, i) * h[i];
    z[j] = acc;
  }
}

// v = W^T u
template <typename W>
void matvec_transposed(const W& weights, const Vector& u, Vector& v) {
  const Eigen::Index rows = weights.rows();
  const Eigen::Index cols = weights.cols();
  v.setZero(cols);
  for (Eigen::Index j = 0; j < rows; ++j) {
    const double uj = u[j];
    for (Eigen::Index i = 0; i < cols; ++i) v[i] += weights(j, i) * uj;
  }
}

// Z = W H, column b of H is sample b
template <typename W>
void matmul_batch(const W& weights, const BatchMatrix& h, BatchMatrix& z) {
  const Eigen::Index rows = weights.rows();
  const Eigen::Index cols = weights.cols();
  z.setZero(rows, h.cols());
  for (Eigen::Index j = 0; j < rows; ++j) {
    for (Eigen::Index i = 0; i < cols; ++i) {
      const double w = weights(j, i);
      z.row(j) += w * h.row(i);
    }
  }
}

}  // namespace sparsenet::detail
