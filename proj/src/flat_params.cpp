#include "sparsenet/flat_params.hpp"

#include <cmath>
#include <string>

#include "sparsenet/errors.hpp"

namespace sparsenet {

FlatParams flatten(const Network& net) {
  FlatParams flat;
  flat.values.reserve(net.parameter_count());
  for (const Matrix& w : net.layers()) {
    flat.shapes.emplace_back(w.rows(), w.cols());
    // row-major storage is already the flattening order
    flat.values.insert(flat.values.end(), w.data(), w.data() + w.size());
  }
  return flat;
}

Network unflatten(const FlatParams& params, ActivationKind activation) {
  std::size_t expected = 0;
  for (const auto& [rows, cols] : params.shapes) expected += rows * cols;
  if (expected != params.values.size()) {
    throw ConfigError("unflatten: shapes need " + std::to_string(expected) + " values, got " +
                      std::to_string(params.values.size()));
  }
  std::vector<Matrix> layers;
  layers.reserve(params.shapes.size());
  std::size_t offset = 0;
  for (const auto& [rows, cols] : params.shapes) {
    layers.push_back(Eigen::Map<const Matrix>(params.values.data() + offset,
                                              static_cast<Eigen::Index>(rows),
                                              static_cast<Eigen::Index>(cols)));
    offset += rows * cols;
  }
  return Network(std::move(layers), activation);
}

double l1_norm(std::span<const double> values) {
  double total = 0.0;
  for (double v : values) total += std::abs(v);
  return total;
}

double param_l1_norm(const Network& net) {
  double total = 0.0;
  for (const Matrix& w : net.layers()) {
    for (Eigen::Index i = 0; i < w.size(); ++i) total += std::abs(w.data()[i]);
  }
  return total;
}

double param_frobenius_distance(const Network& a, const Network& b) {
  if (a.depth() != b.depth()) throw ConfigError("frobenius distance: depth mismatch");
  double total = 0.0;
  for (std::size_t l = 0; l < a.depth(); ++l) {
    if (a.layer(l).rows() != b.layer(l).rows() || a.layer(l).cols() != b.layer(l).cols()) {
      throw ConfigError("frobenius distance: shape mismatch in layer " + std::to_string(l + 1));
    }
    total += (a.layer(l) - b.layer(l)).squaredNorm();
  }
  return std::sqrt(total);
}

}  // namespace sparsenet
