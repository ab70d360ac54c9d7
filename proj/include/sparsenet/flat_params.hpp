#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sparsenet/network.hpp"

namespace sparsenet {

/// All weights concatenated in layer order, each layer row-major.
struct FlatParams {
  std::vector<double> values;
  std::vector<std::pair<std::size_t, std::size_t>> shapes;  // (d_l, d_{l-1})
};

FlatParams flatten(const Network& net);

/// Inverse of flatten; throws ConfigError if values.size() != sum of shapes.
Network unflatten(const FlatParams& params, ActivationKind activation);

/// Sequential sum of |v_i|; param_l1_norm uses the same order.
double l1_norm(std::span<const double> values);

/// sum_l sum_{k,j} |(theta_l)_{kj}|
double param_l1_norm(const Network& net);

/// sqrt(sum_l ||theta_l||_F^2)
double param_frobenius_distance(const Network& a, const Network& b);

}  // namespace sparsenet
