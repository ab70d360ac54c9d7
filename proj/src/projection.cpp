#include "sparsenet/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sparsenet/errors.hpp"
#include "sparsenet/flat_params.hpp"

namespace sparsenet {

std::vector<double> project_l1(std::span<const double> v, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw DomainError("project_l1: radius must be positive and finite");
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw DomainError("project_l1: non-finite input");
  }
  std::vector<double> w(v.begin(), v.end());
  if (l1_norm(v) <= radius) return w;

  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ma = std::abs(v[a]);
    const double mb = std::abs(v[b]);
    return ma != mb ? ma > mb : a < b;
  });

  double prefix = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const double u = std::abs(v[order[j]]);
    prefix += u;
    const double candidate = (prefix - radius) / static_cast<double>(j + 1);
    if (u > candidate) {
      tau = candidate;
    } else {
      break;
    }
  }

  for (std::size_t i = 0; i < w.size(); ++i) {
    const double m = std::abs(v[i]) - tau;
    w[i] = m > 0.0 ? std::copysign(m, v[i]) : 0.0;
  }

  // Rounding can leave the sum a few ulps above the radius; shave the
  // survivors toward zero until the sequential sum is feasible.
  for (int pass = 0; pass < 64 && l1_norm(w) > radius; ++pass) {
    for (double& x : w) {
      if (x != 0.0) x = std::nextafter(x, 0.0);
    }
  }
  if (l1_norm(w) > radius) {
    const double shrink = radius / l1_norm(w) * (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
    for (double& x : w) x *= shrink;
  }
  return w;
}

}  // namespace sparsenet
