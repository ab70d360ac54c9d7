#include "sparsenet/activation.hpp"

#include <cmath>
#include <numbers>

#include "sparsenet/errors.hpp"

namespace sparsenet {
namespace {

constexpr double kBranchCutoff = 30.0;

double logistic(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

ActivationValue activation_eval(ActivationKind kind, double z) {
  if (!std::isfinite(z)) {
    throw DomainError("activation_eval: non-finite pre-activation");
  }
  switch (kind) {
    case ActivationKind::Softplus: {
      double value;
      if (z > kBranchCutoff) {
        value = z - std::numbers::ln2 + std::log1p(std::exp(-z));
      } else {
        // exact for very negative z too: log1p keeps e^z when it is tiny
        value = std::log1p(std::exp(z)) - std::numbers::ln2;
      }
      const double s = logistic(z);
      // 1 - s loses everything for large z, so use s(-z) instead
      const double second = s * logistic(-z);
      return {value, s, second};
    }
    case ActivationKind::Relu:
      if (z > 0.0) return {z, 1.0, 0.0};
      return {0.0, 0.0, 0.0};
  }
  throw DomainError("activation_eval: unknown activation kind");
}

std::string_view to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::Softplus:
      return "softplus";
    case ActivationKind::Relu:
      return "relu";
  }
  return "unknown";
}

ActivationKind activation_from_string(std::string_view name) {
  if (name == "softplus") return ActivationKind::Softplus;
  if (name == "relu") return ActivationKind::Relu;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

}  // namespace sparsenet
