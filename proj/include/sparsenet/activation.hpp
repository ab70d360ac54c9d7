#pragma once

#include <string>
#include <string_view>

namespace sparsenet {

enum class ActivationKind { Softplus, Relu };

/// sigma(z) together with its first and second derivative.
struct ActivationValue {
  double value;
  double first;
  double second;
};

/// Evaluates the activation at z.
///
/// Softplus is shifted so that sigma(0) == 0:
///   sigma(z)   = log(1 + e^z) - log 2
///   sigma'(z)  = e^z / (1 + e^z)
///   sigma''(z) = sigma'(z) (1 - sigma'(z))
/// and is stable for |z| up to several hundred.
///
/// Relu uses sigma'(0) = 0 and reports sigma'' = 0 everywhere.
///
/// Throws DomainError if z is not finite.
ActivationValue activation_eval(ActivationKind kind, double z);

std::string_view to_string(ActivationKind kind);

/// Accepts "softplus" or "relu"; throws ConfigError otherwise.
ActivationKind activation_from_string(std::string_view name);

}  // namespace sparsenet
