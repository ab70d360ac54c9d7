#pragma once

#include <cstddef>

#include <json.hpp>

namespace sparsenet {

/// Scalars the closed-form bounds are evaluated from.
struct BoundInputs {
  double r = 1.0;         // l1 radius of the parameter ball
  std::size_t L = 2;      // number of weight matrices
  double P = 2.0;         // parameter count (real so tests can pick P = e^2)
  double n = 1.0;         // sample size
  double R = 1.0;         // sup-norm bound on the inputs
  double b0 = 1.0;        // sup |f(x) - y|
  double b1 = 1.0;        // sup |d/dx_i log p(x)|
  double x_inf_sq = 1.0;  // E ||x||_inf^2

  /// Throws DomainError unless r and R are positive, b0, b1 and x_inf_sq
  /// are non-negative, L >= 2, P > 1 and n >= 1.
  void validate() const;
};

struct BoundReport {
  double lip_param = 0.0;
  double lip_l2pn = 0.0;
  double sup_model = 0.0;
  double grad_l1 = 0.0;
  double divergence = 0.0;
  double c1 = 0.0;
  double rademacher = 0.0;
  double model_convergence = 0.0;
  double derivative_convergence = 0.0;       // (1 + b1) variant
  double derivative_convergence_b1sq = 0.0;  // (1 + b1^2) variant
  bool log_factor_clamped = false;
};

/// sqrt(L) (r / (L-1))^(L-1) x_inf. Throws DomainError if L < 2.
double lipschitz_param_bound(double r, std::size_t L, double x_inf);

/// Same constant with the sample RMS of ||x_i||_inf.
double lip_l2pn_bound(double r, std::size_t L, double sample_x_inf_rms);

/// R (r / L)^L
double sup_model_bound(double R, double r, std::size_t L);

/// (r / L)^L
double grad_l1_bound(double r, std::size_t L);

/// max_{k in 2..L-1} (r/k)^(power*k); an empty range (L = 2) gives 1.
double middle_layer_max(double r, std::size_t L, int power = 1);

/// (L/4) (r/L)^L max_{k in 2..L-1} (r/k)^k, with the empty max taken as 1.
double divergence_bound(double r, std::size_t L);

/// R / (6 r L^{3/2} sqrt(2 log P)). Throws DomainError if P <= 1.
double c1(double R, double r, std::size_t L, double P);

/// 1 + log(c1 sqrt(n)) sqrt(x_inf_sq), clamped below at 1. `clamped` is
/// set when the clamp was applied.
double log_factor(const BoundInputs& in, bool* clamped = nullptr);

/// 24 r (r/(L-1))^(L-1) sqrt(2 L log P / n) * log_factor
double rademacher_bound(const BoundInputs& in);

/// 4 b0 rademacher_bound
double model_convergence_bound(const BoundInputs& in);

/// n^{-1/4} (r/L)^{2L} (2 + (L^2/8) max_k (r/k)^{2k})
///   + 48 (1 + b1^e) b0 r (r/(L-1))^(L-1) sqrt(2 L log P) / n^{1/4} * log_factor
/// with e = b1_exponent in {1, 2}.
double derivative_convergence_bound(const BoundInputs& in, int b1_exponent);

BoundReport evaluate_bounds(const BoundInputs& in);

nlohmann::json to_json(const BoundInputs& in);
nlohmann::json to_json(const BoundReport& report);

}  // namespace sparsenet
