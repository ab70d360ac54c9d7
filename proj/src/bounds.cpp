#include "sparsenet/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "sparsenet/errors.hpp"

namespace sparsenet {
namespace {

void require_depth(std::size_t L, const char* op) {
  if (L < 2) throw DomainError(std::string(op) + ": L must be at least 2");
}

// (r / (L-1))^(L-1)
double lipschitz_ratio(double r, std::size_t L) {
  const double m = static_cast<double>(L - 1);
  return std::pow(r / m, m);
}

}  // namespace

void BoundInputs::validate() const {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("bounds: r must be positive");
  if (L < 2) throw DomainError("bounds: L must be at least 2");
  if (!(P > 1.0)) throw DomainError("bounds: P must exceed 1");
  if (!(n >= 1.0)) throw DomainError("bounds: n must be at least 1");
  if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("bounds: R must be positive");
  if (!(b0 >= 0.0) || !std::isfinite(b0)) throw DomainError("bounds: b0 must be non-negative");
  if (!(b1 >= 0.0) || !std::isfinite(b1)) throw DomainError("bounds: b1 must be non-negative");
  if (!(x_inf_sq >= 0.0) || !std::isfinite(x_inf_sq)) throw DomainError("bounds: x_inf_sq must be non-negative");
}

double lipschitz_param_bound(double r, std::size_t L, double x_inf) {
  require_depth(L, "lipschitz_param_bound");
  return std::sqrt(static_cast<double>(L)) * lipschitz_ratio(r, L) * x_inf;
}

double lip_l2pn_bound(double r, std::size_t L, double sample_x_inf_rms) {
  require_depth(L, "lip_l2pn_bound");
  return lipschitz_param_bound(r, L, sample_x_inf_rms);
}

double sup_model_bound(double R, double r, std::size_t L) { return R * grad_l1_bound(r, L); }

double grad_l1_bound(double r, std::size_t L) {
  require_depth(L, "grad_l1_bound");
  const double l = static_cast<double>(L);
  return std::pow(r / l, l);
}

double middle_layer_max(double r, std::size_t L, int power) {
  if (L < 3) return 1.0;
  double best = 0.0;
  for (std::size_t k = 2; k + 1 <= L; ++k) {
    const double kd = static_cast<double>(k);
    best = std::max(best, std::pow(r / kd, power * kd));
  }
  return best;
}

double divergence_bound(double r, std::size_t L) {
  require_depth(L, "divergence_bound");
  return static_cast<double>(L) / 4.0 * grad_l1_bound(r, L) * middle_layer_max(r, L, 1);
}

double c1(double R, double r, std::size_t L, double P) {
  require_depth(L, "c1");
  if (!(P > 1.0)) throw DomainError("c1: P must exceed 1 so that log P > 0");
  if (!(r > 0.0)) throw DomainError("c1: r must be positive");
  const double l = static_cast<double>(L);
  return R / (6.0 * r * std::pow(l, 1.5) * std::sqrt(2.0 * std::log(P)));
}

double log_factor(const BoundInputs& in, bool* clamped) {
  const double raw = 1.0 + std::log(c1(in.R, in.r, in.L, in.P) * std::sqrt(in.n)) * std::sqrt(in.x_inf_sq);
  const bool clamp = raw < 1.0;
  if (clamped) *clamped = clamp;
  return clamp ? 1.0 : raw;
}

double rademacher_bound(const BoundInputs& in) {
  in.validate();
  const double l = static_cast<double>(in.L);
  return 24.0 * in.r * lipschitz_ratio(in.r, in.L) * std::sqrt(2.0 * l * std::log(in.P) / in.n) *
         log_factor(in);
}

double model_convergence_bound(const BoundInputs& in) { return 4.0 * in.b0 * rademacher_bound(in); }

double derivative_convergence_bound(const BoundInputs& in, int b1_exponent) {
  if (b1_exponent != 1 && b1_exponent != 2) {
    throw DomainError("derivative_convergence_bound: b1 exponent must be 1 or 2");
  }
  in.validate();
  const double l = static_cast<double>(in.L);
  const double quarter = std::pow(in.n, 0.25);
  const double curvature = std::pow(in.r / l, 2.0 * l) * (2.0 + l * l / 8.0 * middle_layer_max(in.r, in.L, 2));
  const double score = 1.0 + std::pow(in.b1, b1_exponent);
  const double model = 48.0 * score * in.b0 * in.r * lipschitz_ratio(in.r, in.L) *
                       std::sqrt(2.0 * l * std::log(in.P)) * log_factor(in);
  return (curvature + model) / quarter;
}

BoundReport evaluate_bounds(const BoundInputs& in) {
  in.validate();
  BoundReport out;
  out.lip_param = lipschitz_param_bound(in.r, in.L, in.R);
  out.lip_l2pn = lip_l2pn_bound(in.r, in.L, std::sqrt(in.x_inf_sq));
  out.sup_model = sup_model_bound(in.R, in.r, in.L);
  out.grad_l1 = grad_l1_bound(in.r, in.L);
  out.divergence = divergence_bound(in.r, in.L);
  out.c1 = c1(in.R, in.r, in.L, in.P);
  log_factor(in, &out.log_factor_clamped);
  out.rademacher = rademacher_bound(in);
  out.model_convergence = model_convergence_bound(in);
  out.derivative_convergence = derivative_convergence_bound(in, 1);
  out.derivative_convergence_b1sq = derivative_convergence_bound(in, 2);
  return out;
}

nlohmann::json to_json(const BoundInputs& in) {
  return {{"r", in.r},   {"L", in.L},   {"P", in.P},   {"n", in.n},
          {"R", in.R},   {"b0", in.b0}, {"b1", in.b1}, {"x_inf_sq", in.x_inf_sq}};
}

nlohmann::json to_json(const BoundReport& report) {
  return {{"lip_param", report.lip_param},
          {"lip_l2pn", report.lip_l2pn},
          {"sup_model", report.sup_model},
          {"grad_l1", report.grad_l1},
          {"divergence", report.divergence},
          {"c1", report.c1},
          {"rademacher", report.rademacher},
          {"model_convergence", report.model_convergence},
          {"derivative_convergence", report.derivative_convergence},
          {"derivative_convergence_b1sq", report.derivative_convergence_b1sq},
          {"log_factor_clamped", report.log_factor_clamped}};
}

}  // namespace sparsenet
