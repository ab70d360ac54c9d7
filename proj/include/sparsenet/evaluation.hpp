#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "sparsenet/datagen.hpp"
#include "sparsenet/network.hpp"

namespace sparsenet {

enum class ErrorKind { PredictionL2, GradientL2 };

struct ErrorEstimate {
  double value = 0.0;
  std::size_t n_test = 0;
  ErrorKind kind = ErrorKind::PredictionL2;
};

/// (1/m) sum_j (model(x_j) - teacher(x_j))^2 over the rows of X_test.
/// Throws DomainError on an empty test set, ConfigError on a dimension
/// mismatch.
ErrorEstimate l2_prediction_error(const Network& model, const Network& teacher, const Matrix& X_test);

/// (1/m) sum_j ||grad model(x_j) - grad teacher(x_j)||_2^2.
ErrorEstimate l2_gradient_error(const Network& model, const Network& teacher, const Matrix& X_test);

/// Teacher outputs and input gradients on a fixed test set, so a sweep
/// evaluates the teacher once per cell.
struct TeacherCache {
  Vector values;                  // m
  std::vector<Vector> gradients;  // m vectors of length d
};

TeacherCache cache_teacher(const Network& teacher, const Matrix& X_test);

ErrorEstimate l2_prediction_error(const Network& model, const TeacherCache& teacher, const Matrix& X_test);
ErrorEstimate l2_gradient_error(const Network& model, const TeacherCache& teacher, const Matrix& X_test);

struct GreenCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_gap = 0.0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
};

/// Monte-Carlo check of
///   -E[grad f . grad g] = E[(Delta f + grad f . grad log p) g]
/// with x drawn from `data`. Samples are split into `jobs` fixed chunks
/// with their own streams derived from `seed`, so the result does not
/// depend on the thread count. Throws DomainError unless both networks
/// are softplus.
GreenCheck green_identity_check(const Network& f, const Network& g, const DataSpec& data, std::size_t m,
                                std::uint64_t seed, std::size_t jobs = 1);

nlohmann::json to_json(const GreenCheck& check);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
/// Throws DomainError unless step > 0.
Vector finite_diff_gradient(const Network& net, const Vector& x, double step);

/// (f(x + h e_i) - 2 f(x) + f(x - h e_i)) / h^2 for each i.
Vector finite_diff_hessian_diagonal(const Network& net, const Vector& x, double step);

/// Sum of finite_diff_hessian_diagonal.
double finite_diff_laplacian(const Network& net, const Vector& x, double step);

/// Central differences of the output with respect to every weight, in
/// flatten() order.
std::vector<double> finite_diff_param_gradient(const Network& net, const Vector& x, double step);

/// ||a - b||_inf / max(||a||_inf, ||b||_inf), or 0 when both vanish.
double max_relative_error(const Vector& a, const Vector& b);

/// Errors of the analytic derivatives against finite differences at one
/// random (network, input) draw.
struct DerivativeErrors {
  double grad_params = 0.0;  // max_relative_error, step 1e-4
  double grad_input = 0.0;   // max_relative_error, step 1e-4
  double laplacian = 0.0;    // |exact - fd| / max(|exact|, sum_i |fd_ii|), step 1e-3
};

/// Draws `draws` softplus networks d -> h -> ... -> 1 with N(0, 2/fan_in)
/// weights and standard truncated-normal inputs, and compares every
/// analytic derivative with finite differences.
std::vector<DerivativeErrors> derivative_check(std::size_t d, std::size_t h, std::size_t depth, std::size_t draws,
                                               std::uint64_t seed, std::size_t jobs = 1);

/// Random softplus network d -> h -> ... -> 1 with N(0, 2/fan_in) weights.
Network random_network(std::size_t d, std::size_t h, std::size_t depth, ActivationKind activation, Rng& rng);

}  // namespace sparsenet
