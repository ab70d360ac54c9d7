#include "sparsenet/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "sparsenet/audit.hpp"
#include "sparsenet/errors.hpp"
#include "sparsenet/flat_params.hpp"
#include "sparsenet/parallel.hpp"

namespace sparsenet {
namespace {

void check_test_set(const Network& model, const Matrix& X_test, const char* op) {
  if (X_test.rows() == 0) throw DomainError(std::string(op) + ": empty test set");
  if (static_cast<std::size_t>(X_test.cols()) != model.input_dim()) {
    throw ConfigError(std::string(op) + ": test inputs have the wrong dimension");
  }
}

void check_cache(const TeacherCache& teacher, const Matrix& X_test, const char* op) {
  if (static_cast<Eigen::Index>(teacher.gradients.size()) != X_test.rows() || teacher.values.size() != X_test.rows()) {
    throw ConfigError(std::string(op) + ": teacher cache does not match the test set");
  }
}

constexpr std::size_t kGreenChunks = 64;

struct GreenSums {
  double lhs = 0.0;
  double rhs = 0.0;
};

}  // namespace

TeacherCache cache_teacher(const Network& teacher, const Matrix& X_test) {
  TeacherCache out;
  out.values.resize(X_test.rows());
  out.gradients.reserve(static_cast<std::size_t>(X_test.rows()));
  for (Eigen::Index j = 0; j < X_test.rows(); ++j) {
    const ForwardTrace trace = forward(teacher, X_test.row(j).transpose());
    out.values[j] = trace.output();
    out.gradients.push_back(grad_input(teacher, trace));
  }
  return out;
}

ErrorEstimate l2_prediction_error(const Network& model, const TeacherCache& teacher, const Matrix& X_test) {
  check_test_set(model, X_test, "l2_prediction_error");
  check_cache(teacher, X_test, "l2_prediction_error");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < X_test.rows(); ++j) {
    const double diff = predict(model, X_test.row(j).transpose()) - teacher.values[j];
    sum += diff * diff;
  }
  return {sum / static_cast<double>(X_test.rows()), static_cast<std::size_t>(X_test.rows()), ErrorKind::PredictionL2};
}

ErrorEstimate l2_gradient_error(const Network& model, const TeacherCache& teacher, const Matrix& X_test) {
  check_test_set(model, X_test, "l2_gradient_error");
  check_cache(teacher, X_test, "l2_gradient_error");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < X_test.rows(); ++j) {
    const ForwardTrace trace = forward(model, X_test.row(j).transpose());
    sum += (grad_input(model, trace) - teacher.gradients[static_cast<std::size_t>(j)]).squaredNorm();
  }
  return {sum / static_cast<double>(X_test.rows()), static_cast<std::size_t>(X_test.rows()), ErrorKind::GradientL2};
}

ErrorEstimate l2_prediction_error(const Network& model, const Network& teacher, const Matrix& X_test) {
  check_test_set(model, X_test, "l2_prediction_error");
  check_test_set(teacher, X_test, "l2_prediction_error");
  return l2_prediction_error(model, cache_teacher(teacher, X_test), X_test);
}

ErrorEstimate l2_gradient_error(const Network& model, const Network& teacher, const Matrix& X_test) {
  check_test_set(model, X_test, "l2_gradient_error");
  check_test_set(teacher, X_test, "l2_gradient_error");
  return l2_gradient_error(model, cache_teacher(teacher, X_test), X_test);
}

GreenCheck green_identity_check(const Network& f, const Network& g, const DataSpec& data, std::size_t m,
                                std::uint64_t seed, std::size_t jobs) {
  if (f.activation() != ActivationKind::Softplus || g.activation() != ActivationKind::Softplus) {
    throw DomainError("green_identity_check: both networks must use softplus");
  }
  if (f.input_dim() != g.input_dim()) throw ConfigError("green_identity_check: input dimensions differ");
  if (m == 0) throw DomainError("green_identity_check: need at least one sample");
  data.validate();

  const std::size_t chunks = std::min(m, kGreenChunks);
  std::vector<GreenSums> partial(chunks);
  parallel_for(chunks, jobs, [&](std::size_t c) {
    Rng rng = make_rng(derive_seed(seed, {c}));
    const std::size_t begin = m * c / chunks;
    const std::size_t end = m * (c + 1) / chunks;
    const Eigen::Index d = static_cast<Eigen::Index>(f.input_dim());
    Vector x(d);
    GreenSums& sums = partial[c];
    for (std::size_t s = begin; s < end; ++s) {
      for (Eigen::Index i = 0; i < d; ++i) {
        x[i] = sample_truncated_normal(data.mean, data.x_std, data.cutoff_factor, rng);
      }
      const ForwardTrace tf = forward(f, x);
      const ForwardTrace tg = forward(g, x);
      const Vector grad_f = grad_input(f, tf);
      sums.lhs -= grad_f.dot(grad_input(g, tg));
      sums.rhs += (laplacian_input(f, tf) + grad_f.dot(grad_log_density(x, data))) * tg.output();
    }
  });

  GreenCheck out;
  for (const GreenSums& p : partial) {
    out.lhs += p.lhs;
    out.rhs += p.rhs;
  }
  out.lhs /= static_cast<double>(m);
  out.rhs /= static_cast<double>(m);
  out.rel_gap = std::abs(out.lhs - out.rhs) / std::max({std::abs(out.lhs), std::abs(out.rhs), 1e-12});
  out.m = m;
  out.seed = seed;
  return out;
}

nlohmann::json to_json(const GreenCheck& check) {
  return {{"lhs", check.lhs}, {"rhs", check.rhs}, {"rel_gap", check.rel_gap}, {"m", check.m}, {"seed", check.seed}};
}

Vector finite_diff_gradient(const Network& net, const Vector& x, double step) {
  if (!(step > 0.0)) throw DomainError("finite_diff_gradient: step must be positive");
  Vector out(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = predict(net, probe);
    probe[i] = x[i] - step;
    const double down = predict(net, probe);
    probe[i] = x[i];
    out[i] = (up - down) / (2.0 * step);
  }
  return out;
}

Vector finite_diff_hessian_diagonal(const Network& net, const Vector& x, double step) {
  if (!(step > 0.0)) throw DomainError("finite_diff_laplacian: step must be positive");
  const double center = predict(net, x);
  Vector out(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = predict(net, probe);
    probe[i] = x[i] - step;
    const double down = predict(net, probe);
    probe[i] = x[i];
    out[i] = (up - 2.0 * center + down) / (step * step);
  }
  return out;
}

double finite_diff_laplacian(const Network& net, const Vector& x, double step) {
  return finite_diff_hessian_diagonal(net, x, step).sum();
}

std::vector<double> finite_diff_param_gradient(const Network& net, const Vector& x, double step) {
  if (!(step > 0.0)) throw DomainError("finite_diff_param_gradient: step must be positive");
  FlatParams flat = flatten(net);
  std::vector<double> out(flat.values.size());
  for (std::size_t p = 0; p < flat.values.size(); ++p) {
    const double saved = flat.values[p];
    flat.values[p] = saved + step;
    const double up = predict(unflatten(flat, net.activation()), x);
    flat.values[p] = saved - step;
    const double down = predict(unflatten(flat, net.activation()), x);
    flat.values[p] = saved;
    out[p] = (up - down) / (2.0 * step);
  }
  return out;
}

double max_relative_error(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ConfigError("max_relative_error: length mismatch");
  const double scale = std::max(a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>());
  if (scale == 0.0) return 0.0;
  return (a - b).lpNorm<Eigen::Infinity>() / scale;
}

Network random_network(std::size_t d, std::size_t h, std::size_t depth, ActivationKind activation, Rng& rng) {
  std::vector<Matrix> layers;
  for (const auto& [rows, cols] : chain_shapes(d, h, depth)) {
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(cols)));
    Matrix w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
      for (Eigen::Index i = 0; i < w.cols(); ++i) w(j, i) = normal(rng);
    }
    layers.push_back(std::move(w));
  }
  return Network(std::move(layers), activation);
}

std::vector<DerivativeErrors> derivative_check(std::size_t d, std::size_t h, std::size_t depth, std::size_t draws,
                                               std::uint64_t seed, std::size_t jobs) {
  std::vector<DerivativeErrors> out(draws);
  const DataSpec inputs;
  parallel_for(draws, jobs, [&](std::size_t t) {
    Rng rng = make_rng(derive_seed(seed, {t}));
    const Network net = random_network(d, h, depth, ActivationKind::Softplus, rng);
    const Matrix x_row = sample_inputs(1, d, inputs, rng);
    const Vector x = x_row.row(0).transpose();
    const ForwardTrace trace = forward(net, x);

    const std::vector<double> fd_params = finite_diff_param_gradient(net, x, 1e-4);
    std::vector<double> exact_params;
    for (const Matrix& g : grad_params(net, trace)) exact_params.insert(exact_params.end(), g.data(), g.data() + g.size());
    const auto as_vector = [](const std::vector<double>& v) {
      return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    };
    out[t].grad_params = max_relative_error(as_vector(exact_params), as_vector(fd_params));
    out[t].grad_input = max_relative_error(grad_input(net, trace), finite_diff_gradient(net, x, 1e-4));

    const Vector diag = finite_diff_hessian_diagonal(net, x, 1e-3);
    const double exact = laplacian_input(net, trace);
    const double scale = std::max(std::abs(exact), diag.lpNorm<1>());
    out[t].laplacian = scale > 0.0 ? std::abs(exact - diag.sum()) / scale : 0.0;
  });
  return out;
}

}  // namespace sparsenet
