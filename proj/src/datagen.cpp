#include "sparsenet/datagen.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "sparsenet/csv.hpp"
#include "sparsenet/errors.hpp"

namespace sparsenet {

void TeacherSpec::validate() const {
  if (d == 0) throw ConfigError("teacher: d must be positive");
  if (s < 1 || s > d) {
    throw DomainError("teacher: need 1 <= s <= d, got s=" + std::to_string(s) +
                      " d=" + std::to_string(d));
  }
  if (hidden_width < 1) throw ConfigError("teacher: hidden width must be positive");
  if (depth < 2) throw ConfigError("teacher: depth must be at least 2");
}

void DataSpec::validate() const {
  if (!(x_std > 0.0)) throw ConfigError("data: x_std must be positive");
  if (!(noise_std >= 0.0)) throw ConfigError("data: noise_std must be non-negative");
  if (!(cutoff_factor > 0.0)) throw ConfigError("data: cutoff_factor must be positive");
  if (!std::isfinite(mean)) throw ConfigError("data: mean must be finite");
}

double sample_truncated_normal(double mean, double std, double cutoff, Rng& rng) {
  if (!(std > 0.0)) throw DomainError("truncated normal: std must be positive");
  if (!(cutoff > 0.0)) throw DomainError("truncated normal: cutoff must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    const double z = normal(rng);
    if (std::abs(z) <= cutoff) return mean + std * z;
  }
}

Network make_teacher(const TeacherSpec& spec, Rng& rng) {
  spec.validate();
  std::vector<Matrix> layers;
  std::size_t fan_in = spec.d;
  for (std::size_t l = 0; l < spec.depth; ++l) {
    const std::size_t rows = (l + 1 == spec.depth) ? 1 : spec.hidden_width;
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    Matrix w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(fan_in));
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
      for (Eigen::Index i = 0; i < w.cols(); ++i) w(j, i) = normal(rng);
    }
    layers.push_back(std::move(w));
    fan_in = rows;
  }
  // only the first s inputs drive the teacher
  const auto irrelevant = static_cast<Eigen::Index>(spec.d - spec.s);
  layers.front().rightCols(irrelevant).setZero();
  return Network(std::move(layers), spec.activation);
}

Network make_teacher(const TeacherSpec& spec) {
  Rng rng = make_rng(spec.seed);
  return make_teacher(spec, rng);
}

Matrix sample_inputs(std::size_t n, std::size_t d, const DataSpec& data, Rng& rng) {
  data.validate();
  Matrix X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index b = 0; b < X.rows(); ++b) {
    for (Eigen::Index i = 0; i < X.cols(); ++i) {
      X(b, i) = sample_truncated_normal(data.mean, data.x_std, data.cutoff_factor, rng);
    }
  }
  return X;
}

Dataset synthesize(const Network& teacher, std::size_t n, const DataSpec& data, Rng& rng) {
  Dataset out;
  out.data = data;
  out.X = sample_inputs(n, teacher.input_dim(), data, rng);
  out.y.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index b = 0; b < out.X.rows(); ++b) {
    const double noise = data.noise_std > 0.0
                             ? sample_truncated_normal(0.0, data.noise_std, data.cutoff_factor, rng)
                             : 0.0;
    out.y[b] = predict(teacher, out.X.row(b).transpose()) + noise;
  }
  return out;
}

namespace {

void require_inside(const Vector& x, const DataSpec& data, const char* op) {
  data.validate();
  const double bound = data.input_bound();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(std::abs(x[i] - data.mean) <= bound)) {
      throw DomainError(std::string(op) + ": point outside the truncation box");
    }
  }
}

}  // namespace

double log_density(const Vector& x, const DataSpec& data) {
  require_inside(x, data, "log_density");
  // per-coordinate mass of the untruncated normal inside the box
  const double mass = std::erf(data.cutoff_factor / std::numbers::sqrt2);
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi) - std::log(data.x_std) - std::log(mass);
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double u = (x[i] - data.mean) / data.x_std;
    total += log_norm - 0.5 * u * u;
  }
  return total;
}

Vector grad_log_density(const Vector& x, const DataSpec& data) {
  require_inside(x, data, "grad_log_density");
  const double inv_var = 1.0 / (data.x_std * data.x_std);
  return -(x.array() - data.mean).matrix() * inv_var;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t i = 0; i < data.dim(); ++i) out << 'x' << (i + 1) << ',';
  out << "y\n";
  for (Eigen::Index b = 0; b < data.X.rows(); ++b) {
    for (Eigen::Index i = 0; i < data.X.cols(); ++i) out << format_double(data.X(b, i)) << ',';
    out << format_double(data.y[b]) << '\n';
  }
}

}  // namespace sparsenet
