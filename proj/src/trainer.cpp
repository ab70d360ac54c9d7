#include "sparsenet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "kernels.hpp"
#include "sparsenet/csv.hpp"
#include "sparsenet/errors.hpp"
#include "sparsenet/flat_params.hpp"
#include "sparsenet/projection.hpp"
#include "sparsenet/rng.hpp"

namespace sparsenet {

void Architecture::validate() const {
  if (input_dim == 0) throw ConfigError("architecture: input_dim must be positive");
  if (hidden_width == 0) throw ConfigError("architecture: hidden_width must be positive");
  if (depth < 2) throw ConfigError("architecture: depth must be at least 2");
}

std::vector<std::pair<std::size_t, std::size_t>> Architecture::shapes() const {
  validate();
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t fan_in = input_dim;
  for (std::size_t l = 0; l < depth; ++l) {
    const std::size_t rows = (l + 1 == depth) ? 1 : hidden_width;
    out.emplace_back(rows, fan_in);
    fan_in = rows;
  }
  return out;
}

std::size_t Architecture::parameter_count() const {
  std::size_t total = 0;
  for (const auto& [rows, cols] : shapes()) total += rows * cols;
  return total;
}

void TrainConfig::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("train: radius must be positive");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw ConfigError("train: step_size must be positive");
  }
  if (iterations < 1) throw ConfigError("train: iterations must be at least 1");
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) {
    throw ConfigError("train: init_scale must be non-negative");
  }
}

namespace {

using Shapes = std::vector<std::pair<std::size_t, std::size_t>>;
using ConstLayer = Eigen::Map<const Matrix>;
using Layer = Eigen::Map<Matrix>;

// Loss and gradient of the mean squared error over a batch, with all
// buffers kept between calls.
class BatchObjective {
 public:
  BatchObjective(const Shapes& shapes, ActivationKind activation)
      : shapes_(shapes), activation_(activation) {
    std::size_t offset = 0;
    for (const auto& [rows, cols] : shapes_) {
      offsets_.push_back(offset);
      offset += rows * cols;
    }
    total_ = offset;
    const std::size_t hidden = shapes_.size() - 1;
    acts_.resize(hidden + 1);
    derivs_.resize(hidden + 1);
  }

  std::size_t parameter_count() const { return total_; }

  // inputs: d x B with samples in columns
  double loss(std::span<const double> params, const detail::BatchMatrix& inputs, const Vector& targets) {
    forward(params, inputs);
    return (output_.row(0).transpose() - targets).squaredNorm() / static_cast<double>(targets.size());
  }

  double loss_and_gradient(std::span<const double> params, const detail::BatchMatrix& inputs,
                           const Vector& targets, std::vector<double>& grad) {
    forward(params, inputs);
    const auto batch = static_cast<double>(targets.size());
    const Vector residual = output_.row(0).transpose() - targets;
    const double value = residual.squaredNorm() / batch;
    const Vector dloss = (2.0 / batch) * residual;

    grad.assign(total_, 0.0);
    const std::size_t depth = shapes_.size();
    const std::size_t hidden = depth - 1;

    // output layer: dL/dtheta_L = dloss^T H_{L-1}^T
    Layer(grad.data() + offsets_[depth - 1], 1, static_cast<Eigen::Index>(shapes_[depth - 1].second)) =
        (acts_[hidden] * dloss).transpose();

    // adjoint wrt h_{L-1}, one column per sample
    Matrix adjoint = layer(params, depth - 1).transpose() * dloss.transpose();
    for (std::size_t k = hidden; k >= 1; --k) {
      const Matrix delta = derivs_[k].cwiseProduct(adjoint);
      Layer(grad.data() + offsets_[k - 1], static_cast<Eigen::Index>(shapes_[k - 1].first),
            static_cast<Eigen::Index>(shapes_[k - 1].second)) = delta * acts_[k - 1].transpose();
      if (k > 1) adjoint = layer(params, k - 1).transpose() * delta;
    }
    return value;
  }

 private:
  ConstLayer layer(std::span<const double> params, std::size_t l) const {
    return ConstLayer(params.data() + offsets_[l], static_cast<Eigen::Index>(shapes_[l].first),
                      static_cast<Eigen::Index>(shapes_[l].second));
  }

  void forward(std::span<const double> params, const detail::BatchMatrix& inputs) {
    const std::size_t depth = shapes_.size();
    acts_[0] = inputs;
    for (std::size_t k = 1; k < depth; ++k) {
      detail::matmul_batch(layer(params, k - 1), acts_[k - 1], z_);
      acts_[k].resize(z_.rows(), z_.cols());
      derivs_[k].resize(z_.rows(), z_.cols());
      for (Eigen::Index j = 0; j < z_.rows(); ++j) {
        for (Eigen::Index b = 0; b < z_.cols(); ++b) {
          const ActivationValue a = activation_eval(activation_, z_(j, b));
          acts_[k](j, b) = a.value;
          derivs_[k](j, b) = a.first;
        }
      }
    }
    detail::matmul_batch(layer(params, depth - 1), acts_[depth - 1], output_);
  }

  Shapes shapes_;
  ActivationKind activation_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
  std::vector<detail::BatchMatrix> acts_;    // h_0 .. h_{L-1}
  std::vector<detail::BatchMatrix> derivs_;  // index k holds h'_k
  detail::BatchMatrix z_;
  detail::BatchMatrix output_;
};

detail::BatchMatrix gather_columns(const Matrix& X, std::span<const std::size_t> rows) {
  detail::BatchMatrix out(X.cols(), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t b = 0; b < rows.size(); ++b) {
    out.col(static_cast<Eigen::Index>(b)) = X.row(static_cast<Eigen::Index>(rows[b])).transpose();
  }
  return out;
}

Vector gather(const Vector& y, std::span<const std::size_t> rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t b = 0; b < rows.size(); ++b) out[static_cast<Eigen::Index>(b)] = y[static_cast<Eigen::Index>(rows[b])];
  return out;
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

Shapes shapes_of(const Network& net) {
  Shapes out;
  for (const Matrix& w : net.layers()) out.emplace_back(w.rows(), w.cols());
  return out;
}

}  // namespace

Network initial_network(const Architecture& arch, const TrainConfig& cfg) {
  cfg.validate();
  FlatParams flat;
  flat.shapes = arch.shapes();
  Rng rng = make_rng(derive_seed(cfg.seed, {0}));
  for (const auto& [rows, cols] : flat.shapes) {
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(cols)));
    for (std::size_t i = 0; i < rows * cols; ++i) flat.values.push_back(cfg.init_scale * normal(rng));
  }
  flat.values = project_l1(flat.values, cfg.radius);
  return unflatten(flat, arch.activation);
}

Network train(const Dataset& data, const Architecture& arch, const TrainConfig& cfg,
              const TrainObserver& observer) {
  if (arch.input_dim != data.dim()) {
    throw ConfigError("train: architecture expects " + std::to_string(arch.input_dim) +
                      " inputs, dataset has " + std::to_string(data.dim()));
  }
  return train_from(data, initial_network(arch, cfg), cfg, observer);
}

Network train_from(const Dataset& data, const Network& init, const TrainConfig& cfg,
                   const TrainObserver& observer) {
  cfg.validate();
  if (data.size() == 0) throw ConfigError("train: empty dataset");
  if (init.input_dim() != data.dim()) throw ConfigError("train: input dimension mismatch");

  FlatParams flat = flatten(init);
  flat.values = project_l1(flat.values, cfg.radius);
  BatchObjective objective(flat.shapes, init.activation());

  const std::size_t n = data.size();
  const std::size_t batch = (cfg.batch_size == 0 || cfg.batch_size >= n) ? n : cfg.batch_size;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  const detail::BatchMatrix full_inputs = data.X.transpose();
  Rng shuffle_rng = make_rng(derive_seed(cfg.seed, {1}));
  std::size_t cursor = n;  // forces a shuffle on the first mini-batch

  std::vector<double> grad;
  std::vector<double> stepped(flat.values.size());
  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    double loss;
    try {
      if (batch == n) {
        loss = objective.loss_and_gradient(flat.values, full_inputs, data.y, grad);
      } else {
        if (cursor + batch > n) {
          std::shuffle(order.begin(), order.end(), shuffle_rng);
          cursor = 0;
        }
        const std::span<const std::size_t> rows(order.data() + cursor, batch);
        cursor += batch;
        loss = objective.loss_and_gradient(flat.values, gather_columns(data.X, rows), gather(data.y, rows), grad);
      }
    } catch (const DomainError&) {
      throw TrainingError(it, "train: non-finite pre-activation");
    }
    if (!std::isfinite(loss) || !all_finite(grad)) throw TrainingError(it, "train: loss diverged");

    for (std::size_t i = 0; i < stepped.size(); ++i) stepped[i] = flat.values[i] - cfg.step_size * grad[i];
    if (!all_finite(stepped)) throw TrainingError(it, "train: parameters diverged");
    flat.values = project_l1(stepped, cfg.radius);

    if (observer) observer(TrainStep{it, loss, l1_norm(flat.values)}, flat.values);
  }
  return unflatten(flat, init.activation());
}

double mean_squared_loss(const Network& net, const Dataset& data) {
  if (data.size() == 0) throw ConfigError("mean_squared_loss: empty dataset");
  BatchObjective objective(shapes_of(net), net.activation());
  const FlatParams flat = flatten(net);
  return objective.loss(flat.values, data.X.transpose(), data.y);
}

TrainingLog::TrainingLog(std::ostream& out, const Dataset& data, const Network& shape_of, std::size_t every,
                         std::size_t iterations)
    : out_(&out),
      data_(&data),
      shapes_(shapes_of(shape_of)),
      activation_(shape_of.activation()),
      every_(std::max<std::size_t>(every, 1)),
      iterations_(iterations) {
  *out_ << "iteration,full_batch_loss,l1_norm\n";
}

TrainObserver TrainingLog::observer() {
  return [this](const TrainStep& step, std::span<const double> params) {
    if (step.iteration % every_ != 0 && step.iteration != iterations_) return;
    FlatParams flat{std::vector<double>(params.begin(), params.end()), shapes_};
    const double loss = mean_squared_loss(unflatten(flat, activation_), *data_);
    *out_ << step.iteration << ',' << format_double(loss) << ',' << format_double(step.l1_norm) << '\n';
  };
}

}  // namespace sparsenet
