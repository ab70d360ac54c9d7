#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "sparsenet/datagen.hpp"
#include "sparsenet/network.hpp"

namespace sparsenet {

/// Equal-width hidden layers: d -> h -> ... -> h -> 1 with `depth` weight
/// matrices.
struct Architecture {
  std::size_t input_dim = 100;
  std::size_t hidden_width = 10;
  std::size_t depth = 2;
  ActivationKind activation = ActivationKind::Softplus;

  void validate() const;
  std::vector<std::pair<std::size_t, std::size_t>> shapes() const;
  std::size_t parameter_count() const;
};

struct TrainConfig {
  double radius = 1.0;
  double step_size = 0.05;
  std::size_t iterations = 5000;
  std::size_t batch_size = 0;  // 0 means full batch
  /// Initial weights are N(0, 2/fan_in) times this factor, then projected
  /// onto the ball if they land outside it.
  double init_scale = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainStep {
  std::size_t iteration;  // 1-based, counted after the step
  double batch_loss;      // loss of the batch before the step
  double l1_norm;         // of the projected iterate
};

/// Called after every projected step with the current flat parameters.
using TrainObserver = std::function<void(const TrainStep&, std::span<const double> params)>;

/// Random feasible starting point for `arch`.
Network initial_network(const Architecture& arch, const TrainConfig& cfg);

/// Projected (mini-batch) gradient descent on (1/n) sum (y_i - f(x_i))^2
/// over the l1 ball of radius cfg.radius, starting from initial_network.
/// Deterministic given cfg.seed. Throws TrainingError if the loss or the
/// parameters stop being finite.
Network train(const Dataset& data, const Architecture& arch, const TrainConfig& cfg,
              const TrainObserver& observer = {});

/// Same, starting from `init` (projected first if infeasible).
Network train_from(const Dataset& data, const Network& init, const TrainConfig& cfg,
                   const TrainObserver& observer = {});

/// Full-batch empirical risk (1/n) sum (y_i - f(x_i))^2.
double mean_squared_loss(const Network& net, const Dataset& data);

/// Observer that writes "iteration,full_batch_loss,l1_norm" rows every
/// `every` iterations (and after the last one).
class TrainingLog {
 public:
  TrainingLog(std::ostream& out, const Dataset& data, const Network& shape_of, std::size_t every,
              std::size_t iterations);

  TrainObserver observer();

 private:
  std::ostream* out_;
  const Dataset* data_;
  std::vector<std::pair<std::size_t, std::size_t>> shapes_;
  ActivationKind activation_;
  std::size_t every_;
  std::size_t iterations_;
};

}  // namespace sparsenet
