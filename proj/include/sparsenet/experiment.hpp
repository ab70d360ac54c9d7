#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsenet/audit.hpp"
#include "sparsenet/bounds.hpp"
#include "sparsenet/datagen.hpp"
#include "sparsenet/evaluation.hpp"
#include "sparsenet/trainer.hpp"

namespace sparsenet {

/// Training radius: either an absolute r or a multiple of the teacher's
/// l1 norm.
struct RadiusRule {
  enum class Kind { Absolute, TeacherMultiple };
  Kind kind = Kind::TeacherMultiple;
  double value = 1.1;

  double resolve(double teacher_l1) const;
};

/// Settings for the `verify` subcommand.
struct VerifyConfig {
  std::vector<std::size_t> dims{5, 100};
  std::vector<std::size_t> depths{2, 3, 4};
  std::size_t hidden_width = 10;
  std::vector<double> radii{1.0};
  bool radius_equals_depth = true;  // also audit at r = L
  std::size_t audit_trials = 1000;
  std::size_t fd_draws = 200;
  double fd_tolerance_grad = 1e-5;
  double fd_tolerance_laplacian = 1e-4;
  std::size_t green_nets = 10;
  std::size_t green_samples = 1000000;
  double green_tolerance = 0.05;
};

/// Training template for the sweep: small initial weights and a budget
/// that stops before the student starts fitting the label noise.
inline TrainConfig sweep_train_defaults() {
  TrainConfig tc;
  tc.iterations = 2000;
  tc.init_scale = 0.1;
  return tc;
}

struct ExperimentConfig {
  TeacherSpec teacher;  // depth, activation and seed are set per cell
  DataSpec data;
  TrainConfig train = sweep_train_defaults();  // radius and seed are set per trial
  std::vector<std::size_t> n_grid{50, 60, 70, 80, 90, 100};
  std::size_t n_test = 10000;
  std::size_t repeats = 100;
  std::vector<ActivationKind> activations{ActivationKind::Softplus, ActivationKind::Relu};
  std::vector<std::size_t> depths{2, 3};
  RadiusRule radius;
  std::uint64_t master_seed = 0;
  std::optional<double> b0;  // overrides the estimate in bound reports
  VerifyConfig verify;

  /// Throws ConfigError on an empty or unsorted n_grid, repeats == 0,
  /// n_test == 0 and on invalid nested specs.
  void validate() const;
};

/// Missing fields keep their defaults; unknown fields and wrong types
/// throw ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Teacher for the cells with `depth` layers. The weights depend on the
/// depth only, so the activation cells of one depth share them.
Network cell_teacher(const ExperimentConfig& cfg, std::size_t depth, ActivationKind activation);

/// Training radius for the cells with `depth` layers.
double cell_radius(const ExperimentConfig& cfg, std::size_t depth);

/// Seed of trial (depth, activation, n, repeat). Pairwise distinct across
/// a sweep.
std::uint64_t trial_seed(std::uint64_t master, std::size_t depth, ActivationKind activation, std::size_t n,
                         std::size_t repeat);

struct TrialResult {
  std::size_t n = 0;
  std::size_t repeat = 0;
  ActivationKind activation = ActivationKind::Softplus;
  std::size_t L = 0;
  std::uint64_t seed = 0;
  double pred_l2 = 0.0;
  double grad_l2 = 0.0;
  double final_train_loss = 0.0;
  double l1_norm_final = 0.0;
  double max_abs_residual = 0.0;  // max over the test set of |f(x) - y|
  bool diverged = false;
};

struct AggregateRow {
  std::size_t n = 0;
  ActivationKind activation = ActivationKind::Softplus;
  std::size_t L = 0;
  double pred_l2_mean = 0.0;
  double pred_l2_std = 0.0;
  double grad_l2_mean = 0.0;
  double grad_l2_std = 0.0;
  std::size_t completed = 0;  // trials that did not diverge
};

struct ExperimentResult {
  std::vector<TrialResult> trials;
  std::vector<AggregateRow> aggregates;
  /// True if every trial of some (n, activation, L) cell diverged.
  bool cell_fully_diverged = false;
  /// max |f(x) - y| over the test sets across all completed trials.
  double b0_estimate = 0.0;
};

/// Called after each finished trial with (finished, total).
using Progress = std::function<void(std::size_t, std::size_t)>;

/// Runs the sweep over depths x activations x n_grid x repeats on `jobs`
/// threads. Results are ordered by those coordinates regardless of jobs.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs = 1, const Progress& progress = {});

/// Mean and sample standard deviation over the completed trials of each
/// cell, in first-appearance order of the cells.
std::vector<AggregateRow> aggregate(const std::vector<TrialResult>& trials);

void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials);
std::vector<TrialResult> read_trials_csv(std::istream& in);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

/// Monte-Carlo estimate of E ||x||_inf^2 under `data` in dimension d.
double estimate_x_inf_sq(const DataSpec& data, std::size_t d, std::size_t samples, std::uint64_t seed);

/// max over a fresh noisy test set of |model(x) - y|, with y generated by
/// the teacher of the model's depth.
double estimate_b0(const ExperimentConfig& cfg, const Network& model);

/// Default b0 without a trained model: 2 R (r/L)^L + cutoff * noise_std,
/// i.e. sup |f| + sup |f_0| + sup |noise| on the ball.
double default_b0(const ExperimentConfig& cfg, double radius, std::size_t depth);

/// Bound report for every depth (or only the model's) and every n in the
/// grid. b0 comes from, in order: `b0_override`, cfg.b0, `model`, the
/// default above.
nlohmann::json report_bounds(const ExperimentConfig& cfg, const std::optional<Network>& model = std::nullopt,
                             std::optional<double> b0_override = std::nullopt);

/// Runs the bound audit, the finite-difference suites and the Green
/// check. One BoundCheck per suite; worst_ratio is the worst value over
/// its threshold for the numeric suites.
std::vector<BoundCheck> run_verification(const ExperimentConfig& cfg, std::size_t jobs = 1,
                                         double grad_bound_scale = 1.0);

/// Green checks on `nets` random small softplus pairs with d cycling
/// through 1, 2, 3.
std::vector<GreenCheck> green_suite(std::size_t nets, std::size_t samples, std::uint64_t seed, std::size_t jobs = 1);

}  // namespace sparsenet
