#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>

#include "sparsenet/network.hpp"
#include "sparsenet/rng.hpp"

namespace sparsenet {

/// Sparse teacher network f_0: every layer N(0, 2/h_in) entrywise, with
/// the columns of theta_1 for inputs s+1..d set to exactly zero.
struct TeacherSpec {
  std::size_t d = 100;
  std::size_t s = 5;
  std::size_t depth = 2;
  std::size_t hidden_width = 10;
  ActivationKind activation = ActivationKind::Softplus;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Inputs are iid N(mean, x_std^2) truncated to |x - mean| <= cutoff * x_std,
/// noise is N(0, noise_std^2) truncated the same way. noise_std == 0
/// disables noise.
struct DataSpec {
  double x_std = 1.0;
  double noise_std = 0.1;
  double cutoff_factor = 10.0;
  double mean = 0.0;

  void validate() const;
  /// Sup-norm bound on the inputs.
  double input_bound() const { return cutoff_factor * x_std; }
  /// Sup of |d/dx_i log p(x)| over the truncation box.
  double score_bound() const { return cutoff_factor / x_std; }
};

struct Dataset {
  Matrix X;  // n x d, one sample per row
  Vector y;
  DataSpec data;
  std::uint64_t seed = 0;

  std::size_t size() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(X.cols()); }
};

/// Rejection sampling from N(mean, std^2) conditioned on
/// |x - mean| <= cutoff * std. Throws DomainError if std <= 0 or
/// cutoff <= 0.
double sample_truncated_normal(double mean, double std, double cutoff, Rng& rng);

Network make_teacher(const TeacherSpec& spec, Rng& rng);

/// Uses an Rng seeded from spec.seed.
Network make_teacher(const TeacherSpec& spec);

/// X rows iid from `data`, y = f_0(x) + noise.
Dataset synthesize(const Network& teacher, std::size_t n, const DataSpec& data, Rng& rng);

/// n x d matrix of iid truncated-normal inputs.
Matrix sample_inputs(std::size_t n, std::size_t d, const DataSpec& data, Rng& rng);

/// Log-density of the product truncated normal, including the
/// normalizing constant. Throws DomainError outside the box.
double log_density(const Vector& x, const DataSpec& data);

/// -(x - mean) / x_std^2 componentwise; throws DomainError outside the box.
Vector grad_log_density(const Vector& x, const DataSpec& data);

/// CSV with header x1,...,xd,y and 17 significant digits.
void write_dataset_csv(std::ostream& out, const Dataset& data);

}  // namespace sparsenet
