#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sparsenet/network.hpp"
#include "sparsenet/rng.hpp"

namespace sparsenet {

/// One architecture and radius to audit.
struct AuditSpec {
  std::size_t input_dim = 5;
  std::size_t hidden_width = 10;
  std::size_t depth = 2;
  double radius = 1.0;
  double input_bound = 10.0;  // R
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  ActivationKind activation = ActivationKind::Softplus;
  /// Multiplies the gradient l1 bound before checking; 1 except in
  /// mutation tests.
  double grad_bound_scale = 1.0;
  std::size_t jobs = 1;

  void validate() const;
};

struct BoundCheck {
  std::string name;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max over trials of value / bound
};

/// Relative slack allowed before a value counts as a violation.
inline constexpr double kAuditSlack = 1e-9;

/// Ways of drawing a network with ||Theta||_1 <= r.
enum class DrawKind {
  DenseBoundary,  // Gaussian with random per-layer scales, scaled onto the sphere
  DenseInterior,  // same, scaled to a uniform fraction of r
  SparsePath,     // a single input-to-output path carrying the whole budget
  SparseRandom,   // a few nonzeros per layer, scaled onto the sphere
};

/// Layer shapes d -> h -> ... -> h -> 1.
std::vector<std::pair<std::size_t, std::size_t>> chain_shapes(std::size_t d, std::size_t h, std::size_t depth);

/// Random network with ||Theta||_1 <= r (sampled, then projected).
/// `path_input` receives the input index of a SparsePath draw and is
/// left untouched otherwise.
Network draw_network(const std::vector<std::pair<std::size_t, std::size_t>>& shapes, double radius, DrawKind kind,
                     ActivationKind activation, Rng& rng, std::size_t* path_input = nullptr);

/// Samples `trials` (network, input) draws and checks the parameter
/// Lipschitz bound, the sup bound, the gradient l1 bound and (for
/// softplus) the divergence bound on each.
std::vector<BoundCheck> verify_bounds(const AuditSpec& spec);

/// Header bound_name,trials,violations,worst_ratio.
void write_checks_csv(std::ostream& out, const std::vector<BoundCheck>& checks);

std::size_t total_violations(const std::vector<BoundCheck>& checks);

}  // namespace sparsenet
