#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sparsenet/activation.hpp"

namespace sparsenet {

/// Weight matrices are row-major so that flattening, JSON and the
/// inner loops all walk memory in the same order.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

class ForwardTrace;

/// Bias-free dense network
///
///   f(x) = theta_L sigma(theta_{L-1} ... sigma(theta_1 x) ...)
///
/// with theta_l of shape d_l x d_{l-1}, d_0 = input dimension and d_L = 1.
/// Networks are immutable values; copies share the underlying storage.
class Network {
 public:
  /// Validates L >= 2, chained shapes, scalar output and finite weights.
  /// Throws ConfigError on any violation.
  Network(std::vector<Matrix> layers, ActivationKind activation);

  std::size_t depth() const { return layers_->size(); }
  std::size_t input_dim() const { return static_cast<std::size_t>(layers_->front().cols()); }
  std::size_t parameter_count() const;
  ActivationKind activation() const { return activation_; }

  /// Zero-based: layer(0) is theta_1.
  const Matrix& layer(std::size_t index) const { return (*layers_)[index]; }
  std::span<const Matrix> layers() const { return *layers_; }

  /// True if both networks share weight storage, i.e. one is a copy of
  /// the other.
  bool same_weights(const Network& other) const { return layers_ == other.layers_; }

 private:
  friend class ForwardTrace;
  friend ForwardTrace forward(const Network& net, const Vector& x);
  std::shared_ptr<const std::vector<Matrix>> layers_;
  ActivationKind activation_;
};

/// Everything a forward pass caches for derivative computations.
///
/// Hidden layers are indexed 1..L-1 as in the chain-rule formulas;
/// activation(0) is the input itself.
class ForwardTrace {
 public:
  const Vector& input() const { return activations_.front(); }
  const Vector& activation(std::size_t l) const { return activations_[l]; }
  const Vector& preactivation(std::size_t l) const { return preactivations_[l - 1]; }
  const Vector& first_deriv(std::size_t l) const { return first_derivs_[l - 1]; }
  const Vector& second_deriv(std::size_t l) const { return second_derivs_[l - 1]; }
  std::size_t hidden_layers() const { return preactivations_.size(); }
  double output() const { return output_; }

  /// True if this trace was produced by forward() on `net` (or a copy).
  bool produced_by(const Network& net) const { return source_ == net.layers_; }

 private:
  friend ForwardTrace forward(const Network& net, const Vector& x);

  std::shared_ptr<const std::vector<Matrix>> source_;
  std::vector<Vector> activations_;     // h_0 .. h_{L-1}
  std::vector<Vector> preactivations_;  // z_1 .. z_{L-1}
  std::vector<Vector> first_derivs_;    // h'_1 .. h'_{L-1}
  std::vector<Vector> second_derivs_;   // h''_1 .. h''_{L-1}
  double output_ = 0.0;
};

/// Runs the network on x and caches h_l, z_l, h'_l and h''_l.
/// Throws ConfigError if x has the wrong length and DomainError if it
/// is not finite.
ForwardTrace forward(const Network& net, const Vector& x);

/// Output only; bit-identical to forward(net, x).output().
double predict(const Network& net, const Vector& x);

/// d f / d theta_l for every layer, via
///   df/dtheta_l = (h'_l (.) theta_{l+1}^T ... h'_{L-1} (.) theta_L^T) h_{l-1}^T.
/// Throws ContractError if the trace came from another network.
std::vector<Matrix> grad_params(const Network& net, const ForwardTrace& trace);

/// Input gradient theta_1^T (h'_1 (.) theta_2^T ... (h'_{L-1} (.) theta_L^T)).
Vector grad_input(const Network& net, const ForwardTrace& trace);

/// Exact input Laplacian sum_i d^2 f / dx_i^2.
///
/// Writing a_k = df/dh_k for the back-propagated signal and J_k = dz_k/dx
/// for the Jacobian of layer k's pre-activation,
///
///   Delta f = sum_k sum_j a_kj h''_kj ||row_j(J_k)||^2,
///
/// with J_1 = theta_1 and J_{k+1} = theta_{k+1} diag(h'_k) J_k.
/// Cost is O(d L h^2). Relu networks return 0.
double laplacian_input(const Network& net, const ForwardTrace& trace);

}  // namespace sparsenet
