#include "sparsenet/network.hpp"

#include <cmath>
#include <string>

#include "kernels.hpp"
#include "sparsenet/errors.hpp"

namespace sparsenet {
namespace {

void require_trace(const Network& net, const ForwardTrace& trace, const char* op) {
  if (!trace.produced_by(net)) {
    throw ContractError(std::string(op) + ": trace was not produced by this network");
  }
}

void require_input(const Network& net, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != net.input_dim()) {
    throw ConfigError("forward: input has length " + std::to_string(x.size()) +
                      ", network expects " + std::to_string(net.input_dim()));
  }
  if (!x.allFinite()) throw DomainError("forward: non-finite input");
}

}  // namespace

Network::Network(std::vector<Matrix> layers, ActivationKind activation)
    : activation_(activation) {
  if (layers.size() < 2) {
    throw ConfigError("network needs at least two layers, got " + std::to_string(layers.size()));
  }
  if (layers.back().rows() != 1) throw ConfigError("network output layer must have one row");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].rows() == 0 || layers[l].cols() == 0) {
      throw ConfigError("layer " + std::to_string(l + 1) + " is empty");
    }
    if (l > 0 && layers[l].cols() != layers[l - 1].rows()) {
      throw ConfigError("layer " + std::to_string(l + 1) + " has " +
                        std::to_string(layers[l].cols()) + " columns but layer " +
                        std::to_string(l) + " has " + std::to_string(layers[l - 1].rows()) +
                        " rows");
    }
    if (!layers[l].allFinite()) {
      throw ConfigError("layer " + std::to_string(l + 1) + " has non-finite weights");
    }
  }
  layers_ = std::make_shared<const std::vector<Matrix>>(std::move(layers));
}

std::size_t Network::parameter_count() const {
  std::size_t total = 0;
  for (const auto& w : *layers_) total += static_cast<std::size_t>(w.size());
  return total;
}

ForwardTrace forward(const Network& net, const Vector& x) {
  require_input(net, x);
  const std::size_t depth = net.depth();

  ForwardTrace trace;
  trace.source_ = net.layers_;
  trace.activations_.reserve(depth);
  trace.preactivations_.reserve(depth - 1);
  trace.first_derivs_.reserve(depth - 1);
  trace.second_derivs_.reserve(depth - 1);
  trace.activations_.push_back(x);

  Vector z;
  for (std::size_t l = 0; l + 1 < depth; ++l) {
    detail::matvec(net.layer(l), trace.activations_.back(), z);
    Vector h(z.size()), h1(z.size()), h2(z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      const ActivationValue a = activation_eval(net.activation(), z[j]);
      h[j] = a.value;
      h1[j] = a.first;
      h2[j] = a.second;
    }
    trace.preactivations_.push_back(z);
    trace.activations_.push_back(std::move(h));
    trace.first_derivs_.push_back(std::move(h1));
    trace.second_derivs_.push_back(std::move(h2));
  }
  Vector out;
  detail::matvec(net.layer(depth - 1), trace.activations_.back(), out);
  trace.output_ = out[0];
  return trace;
}

double predict(const Network& net, const Vector& x) {
  require_input(net, x);
  Vector h = x;
  Vector z;
  for (std::size_t l = 0; l + 1 < net.depth(); ++l) {
    detail::matvec(net.layer(l), h, z);
    for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = activation_eval(net.activation(), z[j]).value;
    h.swap(z);
  }
  detail::matvec(net.layer(net.depth() - 1), h, z);
  return z[0];
}

std::vector<Matrix> grad_params(const Network& net, const ForwardTrace& trace) {
  require_trace(net, trace, "grad_params");
  const std::size_t depth = net.depth();
  std::vector<Matrix> grads(depth);

  // a = df/dh_{L-1} = theta_L^T
  Vector a = net.layer(depth - 1).row(0).transpose();
  grads[depth - 1] = trace.activation(depth - 1).transpose();
  Vector next;
  for (std::size_t l = depth - 1; l >= 1; --l) {
    const Vector delta = trace.first_deriv(l).cwiseProduct(a);
    grads[l - 1] = delta * trace.activation(l - 1).transpose();
    if (l > 1) {
      detail::matvec_transposed(net.layer(l - 1), delta, next);
      a.swap(next);
    }
  }
  return grads;
}

Vector grad_input(const Network& net, const ForwardTrace& trace) {
  require_trace(net, trace, "grad_input");
  const std::size_t depth = net.depth();
  Vector a = net.layer(depth - 1).row(0).transpose();
  Vector next;
  for (std::size_t l = depth - 1; l >= 1; --l) {
    const Vector delta = trace.first_deriv(l).cwiseProduct(a);
    detail::matvec_transposed(net.layer(l - 1), delta, next);
    a.swap(next);
  }
  return a;
}

double laplacian_input(const Network& net, const ForwardTrace& trace) {
  require_trace(net, trace, "laplacian_input");
  if (net.activation() == ActivationKind::Relu) return 0.0;
  const std::size_t depth = net.depth();
  const std::size_t hidden = depth - 1;

  // back-propagated signals a_k = df/dh_k, k = 1..L-1
  std::vector<Vector> adjoint(hidden + 1);
  adjoint[hidden] = net.layer(depth - 1).row(0).transpose();
  for (std::size_t k = hidden; k >= 2; --k) {
    const Vector delta = trace.first_deriv(k).cwiseProduct(adjoint[k]);
    detail::matvec_transposed(net.layer(k - 1), delta, adjoint[k - 1]);
  }

  double total = 0.0;
  Matrix jacobian = net.layer(0);  // dz_1/dx
  for (std::size_t k = 1; k <= hidden; ++k) {
    if (k > 1) {
      // J_k = theta_k diag(h'_{k-1}) J_{k-1}
      const Matrix scaled = trace.first_deriv(k - 1).asDiagonal() * jacobian;
      jacobian = net.layer(k - 1) * scaled;
    }
    const Vector& h2 = trace.second_deriv(k);
    for (Eigen::Index j = 0; j < jacobian.rows(); ++j) {
      total += adjoint[k][j] * h2[j] * jacobian.row(j).squaredNorm();
    }
  }
  return total;
}

}  // namespace sparsenet
