#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sparsenet/errors.hpp"
#include "sparsenet/evaluation.hpp"
#include "sparsenet/network.hpp"
#include "sparsenet/network_json.hpp"
#include "sparsenet/rng.hpp"

using namespace sparsenet;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index j = 0;
  for (const auto& row : rows) {
    Eigen::Index i = 0;
    for (double v : row) m(j, i++) = v;
    ++j;
  }
  return m;
}

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

// theta_1 = [[1], [-1]], theta_2 = [[1, 1]]
Network symmetric_net(ActivationKind kind = ActivationKind::Softplus) {
  return Network({mat({{1.0}, {-1.0}}), mat({{1.0, 1.0}})}, kind);
}

double softplus(double z) { return activation_eval(ActivationKind::Softplus, z).value; }

}  // namespace

TEST(Network, RejectsMalformedLayers) {
  EXPECT_THROW(Network({mat({{1.0}})}, ActivationKind::Softplus), ConfigError);
  EXPECT_THROW(Network({mat({{1.0, 2.0}}), mat({{1.0, 1.0}})}, ActivationKind::Softplus), ConfigError);
  EXPECT_THROW(Network({mat({{1.0}, {2.0}}), mat({{1.0, 1.0}, {1.0, 1.0}})}, ActivationKind::Softplus), ConfigError);
  EXPECT_THROW(Network({mat({{NAN}}), mat({{1.0}})}, ActivationKind::Softplus), ConfigError);
  EXPECT_THROW(Network({mat({{1.0}, {2.0}}), mat({{1.0, 1.0, 1.0}})}, ActivationKind::Softplus), ConfigError);
}

TEST(Network, ZeroWeightsGiveZeroOutput) {
  const Network net({Matrix::Zero(4, 3), Matrix::Zero(4, 4), Matrix::Zero(1, 4)}, ActivationKind::Softplus);
  const ForwardTrace trace = forward(net, vec({1.0, -2.0, 3.0}));
  EXPECT_EQ(trace.output(), 0.0);
  for (const Matrix& g : grad_params(net, trace)) EXPECT_EQ(g.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Network, SymmetricNetAtOrigin) {
  const Network net = symmetric_net();
  const ForwardTrace trace = forward(net, vec({0.0}));
  EXPECT_EQ(trace.output(), 0.0);
  EXPECT_EQ(grad_input(net, trace)[0], 0.0);
  EXPECT_DOUBLE_EQ(laplacian_input(net, trace), 0.5);
}

TEST(Network, HandComputedParameterGradient) {
  const Network net = symmetric_net();
  const ForwardTrace trace = forward(net, vec({1.0}));
  const std::vector<Matrix> g = grad_params(net, trace);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_DOUBLE_EQ(g[1](0, 0), softplus(1.0));
  EXPECT_DOUBLE_EQ(g[1](0, 1), softplus(-1.0));
  // df/dtheta_1 = diag(sigma'(z)) theta_2^T x
  const double s1 = activation_eval(ActivationKind::Softplus, 1.0).first;
  const double s2 = activation_eval(ActivationKind::Softplus, -1.0).first;
  EXPECT_DOUBLE_EQ(g[0](0, 0), s1);
  EXPECT_DOUBLE_EQ(g[0](1, 0), s2);
}

TEST(Network, TraceInvariants) {
  Rng rng = make_rng(3);
  const Network net = random_network(7, 10, 4, ActivationKind::Softplus, rng);
  Vector x = Vector::Random(7) * 3.0;
  const ForwardTrace trace = forward(net, x);
  ASSERT_EQ(trace.hidden_layers(), 3u);
  EXPECT_EQ(trace.input(), x);
  for (std::size_t l = 1; l <= 3; ++l) {
    EXPECT_GT(trace.first_deriv(l).minCoeff(), 0.0);
    EXPECT_LT(trace.first_deriv(l).maxCoeff(), 1.0);
    EXPECT_GT(trace.second_deriv(l).minCoeff(), 0.0);
    EXPECT_LE(trace.second_deriv(l).maxCoeff(), 0.25);
  }
  const double out = (net.layer(3) * trace.activation(3))(0, 0);
  EXPECT_NEAR(trace.output(), out, 1e-14 * std::max(1.0, std::abs(out)));
}

TEST(Network, ForwardMatchesNaiveNestedEvaluation) {
  Rng rng = make_rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t depth = 2 + t % 3;
    const std::size_t d = (t % 2) ? 5 : 40;
    const ActivationKind kind = (t % 5 == 0) ? ActivationKind::Relu : ActivationKind::Softplus;
    const Network net = random_network(d, 10, depth, kind, rng);
    std::vector<double> x(d);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : x) v = normal(rng);
    const double expected = oracle::naive_forward(net, x);
    const double got = predict(net, Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(d)));
    EXPECT_NEAR(got, expected, 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST(Network, PredictIsBitIdenticalToForward) {
  Rng rng = make_rng(5);
  const Network net = random_network(20, 10, 3, ActivationKind::Softplus, rng);
  const Vector x = Vector::Random(20);
  EXPECT_EQ(predict(net, x), forward(net, x).output());
}

TEST(Network, DerivativesMatchFiniteDifferences) {
  for (std::size_t depth : {2u, 3u, 4u}) {
    const auto errors = derivative_check(6, 10, depth, 50, 100 + depth);
    for (const DerivativeErrors& e : errors) {
      EXPECT_LE(e.grad_params, 1e-5);
      EXPECT_LE(e.grad_input, 1e-5);
      EXPECT_LE(e.laplacian, 1e-4);
    }
  }
}

TEST(Network, ParameterGradientIsExactDirectionalDerivative) {
  // f is linear in theta_L, so <df/dtheta_L, theta_L> = f exactly
  Rng rng = make_rng(8);
  const Network net = random_network(5, 10, 3, ActivationKind::Softplus, rng);
  const ForwardTrace trace = forward(net, Vector::Random(5));
  const std::vector<Matrix> g = grad_params(net, trace);
  EXPECT_NEAR(g[2].cwiseProduct(net.layer(2)).sum(), trace.output(), 1e-13);
}

TEST(Network, LaplacianOfOneUnitNetIsClosedForm) {
  // f(x) = c sigma(w . x) has Laplacian c sigma''(w . x) ||w||^2
  const Matrix w = mat({{0.3, -1.2, 0.7}});
  const Network net({w, mat({{2.0}})}, ActivationKind::Softplus);
  const Vector x = vec({0.4, 0.1, -0.5});
  const double z = (w * x)(0, 0);
  const double expected = 2.0 * activation_eval(ActivationKind::Softplus, z).second * w.squaredNorm();
  EXPECT_NEAR(laplacian_input(net, forward(net, x)), expected, 1e-15);
}

TEST(Network, ReluLaplacianIsZero) {
  Rng rng = make_rng(2);
  const Network net = random_network(5, 10, 3, ActivationKind::Relu, rng);
  EXPECT_EQ(laplacian_input(net, forward(net, Vector::Random(5))), 0.0);
}

TEST(Network, StaleTraceIsRejected) {
  Rng rng = make_rng(1);
  const Network a = random_network(3, 4, 2, ActivationKind::Softplus, rng);
  const Network b = random_network(3, 4, 2, ActivationKind::Softplus, rng);
  const ForwardTrace trace = forward(a, Vector::Ones(3));
  EXPECT_THROW(grad_params(b, trace), ContractError);
  EXPECT_THROW(grad_input(b, trace), ContractError);
  EXPECT_THROW(laplacian_input(b, trace), ContractError);
  const Network copy = a;
  EXPECT_NO_THROW(grad_input(copy, trace));
}

TEST(Network, InputValidation) {
  const Network net = symmetric_net();
  EXPECT_THROW(forward(net, vec({1.0, 2.0})), ConfigError);
  EXPECT_THROW(forward(net, vec({NAN})), DomainError);
}

TEST(NetworkJson, RoundTripIsBitIdentical) {
  Rng rng = make_rng(21);
  const Network net = random_network(6, 10, 3, ActivationKind::Relu, rng);
  const Network back = network_from_json(nlohmann::json::parse(network_to_json(net).dump()));
  ASSERT_EQ(back.depth(), net.depth());
  EXPECT_EQ(back.activation(), ActivationKind::Relu);
  for (std::size_t l = 0; l < net.depth(); ++l) {
    ASSERT_EQ(back.layer(l).rows(), net.layer(l).rows());
    for (Eigen::Index k = 0; k < net.layer(l).size(); ++k) {
      EXPECT_EQ(back.layer(l).data()[k], net.layer(l).data()[k]);
    }
  }
}

TEST(NetworkJson, SeventeenDigitTextRoundTrips) {
  const auto doc = nlohmann::json::parse(
      R"({"activation": "softplus", "layers": [[[0.10000000000000001, -2.5]], [[3.0000000000000004]]]})");
  const Network net = network_from_json(doc);
  EXPECT_EQ(net.layer(0)(0, 0), 0.1);
  EXPECT_EQ(net.layer(1)(0, 0), 3.0000000000000004);
}

TEST(NetworkJson, MalformedDocumentsThrow) {
  EXPECT_THROW(network_from_json(nlohmann::json::parse(R"({"layers": []})")), ConfigError);
  EXPECT_THROW(network_from_json(nlohmann::json::parse(R"({"activation": "tanh", "layers": [[[1]], [[1]]]})")),
               ConfigError);
  EXPECT_THROW(network_from_json(nlohmann::json::parse(R"({"activation": "relu", "layers": [[[1, 2], [3]], [[1, 1]]]})")),
               ConfigError);
  EXPECT_THROW(network_from_json(nlohmann::json::parse(R"({"activation": "relu", "layers": [[["a"]], [[1]]]})")),
               ConfigError);
}
