#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace oracle {

using HP = boost::multiprecision::cpp_dec_float_50;

double naive_forward(const sparsenet::Network& net, const std::vector<double>& x) {
  std::vector<long double> h(x.begin(), x.end());
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const sparsenet::Matrix& w = net.layer(l);
    std::vector<long double> z(static_cast<std::size_t>(w.rows()), 0.0L);
    for (std::size_t j = 0; j < z.size(); ++j) {
      for (std::size_t i = 0; i < h.size(); ++i) {
        z[j] += static_cast<long double>(w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))) * h[i];
      }
    }
    if (l + 1 == net.depth()) return static_cast<double>(z[0]);
    for (long double& v : z) {
      if (net.activation() == sparsenet::ActivationKind::Relu) {
        v = v > 0 ? v : 0.0L;
      } else {
        v = std::log(1.0L + std::exp(v)) - std::log(2.0L);
      }
    }
    h = std::move(z);
  }
  throw std::logic_error("unreachable");
}

std::vector<double> kkt_projection(const std::vector<double>& v, double radius) {
  const std::size_t n = v.size();
  if (n > 16) throw std::invalid_argument("kkt_projection: too many entries");
  double norm = 0.0;
  for (double x : v) norm += std::abs(x);
  if (norm <= radius) return v;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double sum = 0.0;
    double smallest_in = INFINITY;
    double largest_out = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        sum += std::abs(v[i]);
        smallest_in = std::min(smallest_in, std::abs(v[i]));
        ++k;
      } else {
        largest_out = std::max(largest_out, std::abs(v[i]));
      }
    }
    const double tau = (sum - radius) / static_cast<double>(k);
    if (tau >= 0.0 && smallest_in > tau && largest_out <= tau + 1e-15 * std::max(1.0, tau)) {
      std::vector<double> w(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) w[i] = std::copysign(std::abs(v[i]) - tau, v[i]);
      }
      return w;
    }
  }
  throw std::logic_error("kkt_projection: no support satisfied the KKT conditions");
}

double hp_softplus(double z) {
  const HP zz(z);
  return static_cast<double>(log(HP(1) + exp(zz)) - log(HP(2)));
}

double hp_c1(double R, double r, std::size_t L, double P) {
  const HP l(static_cast<double>(L));
  return static_cast<double>(HP(R) / (HP(6) * HP(r) * pow(l, HP(1.5)) * sqrt(HP(2) * log(HP(P)))));
}

namespace {

HP hp_log_factor(const sparsenet::BoundInputs& in) {
  const HP c = HP(hp_c1(in.R, in.r, in.L, in.P));
  const HP raw = HP(1) + log(c * sqrt(HP(in.n))) * sqrt(HP(in.x_inf_sq));
  return raw < 1 ? HP(1) : raw;
}

HP hp_ratio(double r, std::size_t L) {
  const HP m(static_cast<double>(L - 1));
  return pow(HP(r) / m, m);
}

}  // namespace

double hp_rademacher(const sparsenet::BoundInputs& in) {
  const HP l(static_cast<double>(in.L));
  return static_cast<double>(HP(24) * HP(in.r) * hp_ratio(in.r, in.L) * sqrt(HP(2) * l * log(HP(in.P)) / HP(in.n)) *
                             hp_log_factor(in));
}

double hp_derivative_convergence(const sparsenet::BoundInputs& in, int b1_exponent) {
  const HP l(static_cast<double>(in.L));
  const HP r(in.r);
  HP middle = 1;
  if (in.L >= 3) {
    middle = 0;
    for (std::size_t k = 2; k < in.L; ++k) {
      const HP kk(static_cast<double>(k));
      const HP term = pow(r / kk, HP(2) * kk);
      if (term > middle) middle = term;
    }
  }
  const HP quarter = pow(HP(in.n), HP(0.25));
  const HP curvature = pow(r / l, HP(2) * l) * (HP(2) + l * l / HP(8) * middle) / quarter;
  const HP model = HP(48) * (HP(1) + pow(HP(in.b1), HP(b1_exponent))) * HP(in.b0) * r * hp_ratio(in.r, in.L) *
                   sqrt(HP(2) * l * log(HP(in.P))) / quarter * hp_log_factor(in);
  return static_cast<double>(curvature + model);
}

}  // namespace oracle
