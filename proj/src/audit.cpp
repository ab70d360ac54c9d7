#include "sparsenet/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "sparsenet/bounds.hpp"
#include "sparsenet/csv.hpp"
#include "sparsenet/errors.hpp"
#include "sparsenet/flat_params.hpp"
#include "sparsenet/parallel.hpp"
#include "sparsenet/projection.hpp"

namespace sparsenet {

void AuditSpec::validate() const {
  if (input_dim == 0 || hidden_width == 0) throw ConfigError("audit: dimensions must be positive");
  if (depth < 2) throw ConfigError("audit: depth must be at least 2");
  if (!(radius > 0.0)) throw ConfigError("audit: radius must be positive");
  if (!(input_bound > 0.0)) throw ConfigError("audit: input bound must be positive");
  if (trials < 1) throw ConfigError("audit: trials must be at least 1");
  if (!(grad_bound_scale > 0.0)) throw ConfigError("audit: bound scale must be positive");
}

std::vector<std::pair<std::size_t, std::size_t>> chain_shapes(std::size_t d, std::size_t h, std::size_t depth) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t fan_in = d;
  for (std::size_t l = 0; l < depth; ++l) {
    const std::size_t rows = (l + 1 == depth) ? 1 : h;
    out.emplace_back(rows, fan_in);
    fan_in = rows;
  }
  return out;
}

namespace {

using Shapes = std::vector<std::pair<std::size_t, std::size_t>>;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t pick(Rng& rng, std::size_t count) {
  return std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
}

double random_sign(Rng& rng) { return std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0; }

// Fills `values` with Gaussian entries whose per-layer scale varies over a
// few orders of magnitude, optionally keeping only a few entries per row.
void fill_gaussian(const Shapes& shapes, bool sparse, Rng& rng, std::vector<double>& values) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& [rows, cols] : shapes) {
    const double scale = std::exp(normal(rng));
    const double keep = sparse ? std::min(1.0, 2.0 / static_cast<double>(cols)) : 1.0;
    std::bernoulli_distribution kept(keep);
    for (std::size_t i = 0; i < rows * cols; ++i) values.push_back(kept(rng) ? scale * normal(rng) : 0.0);
  }
}

void scale_to(std::vector<double>& values, double target) {
  const double norm = l1_norm(values);
  if (norm == 0.0) return;
  for (double& v : values) v *= target / norm;
}

// Budget per layer: either balanced or a uniform point on the simplex.
std::vector<double> split_budget(std::size_t depth, double radius, Rng& rng) {
  std::vector<double> parts(depth, radius / static_cast<double>(depth));
  if (std::bernoulli_distribution(0.5)(rng)) {
    std::exponential_distribution<double> expo(1.0);
    double total = 0.0;
    for (double& p : parts) total += (p = expo(rng));
    for (double& p : parts) p *= radius / total;
  }
  return parts;
}

Vector draw_input(std::size_t d, double bound, std::size_t mode, Rng& rng) {
  Vector x(static_cast<Eigen::Index>(d));
  std::normal_distribution<double> normal(0.0, bound / 10.0);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    switch (mode % 4) {
      case 0: x[i] = std::clamp(normal(rng), -bound, bound); break;
      case 1: x[i] = uniform(rng, -bound, bound); break;
      case 2: x[i] = random_sign(rng) * bound; break;
      default: x[i] = 0.0; break;
    }
  }
  return x;
}

double ratio(double value, double bound) {
  if (bound > 0.0) return value / bound;
  return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

struct TrialRatios {
  double lipschitz = 0.0;
  double sup = 0.0;
  double grad = 0.0;
  double divergence = 0.0;
};

}  // namespace

Network draw_network(const Shapes& shapes, double radius, DrawKind kind, ActivationKind activation, Rng& rng,
                     std::size_t* path_input) {
  std::vector<double> values;
  switch (kind) {
    case DrawKind::DenseBoundary:
      fill_gaussian(shapes, false, rng, values);
      scale_to(values, radius);
      break;
    case DrawKind::DenseInterior:
      fill_gaussian(shapes, false, rng, values);
      scale_to(values, radius * uniform(rng, 0.0, 1.0));
      break;
    case DrawKind::SparseRandom:
      fill_gaussian(shapes, true, rng, values);
      scale_to(values, radius);
      break;
    case DrawKind::SparsePath: {
      const std::vector<double> budget = split_budget(shapes.size(), radius, rng);
      std::size_t offset = 0;
      std::size_t from = pick(rng, shapes.front().second);
      if (path_input) *path_input = from;
      for (std::size_t l = 0; l < shapes.size(); ++l) {
        const auto [rows, cols] = shapes[l];
        values.resize(offset + rows * cols, 0.0);
        const std::size_t to = pick(rng, rows);
        values[offset + to * cols + from] = random_sign(rng) * budget[l];
        offset += rows * cols;
        from = to;
      }
      break;
    }
  }
  FlatParams flat{project_l1(values, radius), shapes};
  return unflatten(flat, activation);
}

std::vector<BoundCheck> verify_bounds(const AuditSpec& spec) {
  spec.validate();
  const Shapes shapes = chain_shapes(spec.input_dim, spec.hidden_width, spec.depth);
  const double r = spec.radius;
  const std::size_t L = spec.depth;
  const double R = spec.input_bound;
  const double lip_constant = lipschitz_param_bound(r, L, 1.0);
  const double sup_bound = sup_model_bound(R, r, L);
  const double grad_bound = grad_l1_bound(r, L) * spec.grad_bound_scale;
  const double div_bound = divergence_bound(r, L);
  const bool check_divergence = spec.activation == ActivationKind::Softplus;

  std::vector<TrialRatios> results(spec.trials);
  parallel_for(spec.trials, spec.jobs, [&](std::size_t t) {
    Rng rng = make_rng(derive_seed(spec.seed, {t}));
    const auto kind = static_cast<DrawKind>(t % 4);
    std::size_t path_input = 0;
    const Network net = draw_network(shapes, r, kind, spec.activation, rng, &path_input);

    Vector x = draw_input(spec.input_dim, R, t / 4, rng);
    if (kind == DrawKind::SparsePath && std::bernoulli_distribution(0.5)(rng)) {
      // push the path's first unit into its saturated regime
      const double w = net.layer(0).col(static_cast<Eigen::Index>(path_input)).sum();
      x[static_cast<Eigen::Index>(path_input)] = (w >= 0.0 ? R : -R);
    }

    const ForwardTrace trace = forward(net, x);
    TrialRatios& out = results[t];
    out.sup = ratio(std::abs(trace.output()), sup_bound);
    out.grad = ratio(grad_input(net, trace).lpNorm<1>(), grad_bound);
    if (check_divergence) out.divergence = ratio(std::abs(laplacian_input(net, trace)), div_bound);

    // second network: an independent draw or a small perturbation
    Network other = net;
    if (std::bernoulli_distribution(0.5)(rng)) {
      other = draw_network(shapes, r, kind, spec.activation, rng);
    } else {
      FlatParams flat = flatten(net);
      std::normal_distribution<double> normal(0.0, 1e-3 * r / std::sqrt(static_cast<double>(flat.values.size())));
      for (double& v : flat.values) v += normal(rng);
      flat.values = project_l1(flat.values, r);
      other = unflatten(flat, spec.activation);
    }
    const double gap = std::abs(trace.output() - predict(other, x));
    out.lipschitz = ratio(gap, lip_constant * x.lpNorm<Eigen::Infinity>() * param_frobenius_distance(net, other));
  });

  std::vector<BoundCheck> checks{{"lipschitz_param"}, {"sup_model"}, {"grad_l1"}};
  if (check_divergence) checks.push_back({"divergence"});
  for (BoundCheck& c : checks) c.trials = spec.trials;
  auto record = [](BoundCheck& check, double value) {
    check.worst_ratio = std::max(check.worst_ratio, value);
    if (value > 1.0 + kAuditSlack) ++check.violations;
  };
  for (const TrialRatios& t : results) {
    record(checks[0], t.lipschitz);
    record(checks[1], t.sup);
    record(checks[2], t.grad);
    if (check_divergence) record(checks[3], t.divergence);
  }
  return checks;
}

void write_checks_csv(std::ostream& out, const std::vector<BoundCheck>& checks) {
  out << "bound_name,trials,violations,worst_ratio\n";
  for (const BoundCheck& c : checks) {
    out << c.name << ',' << c.trials << ',' << c.violations << ',' << format_double(c.worst_ratio) << '\n';
  }
}

std::size_t total_violations(const std::vector<BoundCheck>& checks) {
  std::size_t total = 0;
  for (const BoundCheck& c : checks) total += c.violations;
  return total;
}

}  // namespace sparsenet
