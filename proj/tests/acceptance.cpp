// Runs acceptance criteria 1-7 and prints one PASS/FAIL line for each.
// Exit status is nonzero if any criterion fails. Criterion numbers given
// on the command line restrict the run to those criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "sparsenet/audit.hpp"
#include "sparsenet/bounds.hpp"
#include "sparsenet/evaluation.hpp"
#include "sparsenet/experiment.hpp"
#include "sparsenet/flat_params.hpp"
#include "sparsenet/projection.hpp"

using namespace sparsenet;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

std::size_t worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

Outcome derivative_correctness() {
  const auto start = Clock::now();
  double grad_params = 0.0, grad_input = 0.0, laplacian = 0.0;
  for (std::size_t L : {2u, 3u, 4u}) {
    for (std::size_t d : {5u, 100u}) {
      for (const DerivativeErrors& e : derivative_check(d, 10, L, 1000, derive_seed(101, {d, L}), worker_count())) {
        grad_params = std::max(grad_params, e.grad_params);
        grad_input = std::max(grad_input, e.grad_input);
        laplacian = std::max(laplacian, e.laplacian);
      }
    }
  }
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = grad_params <= 1e-5 && grad_input <= 1e-5 && laplacian <= 1e-4 && elapsed <= 120.0;
  out.detail = fmt("max rel err params %.2e, input %.2e, ", grad_params, grad_input) +
               fmt("laplacian %.2e; %.1f s", laplacian, elapsed);
  return out;
}

Outcome bound_audit() {
  const auto start = Clock::now();
  std::size_t violations = 0;
  std::size_t min_trials = SIZE_MAX;
  double worst = 0.0;
  for (std::size_t L : {2u, 3u, 4u}) {
    for (std::size_t d : {5u, 100u}) {
      for (double r : {1.0, static_cast<double>(L)}) {
        AuditSpec spec;
        spec.input_dim = d;
        spec.depth = L;
        spec.radius = r;
        spec.trials = 1000;
        spec.seed = derive_seed(202, {d, L, static_cast<std::uint64_t>(r)});
        spec.jobs = worker_count();
        for (const BoundCheck& c : verify_bounds(spec)) {
          violations += c.violations;
          min_trials = std::min(min_trials, c.trials);
          worst = std::max(worst, c.worst_ratio);
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = violations == 0 && min_trials >= 1000 && elapsed <= 120.0;
  out.detail = fmt("%.0f violations, worst value/bound %.6f, ", static_cast<double>(violations), worst) +
               fmt("%.0f draws per bound; %.1f s", static_cast<double>(min_trials), elapsed);
  return out;
}

Outcome projection_exactness() {
  Rng rng = make_rng(303);
  std::uniform_int_distribution<int> dim(1, 10);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> radius(0.05, 3.0);
  double worst = 0.0;
  std::size_t not_idempotent = 0, infeasible = 0;
  for (int t = 0; t < 500; ++t) {
    std::vector<double> v(static_cast<std::size_t>(dim(rng)));
    for (double& x : v) x = normal(rng) * (t % 5 == 0 ? 4.0 : 1.0);
    if (t % 7 == 0 && v.size() > 1) v[1] = -v[0];  // tied magnitudes
    const double r = radius(rng);
    const std::vector<double> w = project_l1(v, r);
    const std::vector<double> ref = oracle::kkt_projection(v, r);
    double dist = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dist += (w[i] - ref[i]) * (w[i] - ref[i]);
    worst = std::max(worst, std::sqrt(dist));
    if (project_l1(w, r) != w) ++not_idempotent;
    if (l1_norm(w) > r) ++infeasible;
  }
  Outcome out;
  out.pass = worst <= 1e-8 && not_idempotent == 0 && infeasible == 0;
  out.detail = fmt("max distance to KKT oracle %.2e, %.0f non-idempotent, ", worst,
                   static_cast<double>(not_idempotent)) +
               fmt("%.0f infeasible over 500 vectors", static_cast<double>(infeasible));
  return out;
}

Outcome green_formula() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (const GreenCheck& c : green_suite(10, 1000000, 404, worker_count())) worst = std::max(worst, c.rel_gap);
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = worst <= 0.05 && elapsed <= 180.0;
  out.detail = fmt("max rel_gap %.4f over 10 nets at m = 1e6; %.1f s", worst, elapsed);
  return out;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

ExperimentConfig sweep_config() {
  ExperimentConfig cfg;
  cfg.repeats = 20;
  cfg.master_seed = 2024;
  return cfg;
}

std::string trials_bytes(const ExperimentResult& result) {
  std::ostringstream out;
  write_trials_csv(out, result.trials);
  return out.str();
}

Outcome trend_reproduction(const ExperimentResult& result, double elapsed) {
  bool ok = true;
  std::string detail;
  const ExperimentConfig cfg = sweep_config();
  auto find = [&](std::size_t L, ActivationKind act, std::size_t n) -> const AggregateRow& {
    for (const AggregateRow& row : result.aggregates) {
      if (row.L == L && row.activation == act && row.n == n) return row;
    }
    throw std::logic_error("missing aggregate row");
  };
  for (std::size_t L : cfg.depths) {
    for (ActivationKind act : cfg.activations) {
      std::vector<double> ns, means;
      for (std::size_t n : cfg.n_grid) {
        ns.push_back(static_cast<double>(n));
        means.push_back(find(L, act, n).pred_l2_mean);
      }
      const double rho = spearman(ns, means);
      const bool decreasing = means.back() < means.front();
      ok = ok && decreasing && rho < 0.0;
      detail += "L" + std::to_string(L) + "/" + std::string(to_string(act)) +
                fmt(" pred %.4f->%.4f rho %.2f; ", means.front(), means.back(), rho);
    }
    std::size_t gap_wins = 0;
    for (std::size_t n : cfg.n_grid) {
      const AggregateRow& soft = find(L, ActivationKind::Softplus, n);
      const AggregateRow& relu = find(L, ActivationKind::Relu, n);
      const bool smaller = soft.grad_l2_mean - soft.pred_l2_mean < relu.grad_l2_mean - relu.pred_l2_mean;
      gap_wins += smaller ? 1 : 0;
    }
    ok = ok && gap_wins == cfg.n_grid.size();
    detail += "L" + std::to_string(L) + fmt(" softplus gap smaller at %.0f/%.0f n; ", static_cast<double>(gap_wins),
                                            static_cast<double>(cfg.n_grid.size()));
  }
  ok = ok && !result.cell_fully_diverged && elapsed <= 1800.0;
  detail += fmt("%.0f s", elapsed);
  return {ok, detail};
}

Outcome rate_sanity() {
  ExperimentConfig cfg;
  cfg.n_grid = {100, 10000, 1000000};
  const json report = report_bounds(cfg);
  double worst_model = 0.0, worst_deriv = 0.0, raw_model = 0.0, raw_deriv = 0.0;
  for (std::size_t L : cfg.depths) {
    std::vector<double> model, deriv, model_raw, deriv_raw;
    for (const json& e : report.at("entries")) {
      if (e.at("L").get<std::size_t>() != L) continue;
      const json& j = e.at("inputs");
      BoundInputs in;
      in.r = j.at("r");
      in.L = j.at("L").get<double>();
      in.P = j.at("P");
      in.n = j.at("n");
      in.R = j.at("R");
      in.b0 = j.at("b0");
      in.b1 = j.at("b1");
      in.x_inf_sq = j.at("x_inf_sq");
      const double logf = log_factor(in);
      const double l = static_cast<double>(L);
      const double grad = grad_l1_bound(in.r, L);
      const double curvature = grad * grad * (2.0 + l * l / 8.0 * middle_layer_max(in.r, L, 2));
      const double quarter = std::pow(in.n, 0.25);
      const double d = e.at("bounds").at("derivative_convergence").get<double>();
      model_raw.push_back(e.at("bounds").at("model_convergence").get<double>());
      deriv_raw.push_back(d);
      model.push_back(model_raw.back() / logf);
      deriv.push_back(curvature / quarter + (d - curvature / quarter) / logf);
    }
    for (std::size_t i = 0; i + 1 < model.size(); ++i) {
      const double step = cfg.n_grid[i + 1] / static_cast<double>(cfg.n_grid[i]);
      worst_model = std::max(worst_model, std::abs(model[i] / model[i + 1] / std::sqrt(step) - 1.0));
      worst_deriv = std::max(worst_deriv, std::abs(deriv[i] / deriv[i + 1] / std::pow(step, 0.25) - 1.0));
      raw_model = std::max(raw_model, std::abs(model_raw[i] / model_raw[i + 1] / std::sqrt(step) - 1.0));
      raw_deriv = std::max(raw_deriv, std::abs(deriv_raw[i] / deriv_raw[i + 1] / std::pow(step, 0.25) - 1.0));
    }
  }
  Outcome out;
  out.pass = worst_model <= 0.1 && worst_deriv <= 0.1;
  out.detail = fmt("max relative deviation from n^-1/2 %.2e, from n^-1/4 %.2e", worst_model, worst_deriv) +
               fmt(" (before log compensation %.2f and %.2f)", raw_model, raw_deriv);
  return out;
}

void report(int id, const char* name, const Outcome& o, bool& all) {
  std::printf("criterion %d %-28s %s  %s\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  std::fflush(stdout);
  all = all && o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  auto wanted = [&](int id) { return selected.empty() || std::count(selected.begin(), selected.end(), id) > 0; };

  bool all = true;
  if (wanted(1)) report(1, "derivative correctness", derivative_correctness(), all);
  if (wanted(2)) report(2, "bound audit", bound_audit(), all);
  if (wanted(3)) report(3, "projection exactness", projection_exactness(), all);
  if (wanted(4)) report(4, "green formula", green_formula(), all);
  if (wanted(6)) report(6, "bound rate sanity", rate_sanity(), all);
  if (!wanted(5) && !wanted(7)) return all ? 0 : 1;

  const ExperimentConfig cfg = sweep_config();
  auto start = Clock::now();
  const ExperimentResult first = run_experiment(cfg, worker_count());
  if (wanted(5)) report(5, "experiment trends", trend_reproduction(first, seconds_since(start)), all);
  if (!wanted(7)) return all ? 0 : 1;

  start = Clock::now();
  const ExperimentResult second = run_experiment(cfg, worker_count());
  const bool same = trials_bytes(first) == trials_bytes(second);
  const std::string verdict = same ? "trial CSVs byte-identical" : "trial CSVs differ";
  report(7, "determinism", {same, verdict + fmt("; second sweep %.0f s", seconds_since(start))}, all);
  return all ? 0 : 1;
}
