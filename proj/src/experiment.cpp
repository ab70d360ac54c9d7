#include "sparsenet/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

#include "sparsenet/csv.hpp"
#include "sparsenet/errors.hpp"
#include "sparsenet/flat_params.hpp"
#include "sparsenet/parallel.hpp"

namespace sparsenet {

using nlohmann::json;

namespace {

// Stream tags for derive_seed; each kind of randomness gets its own.
enum SeedTag : std::uint64_t {
  kTeacherTag = 1,
  kTestTag = 2,
  kDataTag = 3,
  kTrialTag = 4,
  kXinfTag = 5,
  kAuditTag = 6,
  kDerivativeTag = 7,
  kGreenTag = 8,
  kB0Tag = 9,
};

// Reads fields of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
  }

  ~ObjectReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& item : doc_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(where_ + ": unknown field '" + item.key() + "'");
    }
  }

  template <class T>
  void read(const char* key, T& target) {
    seen_.insert(key);
    const auto it = doc_.find(key);
    if (it == doc_.end()) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw ConfigError(where_ + "." + key + ": expected true or false");
      } else if constexpr (std::is_unsigned_v<T>) {
        if (!it->is_number_unsigned()) throw ConfigError(where_ + "." + key + ": expected a non-negative integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) throw ConfigError(where_ + "." + key + ": expected a number");
      }
      target = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

 private:
  const json& doc_;
  std::string where_;
  std::set<std::string> seen_;
};

template <class T>
std::vector<T> read_list(const json& value, const char* where) {
  if (!value.is_array()) throw ConfigError(std::string(where) + ": expected a list");
  std::vector<T> out;
  for (const json& item : value) {
    if constexpr (std::is_unsigned_v<T>) {
      if (!item.is_number_unsigned()) throw ConfigError(std::string(where) + ": expected non-negative integers");
    } else {
      if (!item.is_number()) throw ConfigError(std::string(where) + ": expected numbers");
    }
    out.push_back(item.get<T>());
  }
  return out;
}

std::string tag_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

void require_positive(std::size_t v, const char* what) {
  if (v == 0) throw ConfigError(std::string("config: ") + what + " must be positive");
}

struct TestSet {
  Matrix X;
  Vector noise;
};

TestSet make_test_set(const ExperimentConfig& cfg, std::size_t depth) {
  Rng rng = make_rng(derive_seed(cfg.master_seed, {kTestTag, depth}));
  TestSet out;
  out.X = sample_inputs(cfg.n_test, cfg.teacher.d, cfg.data, rng);
  out.noise = Vector::Zero(static_cast<Eigen::Index>(cfg.n_test));
  if (cfg.data.noise_std > 0.0) {
    for (Eigen::Index j = 0; j < out.noise.size(); ++j) {
      out.noise[j] = sample_truncated_normal(0.0, cfg.data.noise_std, cfg.data.cutoff_factor, rng);
    }
  }
  return out;
}

struct Cell {
  std::size_t depth;
  ActivationKind activation;
  Network teacher;
  double radius;
  const TestSet* test;
  TeacherCache cache;
};

void evaluate_trial(const Network& model, const Cell& cell, TrialResult& out) {
  double pred = 0.0;
  double grad = 0.0;
  double resid = 0.0;
  const Matrix& X = cell.test->X;
  for (Eigen::Index j = 0; j < X.rows(); ++j) {
    const ForwardTrace trace = forward(model, X.row(j).transpose());
    const double diff = trace.output() - cell.cache.values[j];
    pred += diff * diff;
    grad += (grad_input(model, trace) - cell.cache.gradients[static_cast<std::size_t>(j)]).squaredNorm();
    resid = std::max(resid, std::abs(diff - cell.test->noise[j]));
  }
  const auto m = static_cast<double>(X.rows());
  out.pred_l2 = pred / m;
  out.grad_l2 = grad / m;
  out.max_abs_residual = resid;
}

ActivationKind parse_activation_field(const std::string& text) { return activation_from_string(text); }

double parse_double(const std::string& field) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(field, &used);
  if (used != field.size()) throw ConfigError("trials csv: bad number '" + field + "'");
  return v;
}

}  // namespace

double RadiusRule::resolve(double teacher_l1) const {
  return kind == Kind::Absolute ? value : value * teacher_l1;
}

void ExperimentConfig::validate() const {
  TeacherSpec t = teacher;
  t.depth = 2;
  try {
    t.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  data.validate();
  TrainConfig tc = train;
  tc.radius = 1.0;
  tc.validate();
  if (n_grid.empty()) throw ConfigError("config: n_grid must not be empty");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end()) {
    throw ConfigError("config: n_grid must be strictly ascending");
  }
  if (n_grid.front() == 0) throw ConfigError("config: n_grid entries must be positive");
  require_positive(n_test, "n_test");
  require_positive(repeats, "repeats");
  if (activations.empty()) throw ConfigError("config: activations must not be empty");
  if (depths.empty()) throw ConfigError("config: depths must not be empty");
  for (std::size_t L : depths) {
    if (L < 2) throw ConfigError("config: depths must be at least 2");
  }
  if (!(radius.value > 0.0) || !std::isfinite(radius.value)) throw ConfigError("config: radius value must be positive");
  if (b0 && !(*b0 >= 0.0)) throw ConfigError("config: b0 must be non-negative");
  if (verify.hidden_width == 0) throw ConfigError("config: verify.hidden_width must be positive");
  for (double r : verify.radii) {
    if (!(r > 0.0)) throw ConfigError("config: verify.radii must be positive");
  }
}

ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig cfg;
  {
    ObjectReader top(doc, "config");
    if (const json* t = top.child("teacher")) {
      ObjectReader r(*t, "teacher");
      r.read("d", cfg.teacher.d);
      r.read("s", cfg.teacher.s);
      r.read("hidden_width", cfg.teacher.hidden_width);
    }
    if (const json* d = top.child("data")) {
      ObjectReader r(*d, "data");
      r.read("x_std", cfg.data.x_std);
      r.read("noise_std", cfg.data.noise_std);
      r.read("cutoff_factor", cfg.data.cutoff_factor);
      r.read("mean", cfg.data.mean);
    }
    if (const json* t = top.child("train")) {
      ObjectReader r(*t, "train");
      r.read("step_size", cfg.train.step_size);
      r.read("iterations", cfg.train.iterations);
      r.read("batch_size", cfg.train.batch_size);
      r.read("init_scale", cfg.train.init_scale);
    }
    if (const json* v = top.child("n_grid")) cfg.n_grid = read_list<std::size_t>(*v, "n_grid");
    top.read("n_test", cfg.n_test);
    top.read("repeats", cfg.repeats);
    if (const json* v = top.child("activations")) {
      if (!v->is_array()) throw ConfigError("activations: expected a list");
      cfg.activations.clear();
      for (const json& item : *v) {
        if (!item.is_string()) throw ConfigError("activations: expected strings");
        cfg.activations.push_back(activation_from_string(item.get<std::string>()));
      }
    }
    if (const json* v = top.child("depths")) cfg.depths = read_list<std::size_t>(*v, "depths");
    if (const json* v = top.child("radius")) {
      ObjectReader r(*v, "radius");
      std::string rule = "teacher_multiple";
      r.read("rule", rule);
      r.read("value", cfg.radius.value);
      if (rule == "teacher_multiple") {
        cfg.radius.kind = RadiusRule::Kind::TeacherMultiple;
      } else if (rule == "absolute") {
        cfg.radius.kind = RadiusRule::Kind::Absolute;
      } else {
        throw ConfigError("radius.rule must be 'teacher_multiple' or 'absolute'");
      }
    }
    top.read("master_seed", cfg.master_seed);
    if (const json* v = top.child("b0"); v && !v->is_null()) {
      if (!v->is_number()) throw ConfigError("b0: expected a number or null");
      cfg.b0 = v->get<double>();
    }
    if (const json* v = top.child("verify")) {
      ObjectReader r(*v, "verify");
      VerifyConfig& vc = cfg.verify;
      if (const json* x = r.child("dims")) vc.dims = read_list<std::size_t>(*x, "verify.dims");
      if (const json* x = r.child("depths")) vc.depths = read_list<std::size_t>(*x, "verify.depths");
      if (const json* x = r.child("radii")) vc.radii = read_list<double>(*x, "verify.radii");
      r.read("hidden_width", vc.hidden_width);
      r.read("radius_equals_depth", vc.radius_equals_depth);
      r.read("audit_trials", vc.audit_trials);
      r.read("fd_draws", vc.fd_draws);
      r.read("fd_tolerance_grad", vc.fd_tolerance_grad);
      r.read("fd_tolerance_laplacian", vc.fd_tolerance_laplacian);
      r.read("green_nets", vc.green_nets);
      r.read("green_samples", vc.green_samples);
      r.read("green_tolerance", vc.green_tolerance);
    }
  }
  cfg.validate();
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  json activations = json::array();
  for (ActivationKind a : cfg.activations) activations.push_back(to_string(a));
  const VerifyConfig& vc = cfg.verify;
  return {
      {"teacher", {{"d", cfg.teacher.d}, {"s", cfg.teacher.s}, {"hidden_width", cfg.teacher.hidden_width}}},
      {"data",
       {{"x_std", cfg.data.x_std},
        {"noise_std", cfg.data.noise_std},
        {"cutoff_factor", cfg.data.cutoff_factor},
        {"mean", cfg.data.mean}}},
      {"train",
       {{"step_size", cfg.train.step_size},
        {"iterations", cfg.train.iterations},
        {"batch_size", cfg.train.batch_size},
        {"init_scale", cfg.train.init_scale}}},
      {"n_grid", cfg.n_grid},
      {"n_test", cfg.n_test},
      {"repeats", cfg.repeats},
      {"activations", activations},
      {"depths", cfg.depths},
      {"radius",
       {{"rule", cfg.radius.kind == RadiusRule::Kind::Absolute ? "absolute" : "teacher_multiple"},
        {"value", cfg.radius.value}}},
      {"master_seed", cfg.master_seed},
      {"b0", cfg.b0 ? json(*cfg.b0) : json(nullptr)},
      {"verify",
       {{"dims", vc.dims},
        {"depths", vc.depths},
        {"hidden_width", vc.hidden_width},
        {"radii", vc.radii},
        {"radius_equals_depth", vc.radius_equals_depth},
        {"audit_trials", vc.audit_trials},
        {"fd_draws", vc.fd_draws},
        {"fd_tolerance_grad", vc.fd_tolerance_grad},
        {"fd_tolerance_laplacian", vc.fd_tolerance_laplacian},
        {"green_nets", vc.green_nets},
        {"green_samples", vc.green_samples},
        {"green_tolerance", vc.green_tolerance}}},
  };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

Network cell_teacher(const ExperimentConfig& cfg, std::size_t depth, ActivationKind activation) {
  TeacherSpec spec = cfg.teacher;
  spec.depth = depth;
  spec.activation = activation;
  spec.seed = derive_seed(cfg.master_seed, {kTeacherTag, depth});
  return make_teacher(spec);
}

double cell_radius(const ExperimentConfig& cfg, std::size_t depth) {
  return cfg.radius.resolve(param_l1_norm(cell_teacher(cfg, depth, ActivationKind::Softplus)));
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t depth, ActivationKind activation, std::size_t n,
                         std::size_t repeat) {
  return derive_seed(master, {kTrialTag, depth, static_cast<std::uint64_t>(activation), n, repeat});
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs, const Progress& progress) {
  cfg.validate();

  std::vector<TestSet> tests;
  tests.reserve(cfg.depths.size());
  for (std::size_t L : cfg.depths) tests.push_back(make_test_set(cfg, L));

  std::vector<Cell> cells;
  for (std::size_t li = 0; li < cfg.depths.size(); ++li) {
    const std::size_t L = cfg.depths[li];
    for (ActivationKind act : cfg.activations) {
      Network teacher = cell_teacher(cfg, L, act);
      const double radius = cfg.radius.resolve(param_l1_norm(teacher));
      TeacherCache cache = cache_teacher(teacher, tests[li].X);
      cells.push_back(Cell{L, act, std::move(teacher), radius, &tests[li], std::move(cache)});
    }
  }

  struct Job {
    const Cell* cell;
    std::size_t n;
    std::size_t repeat;
  };
  std::vector<Job> work;
  for (const Cell& cell : cells) {
    for (std::size_t n : cfg.n_grid) {
      for (std::size_t rep = 0; rep < cfg.repeats; ++rep) work.push_back({&cell, n, rep});
    }
  }

  ExperimentResult result;
  result.trials.resize(work.size());
  std::mutex progress_mutex;
  std::size_t finished = 0;
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    const Job& job = work[i];
    const Cell& cell = *job.cell;
    TrialResult& out = result.trials[i];
    out.n = job.n;
    out.repeat = job.repeat;
    out.activation = cell.activation;
    out.L = cell.depth;
    out.seed = trial_seed(cfg.master_seed, cell.depth, cell.activation, job.n, job.repeat);

    Rng data_rng = make_rng(derive_seed(cfg.master_seed, {kDataTag, cell.depth, job.n, job.repeat}));
    const Dataset data = synthesize(cell.teacher, job.n, cfg.data, data_rng);

    Architecture arch{cfg.teacher.d, cfg.teacher.hidden_width, cell.depth, cell.activation};
    TrainConfig tc = cfg.train;
    tc.radius = cell.radius;
    tc.seed = out.seed;
    try {
      const Network model = train(data, arch, tc);
      out.final_train_loss = mean_squared_loss(model, data);
      out.l1_norm_final = param_l1_norm(model);
      evaluate_trial(model, cell, out);
    } catch (const TrainingError&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      out.diverged = true;
      out.pred_l2 = out.grad_l2 = out.final_train_loss = out.l1_norm_final = out.max_abs_residual = nan;
    }
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(++finished, work.size());
    }
  });

  result.aggregates = aggregate(result.trials);
  for (const AggregateRow& row : result.aggregates) {
    if (row.completed == 0) result.cell_fully_diverged = true;
  }
  for (const TrialResult& t : result.trials) {
    if (!t.diverged) result.b0_estimate = std::max(result.b0_estimate, t.max_abs_residual);
  }
  return result;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialResult>& trials) {
  struct Acc {
    AggregateRow row;
    std::vector<double> pred;
    std::vector<double> grad;
  };
  std::vector<Acc> cells;
  for (const TrialResult& t : trials) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const Acc& a) {
      return a.row.n == t.n && a.row.activation == t.activation && a.row.L == t.L;
    });
    if (it == cells.end()) {
      cells.push_back(Acc{AggregateRow{t.n, t.activation, t.L}, {}, {}});
      it = cells.end() - 1;
    }
    if (!t.diverged) {
      it->pred.push_back(t.pred_l2);
      it->grad.push_back(t.grad_l2);
    }
  }
  auto mean_std = [](const std::vector<double>& v, double& mean, double& sd) {
    if (v.empty()) {
      mean = sd = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    double sum = 0.0;
    for (double x : v) sum += x;
    mean = sum / static_cast<double>(v.size());
    double sq = 0.0;
    for (double x : v) sq += (x - mean) * (x - mean);
    sd = v.size() > 1 ? std::sqrt(sq / static_cast<double>(v.size() - 1)) : 0.0;
  };
  std::vector<AggregateRow> out;
  for (Acc& a : cells) {
    mean_std(a.pred, a.row.pred_l2_mean, a.row.pred_l2_std);
    mean_std(a.grad, a.row.grad_l2_mean, a.row.grad_l2_std);
    a.row.completed = a.pred.size();
    out.push_back(a.row);
  }
  return out;
}

void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials) {
  out << "n,repeat,activation,L,seed,pred_l2,grad_l2,final_train_loss,l1_norm_final\n";
  for (const TrialResult& t : trials) {
    out << t.n << ',' << t.repeat << ',' << to_string(t.activation) << ',' << t.L << ',' << t.seed << ','
        << format_double(t.pred_l2) << ',' << format_double(t.grad_l2) << ',' << format_double(t.final_train_loss)
        << ',' << format_double(t.l1_norm_final) << '\n';
  }
}

std::vector<TrialResult> read_trials_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "n,repeat,activation,L,seed,pred_l2,grad_l2,final_train_loss,l1_norm_final") {
    throw ConfigError("trials csv: unexpected header");
  }
  std::vector<TrialResult> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 9) throw ConfigError("trials csv: expected 9 fields");
    TrialResult t;
    try {
      t.n = std::stoull(f[0]);
      t.repeat = std::stoull(f[1]);
      t.activation = parse_activation_field(f[2]);
      t.L = std::stoull(f[3]);
      t.seed = std::stoull(f[4]);
      t.pred_l2 = parse_double(f[5]);
      t.grad_l2 = parse_double(f[6]);
      t.final_train_loss = parse_double(f[7]);
      t.l1_norm_final = parse_double(f[8]);
    } catch (const std::logic_error& e) {
      throw ConfigError(std::string("trials csv: ") + e.what());
    }
    t.diverged = std::isnan(t.pred_l2);
    out.push_back(t);
  }
  return out;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "n,activation,L,pred_l2_mean,pred_l2_std,grad_l2_mean,grad_l2_std\n";
  for (const AggregateRow& r : rows) {
    out << r.n << ',' << to_string(r.activation) << ',' << r.L << ',' << format_double(r.pred_l2_mean) << ','
        << format_double(r.pred_l2_std) << ',' << format_double(r.grad_l2_mean) << ','
        << format_double(r.grad_l2_std) << '\n';
  }
}

double estimate_x_inf_sq(const DataSpec& data, std::size_t d, std::size_t samples, std::uint64_t seed) {
  if (samples == 0 || d == 0) throw DomainError("estimate_x_inf_sq: need samples and a positive dimension");
  Rng rng = make_rng(seed);
  double sum = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    double peak = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      peak = std::max(peak, std::abs(sample_truncated_normal(data.mean, data.x_std, data.cutoff_factor, rng)));
    }
    sum += peak * peak;
  }
  return sum / static_cast<double>(samples);
}

double estimate_b0(const ExperimentConfig& cfg, const Network& model) {
  if (model.input_dim() != cfg.teacher.d) throw ConfigError("model input dimension does not match the config");
  const Network teacher = cell_teacher(cfg, model.depth(), model.activation());
  Rng rng = make_rng(derive_seed(cfg.master_seed, {kB0Tag, model.depth()}));
  const Dataset test = synthesize(teacher, cfg.n_test, cfg.data, rng);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < test.X.rows(); ++j) {
    worst = std::max(worst, std::abs(predict(model, test.X.row(j).transpose()) - test.y[j]));
  }
  return worst;
}

double default_b0(const ExperimentConfig& cfg, double radius, std::size_t depth) {
  return 2.0 * sup_model_bound(cfg.data.input_bound(), radius, depth) + cfg.data.cutoff_factor * cfg.data.noise_std;
}

json report_bounds(const ExperimentConfig& cfg, const std::optional<Network>& model, std::optional<double> b0_override) {
  cfg.validate();
  const double x_inf_sq =
      estimate_x_inf_sq(cfg.data, cfg.teacher.d, 20000, derive_seed(cfg.master_seed, {kXinfTag}));
  std::vector<std::size_t> depths = cfg.depths;
  std::string source = "default";
  std::optional<double> b0 = b0_override;
  if (b0) {
    source = "override";
  } else if (cfg.b0) {
    b0 = cfg.b0;
    source = "config";
  } else if (model) {
    b0 = estimate_b0(cfg, *model);
    source = "model";
  }
  if (model) depths = {model->depth()};

  json entries = json::array();
  for (std::size_t L : depths) {
    const double r = model ? std::max(param_l1_norm(*model), cell_radius(cfg, L)) : cell_radius(cfg, L);
    const Architecture arch{cfg.teacher.d, cfg.teacher.hidden_width, L, ActivationKind::Softplus};
    for (std::size_t n : cfg.n_grid) {
      BoundInputs in;
      in.r = r;
      in.L = L;
      in.P = static_cast<double>(arch.parameter_count());
      in.n = static_cast<double>(n);
      in.R = cfg.data.input_bound();
      in.b0 = b0 ? *b0 : default_b0(cfg, r, L);
      in.b1 = cfg.data.score_bound();
      in.x_inf_sq = x_inf_sq;
      json entry = {{"L", L}, {"n", n}, {"inputs", to_json(in)}};
      entry["bounds"] = to_json(evaluate_bounds(in));
      entries.push_back(std::move(entry));
    }
  }
  return {{"b0_source", source}, {"x_inf_sq", x_inf_sq}, {"entries", entries}};
}

std::vector<GreenCheck> green_suite(std::size_t nets, std::size_t samples, std::uint64_t seed, std::size_t jobs) {
  std::vector<GreenCheck> out;
  const DataSpec data;
  for (std::size_t i = 0; i < nets; ++i) {
    Rng rng = make_rng(derive_seed(seed, {i}));
    const std::size_t d = 1 + i % 3;
    const std::size_t L = 2 + (i / 3) % 2;
    const Network f = random_network(d, 5, L, ActivationKind::Softplus, rng);
    const Network g = random_network(d, 5, L, ActivationKind::Softplus, rng);
    out.push_back(green_identity_check(f, g, data, samples, derive_seed(seed, {i, 1}), jobs));
  }
  return out;
}

std::vector<BoundCheck> run_verification(const ExperimentConfig& cfg, std::size_t jobs, double grad_bound_scale) {
  cfg.validate();
  const VerifyConfig& vc = cfg.verify;
  std::vector<BoundCheck> out;

  for (std::size_t d : vc.dims) {
    for (std::size_t L : vc.depths) {
      std::vector<double> radii = vc.radii;
      if (vc.radius_equals_depth) radii.push_back(static_cast<double>(L));
      std::sort(radii.begin(), radii.end());
      radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
      for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        AuditSpec spec;
        spec.input_dim = d;
        spec.hidden_width = vc.hidden_width;
        spec.depth = L;
        spec.radius = radii[ri];
        spec.input_bound = cfg.data.input_bound();
        spec.trials = vc.audit_trials;
        spec.seed = derive_seed(cfg.master_seed, {kAuditTag, d, L, ri});
        spec.grad_bound_scale = grad_bound_scale;
        spec.jobs = jobs;
        const std::string suffix = "/d" + std::to_string(d) + "/L" + std::to_string(L) + "/r" + tag_number(radii[ri]);
        for (BoundCheck c : verify_bounds(spec)) {
          c.name += suffix;
          out.push_back(std::move(c));
        }
      }
    }
  }

  if (vc.fd_draws > 0) {
    for (std::size_t d : vc.dims) {
      for (std::size_t L : vc.depths) {
        const auto errors =
            derivative_check(d, vc.hidden_width, L, vc.fd_draws, derive_seed(cfg.master_seed, {kDerivativeTag, d, L}), jobs);
        const std::string suffix = "/d" + std::to_string(d) + "/L" + std::to_string(L);
        BoundCheck params{"fd_grad_params" + suffix, errors.size()};
        BoundCheck input{"fd_grad_input" + suffix, errors.size()};
        BoundCheck lap{"fd_laplacian" + suffix, errors.size()};
        for (const DerivativeErrors& e : errors) {
          const auto record = [](BoundCheck& c, double value, double tol) {
            c.worst_ratio = std::max(c.worst_ratio, value / tol);
            if (value > tol) ++c.violations;
          };
          record(params, e.grad_params, vc.fd_tolerance_grad);
          record(input, e.grad_input, vc.fd_tolerance_grad);
          record(lap, e.laplacian, vc.fd_tolerance_laplacian);
        }
        out.push_back(params);
        out.push_back(input);
        out.push_back(lap);
      }
    }
  }

  if (vc.green_nets > 0) {
    BoundCheck green{"green_identity", vc.green_nets};
    for (const GreenCheck& g : green_suite(vc.green_nets, vc.green_samples, derive_seed(cfg.master_seed, {kGreenTag}), jobs)) {
      green.worst_ratio = std::max(green.worst_ratio, g.rel_gap / vc.green_tolerance);
      if (g.rel_gap > vc.green_tolerance) ++green.violations;
    }
    out.push_back(green);
  }
  return out;
}

}  // namespace sparsenet
