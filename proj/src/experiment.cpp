#include "mice/experiment.hpp"

#include "mice/analysis.hpp"
#include "mice/telemetry.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace mice {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void config_error(const std::string& msg) { throw MiceError(ErrorCode::kConfig, msg); }

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
    config_error(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  // Accept 1e6-style values as long as they are integral.
  const double d = to_double(key, v);
  if (d < 0.0 || d != std::floor(d) || d > 1.8e19) {
    config_error(key + ": expected a nonnegative integer, got '" + v + "'");
  }
  return static_cast<std::uint64_t>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  config_error(key + ": expected a boolean, got '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

Vector to_vector(const std::string& key, const std::string& v) {
  const auto parts = split(v, ',');
  Vector out(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) out[static_cast<Eigen::Index>(i)] = to_double(key, parts[i]);
  return out;
}

const std::set<std::string> kProblems = {"quadratic", "shifted_quadratic", "rosenbrock", "logistic"};
const std::set<std::string> kMethods = {"sgd_mice", "adam_mice", "sgd_a", "idealized", "sgd",
                                        "adam",     "svrg",      "sarah", "sag",       "saga"};

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') config_error("line " + std::to_string(line_no) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      config_error("line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) config_error("line " + std::to_string(line_no) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (!kv.emplace(key, value).second) {
      config_error("line " + std::to_string(line_no) + ": duplicate key " + key);
    }
  }
  return kv;
}

ExperimentConfig ExperimentConfig::from_key_values(const std::map<std::string, std::string>& kv) {
  ExperimentConfig c;
  std::optional<StoppingRule> max_evals, max_iters;
  std::optional<double> gn_mu, gn_tol;
  for (const auto& [key, v] : kv) {
    MiceConfig& m = c.method.mice;
    if (key == "problem" || key == "problem.name") {
      c.problem.name = v;
    } else if (key == "problem.kappa") {
      c.problem.kappa = to_double(key, v);
    } else if (key == "problem.sigma") {
      c.problem.sigma = to_double(key, v);
    } else if (key == "problem.dataset") {
      c.problem.dataset = v;
    } else if (key == "problem.lambda") {
      c.problem.lambda = to_double(key, v);
    } else if (key == "problem.zero_one_labels") {
      c.problem.libsvm.zero_one_labels = to_bool(key, v);
    } else if (key == "problem.label_map") {
      for (const auto& pair : split(v, ',')) {
        const auto parts = split(pair, ':');
        if (parts.size() != 2) config_error(key + ": expected from:to pairs");
        c.problem.libsvm.label_map[to_double(key, parts[0])] = to_double(key, parts[1]);
      }
    } else if (key == "problem.subsample") {
      c.problem.subsample = to_uint(key, v);
    } else if (key == "problem.start") {
      c.problem.start = to_vector(key, v);
    } else if (key == "method" || key == "method.name") {
      c.method.name = v;
    } else if (key == "method.step") {
      c.method.step = to_double(key, v);
    } else if (key == "method.batch") {
      c.method.batch = to_uint(key, v);
    } else if (key == "method.scale") {
      c.method.scale = to_double(key, v);
    } else if (key == "method.decay") {
      c.method.decay = to_double(key, v);
    } else if (key == "mice.eps") {
      m.eps = to_double(key, v);
    } else if (key == "mice.delta_drop") {
      m.delta_drop = to_double(key, v);
    } else if (key == "mice.delta_rest") {
      m.delta_rest = to_double(key, v);
    } else if (key == "mice.delta_re") {
      m.delta_re = to_double(key, v);
    } else if (key == "mice.n_part") {
      m.n_part = to_uint(key, v);
    } else if (key == "mice.p_re") {
      m.p_re = to_double(key, v);
    } else if (key == "mice.min_resample") {
      m.min_resample = to_uint(key, v);
    } else if (key == "mice.max_resample") {
      m.max_resample = to_uint(key, v);
    } else if (key == "mice.m_min") {
      m.m_min = to_uint(key, v);
    } else if (key == "mice.m_min_restart") {
      m.m_min_restart = to_uint(key, v);
    } else if (key == "mice.max_hierarchy_size") {
      m.max_hierarchy_size = to_uint(key, v);
    } else if (key == "mice.max_layer_samples") {
      m.max_layer_samples = to_uint(key, v);
    } else if (key == "mice.clipping") {
      try {
        m.clipping = parse_clipping(v);
      } catch (const MiceError& e) {
        config_error(key + ": " + e.what());
      }
    } else if (key == "mice.cost_ratio_samp") {
      m.cost_ratio_samp = to_double(key, v);
    } else if (key == "mice.cost_aggr") {
      m.cost_aggr = to_double(key, v);
    } else if (key == "mice.norm_floor") {
      m.norm_floor = to_double(key, v);
    } else if (key == "stop.max_grad_evals") {
      max_evals = StoppingRule::max_grad_evals(to_uint(key, v));
    } else if (key == "stop.max_iters") {
      max_iters = StoppingRule::max_iterations(to_uint(key, v));
    } else if (key == "stop.grad_norm_mu") {
      gn_mu = to_double(key, v);
    } else if (key == "stop.grad_norm_tol") {
      gn_tol = to_double(key, v);
    } else if (key == "replicates") {
      c.replicates = to_uint(key, v);
    } else if (key == "seed") {
      c.seed = to_uint(key, v);
    } else if (key == "output") {
      c.output = v;
    } else if (key == "log_stride") {
      c.log_stride = to_uint(key, v);
    } else if (key == "workers") {
      c.workers = to_uint(key, v);
    } else if (key == "record_time") {
      c.record_time = to_bool(key, v);
    } else if (key == "svg") {
      c.svg = to_bool(key, v);
    } else {
      config_error("unknown key '" + key + "'");
    }
  }
  if (gn_mu.has_value() != gn_tol.has_value()) {
    config_error("stop.grad_norm_mu and stop.grad_norm_tol must be given together");
  }
  c.stop = Stopping();
  if (max_evals) c.stop.rules.push_back(*max_evals);
  if (max_iters) c.stop.rules.push_back(*max_iters);
  if (gn_mu) c.stop.rules.push_back(StoppingRule::grad_norm(*gn_mu, *gn_tol));
  if (c.stop.rules.empty()) config_error("no stopping rule (stop.max_grad_evals / stop.max_iters)");
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config " + path);
  return from_key_values(parse_key_values(in));
}

void ExperimentConfig::validate() const {
  if (!kProblems.count(problem.name)) config_error("unknown problem '" + problem.name + "'");
  if (!kMethods.count(method.name)) config_error("unknown method '" + method.name + "'");
  if (replicates == 0) config_error("replicates must be >= 1");
  if (log_stride == 0) config_error("log_stride must be >= 1");
  if (workers == 0) config_error("workers must be >= 1");
  if (method.batch == 0) config_error("method.batch must be >= 1");
  if (method.step && !(*method.step > 0.0)) config_error("method.step must be > 0");
  if (method.scale && !(*method.scale > 0.0)) config_error("method.scale must be > 0");
  if (!(method.decay > 0.0)) config_error("method.decay must be > 0");
  if (problem.name == "quadratic" && !(problem.kappa > 0.0)) config_error("problem.kappa must be > 0");
  if ((problem.name == "shifted_quadratic" || problem.name == "rosenbrock") &&
      !(problem.sigma > 0.0)) {
    config_error("problem.sigma must be > 0");
  }
  if (problem.name == "logistic") {
    if (problem.dataset.empty()) config_error("problem.dataset is required for logistic");
    if (!(problem.lambda > 0.0)) config_error("problem.lambda must be > 0");
  }
  if (method.name == "adam_mice" && !method.step) config_error("adam_mice needs method.step");
  try {
    method.mice.validate();
  } catch (const MiceError& e) {
    config_error(e.what());
  }
}

// ------------------------------------------------------------ problems

namespace {

bool read_cached_optimum(const std::string& path, const LogisticProblem& p, Optimum& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::string tag;
  double lambda = 0.0;
  std::size_t rows = 0, dim = 0;
  if (!(in >> tag >> lambda >> rows >> dim) || tag != "logistic" || lambda != p.lambda() ||
      rows != p.data().rows() || dim != p.dimension()) {
    return false;
  }
  Optimum o;
  o.point.resize(static_cast<Eigen::Index>(dim));
  if (!(in >> o.value)) return false;
  for (Eigen::Index j = 0; j < o.point.size(); ++j) {
    if (!(in >> o.point[j])) return false;
  }
  out = std::move(o);
  return true;
}

void write_cached_optimum(const std::string& path, const LogisticProblem& p, const Optimum& o) {
  std::ofstream out(path);
  if (!out) return;  // cache is best effort
  out << std::setprecision(17) << "logistic " << p.lambda() << ' ' << p.data().rows() << ' '
      << p.dimension() << '\n'
      << o.value << '\n';
  for (Eigen::Index j = 0; j < o.point.size(); ++j) out << o.point[j] << '\n';
}

}  // namespace

Optimum logistic_reference_optimum(const LogisticProblem& problem, double grad_tol) {
  const auto& data = problem.data();
  const auto d = static_cast<Eigen::Index>(problem.dimension());
  const double lambda = problem.lambda();
  const double n = static_cast<double>(data.rows());
  Vector xi = Vector::Zero(d);
  auto f = [&](const Vector& x) { return *problem.true_objective(x); };
  auto g = [&](const Vector& x) { return *problem.true_gradient(x); };

  if (d <= 1000) {
    double fx = f(xi);
    for (int it = 0; it < 200; ++it) {
      const Vector gx = g(xi);
      if (gx.norm() <= grad_tol) break;
      Matrix h = lambda * Matrix::Identity(d, d);
      for (std::size_t i = 0; i < data.rows(); ++i) {
        const double s = 1.0 / (1.0 + std::exp(-data.labels[i] * data.dot(i, xi)));
        const double w = s * (1.0 - s) / n;
        const auto c = data.row_cols(i);
        const auto v = data.row_vals(i);
        for (std::size_t a = 0; a < c.size(); ++a) {
          for (std::size_t b = 0; b < c.size(); ++b) h(c[a], c[b]) += w * v[a] * v[b];
        }
      }
      const Vector p = -h.ldlt().solve(gx);
      double t = 1.0;
      Vector next = xi + p;
      double fn = f(next);
      while (fn > fx + 1e-4 * t * gx.dot(p) && t > 1e-12) {
        t *= 0.5;
        next = xi + t * p;
        fn = f(next);
      }
      if (!(fn <= fx) || (next - xi).norm() == 0.0) break;
      xi = next;
      fx = fn;
    }
    return Optimum{xi, f(xi)};
  }

  const auto c = *problem.constants();
  const double step = 1.0 / c.lipschitz;
  const double q = std::sqrt(c.strong_convexity / c.lipschitz);
  const double beta = (1.0 - q) / (1.0 + q);
  Vector y = xi;
  for (int it = 0; it < 1'000'000; ++it) {
    const Vector gy = g(y);
    const Vector next = y - step * gy;
    y = next + beta * (next - xi);
    xi = next;
    if (it % 50 == 0 && g(xi).norm() <= grad_tol) break;
  }
  return Optimum{xi, f(xi)};
}

ProblemInstance make_problem(const ProblemSpec& spec, const std::string& cache_path) {
  ProblemInstance inst;
  if (spec.name == "quadratic") {
    inst.problem = std::make_unique<QuadraticProblem>(spec.kappa);
    inst.start = QuadraticProblem::default_start();
  } else if (spec.name == "shifted_quadratic") {
    inst.problem = std::make_unique<ShiftedQuadraticProblem>(spec.sigma);
    inst.start = Vector{{20.0, 50.0}};
  } else if (spec.name == "rosenbrock") {
    inst.problem = std::make_unique<RosenbrockProblem>(spec.sigma);
    inst.start = RosenbrockProblem::default_start();
  } else if (spec.name == "logistic") {
    SparseDataset data;
    std::string cache = cache_path;
    if (spec.dataset == "synthetic-mushrooms") {
      data = synthetic_mushrooms(0x5eed);
      inst.note = "synthetic mushrooms-shaped data";
    } else {
      data = read_libsvm_file(spec.dataset, spec.libsvm);
      inst.note = "data from " + spec.dataset;
      if (cache.empty()) cache = spec.dataset + ".optimum";
    }
    if (spec.subsample > 0 && spec.subsample < data.rows()) {
      RngStream rng(0x5eed, spec.subsample);
      data = subsample(data, spec.subsample, rng);
      if (cache_path.empty() && !cache.empty()) cache += "." + std::to_string(spec.subsample);
    }
    auto p = std::make_unique<LogisticProblem>(
        std::make_shared<const SparseDataset>(std::move(data)), spec.lambda);
    Optimum opt;
    if (cache.empty() || !read_cached_optimum(cache, *p, opt)) {
      opt = logistic_reference_optimum(*p);
      if (!cache.empty()) write_cached_optimum(cache, *p, opt);
    }
    p->set_optimum(opt);
    inst.start = Vector::Zero(static_cast<Eigen::Index>(p->dimension()));
    inst.problem = std::move(p);
  } else {
    config_error("unknown problem '" + spec.name + "'");
  }
  if (spec.start) {
    require_same_dim(spec.start->size(), inst.start.size(), "problem.start");
    inst.start = *spec.start;
  }
  return inst;
}

RunSummary run_method(const StochasticProblem& problem, const Vector& start,
                      const MethodSpec& method, const RunOptions& opts_in, RngStream rng) {
  RunOptions opts = opts_in;
  if (method.step) opts.step = method.step;
  const std::string& m = method.name;
  if (m == "sgd_mice") return run_sgd_mice(problem, start, method.mice, opts, rng);
  if (m == "adam_mice") {
    if (!method.step) config_error("adam_mice needs method.step");
    return run_adam_mice(problem, start, method.mice, *method.step, opts, rng);
  }
  if (m == "sgd_a") return run_sgd_a(problem, start, method.mice, opts, rng);
  if (m == "idealized") return run_idealized_sgd_mice(problem, start, method.mice.eps, opts, rng);
  if (m == "sgd") {
    SgdSchedule s;
    s.scale = method.scale;
    s.decay = method.decay;
    s.batch = method.batch;
    return run_vanilla_sgd(problem, start, s, opts, rng);
  }
  if (m == "adam") return run_adam(problem, start, method.scale.value_or(0.02), method.batch, opts, rng);
  if (m == "svrg") return run_svrg(problem, start, method.batch, opts, rng);
  if (m == "sarah") return run_sarah(problem, start, method.batch, opts, rng);
  if (m == "sag") return run_sag(problem, start, method.batch, opts, rng);
  if (m == "saga") return run_saga(problem, start, method.batch, opts, rng);
  config_error("unknown method '" + m + "'");
}

// ---------------------------------------------------------- experiments

namespace {

std::string replicate_name(std::size_t r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "replicate_%03zu.csv", r);
  return buf;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.output);
  const std::string cache =
      cfg.problem.dataset == "synthetic-mushrooms"
          ? (fs::path(cfg.output) / "reference.optimum").string()
          : std::string();
  const ProblemInstance inst = make_problem(cfg.problem, cache);

  std::vector<std::vector<RunRecord>> records(cfg.replicates);
  std::vector<RunSummary> summaries(cfg.replicates);
  std::vector<std::exception_ptr> errors(cfg.replicates);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < cfg.replicates; r = next++) {
      try {
        RunOptions opts;
        opts.stop = cfg.stop;
        opts.log_stride = cfg.log_stride;
        opts.record_time = cfg.record_time;
        opts.sink = [&records, r](const RunRecord& rec) {
          RunRecord slim = rec;
          slim.xi.resize(0);
          slim.layers.clear();
          records[r].push_back(std::move(slim));
        };
        summaries[r] = run_method(*inst.problem, inst.start, cfg.method, opts,
                                  RngStream(cfg.seed, 1000 + r));
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::min(cfg.workers, cfg.replicates);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    if (!errors[r]) continue;
    try {
      std::rethrow_exception(errors[r]);
    } catch (const MiceError& e) {
      throw MiceError(e.code(), "replicate " + std::to_string(r) + ": " + e.what());
    }
  }

  ExperimentSummary out;
  out.runs = summaries;
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    const auto path = fs::path(cfg.output) / replicate_name(r);
    std::ofstream f(path);
    if (!f) throw MiceError(ErrorCode::kIo, "cannot write " + path.string());
    write_run_csv(records[r], f);
    out.files.push_back(path.string());
  }
  const auto rows = aggregate_runs(records);
  {
    const auto path = fs::path(cfg.output) / "aggregate.csv";
    std::ofstream f(path);
    if (!f) throw MiceError(ErrorCode::kIo, "cannot write " + path.string());
    write_aggregate_csv(rows, f);
    out.files.push_back(path.string());
  }
  if (cfg.svg) {
    const auto path = fs::path(cfg.output) / "gap.svg";
    std::ofstream f(path);
    f << render_gap_svg(rows, cfg.method.name + " on " + cfg.problem.name);
    out.files.push_back(path.string());
  }
  {
    const auto path = fs::path(cfg.output) / "run_info.txt";
    std::ofstream f(path);
    f << std::setprecision(17) << "problem " << cfg.problem.name << '\n'
      << "method " << cfg.method.name << '\n'
      << "seed " << cfg.seed << '\n'
      << "replicates " << cfg.replicates << '\n'
      << "step " << (summaries.empty() ? 0.0 : summaries.front().step) << '\n';
    if (const auto c = inst.problem->constants()) {
      f << "L " << c->lipschitz << "\nmu " << c->strong_convexity << "\nL_as " << c->lipschitz_as
        << '\n';
    }
    if (!inst.note.empty()) f << "note " << inst.note << '\n';
    if (cfg.method.name == "svrg" || cfg.method.name == "sarah") {
      f << "epoch N/batch inner steps\n";
    }
    if (cfg.method.name == "sag" || cfg.method.name == "saga") f << "tables start at zero\n";
  }
  return out;
}

std::vector<AggregateRow> aggregate_runs(const std::vector<std::vector<RunRecord>>& runs) {
  std::size_t longest = 0;
  for (const auto& r : runs) longest = std::max(longest, r.size());
  std::vector<AggregateRow> rows;
  RngStream rng(0xa66, 0);
  for (std::size_t i = 0; i < longest; ++i) {
    std::vector<double> gaps;
    double evals = 0.0;
    std::size_t count = 0;
    std::size_t iter = 0;
    for (const auto& r : runs) {
      if (i >= r.size()) continue;
      iter = r[i].iter;
      evals += static_cast<double>(r[i].grad_evals_cum);
      ++count;
      if (std::isfinite(r[i].opt_gap)) gaps.push_back(r[i].opt_gap);
    }
    AggregateRow row;
    row.row = i;
    row.iter = iter;
    row.replicates = count;
    row.grad_evals_mean = evals / static_cast<double>(count);
    if (gaps.empty()) {
      row.opt_gap_mean = row.opt_gap_p01 = row.opt_gap_p99 =
          std::numeric_limits<double>::quiet_NaN();
    } else {
      RngStream row_rng = rng.derive(i);
      const Band b = bootstrap_mean_band(gaps, 1.0, 99.0, 1000, row_rng);
      row.opt_gap_mean = b.mean;
      row.opt_gap_p01 = b.lo;
      row.opt_gap_p99 = b.hi;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out) {
  out << "row,iter,replicates,grad_evals_mean,opt_gap_mean,opt_gap_p01,opt_gap_p99\n";
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.row << ',' << r.iter << ',' << r.replicates << ',' << r.grad_evals_mean << ','
        << r.opt_gap_mean << ',' << r.opt_gap_p01 << ',' << r.opt_gap_p99 << '\n';
  }
}

std::vector<AggregateRow> aggregate_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw MiceError(ErrorCode::kIo, dir + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind("replicate_", 0) == 0 && e.path().extension() == ".csv") files.push_back(e.path());
  }
  if (files.empty()) throw MiceError(ErrorCode::kIo, "no replicate_*.csv files in " + dir);
  std::sort(files.begin(), files.end());
  std::vector<std::vector<RunRecord>> runs;
  for (const auto& p : files) {
    std::ifstream in(p);
    try {
      runs.push_back(read_run_csv(in));
    } catch (const MiceError& e) {
      throw MiceError(e.code(), p.string() + ": " + e.what());
    }
  }
  const auto rows = aggregate_runs(runs);
  std::ofstream out(fs::path(dir) / "aggregate.csv");
  if (!out) throw MiceError(ErrorCode::kIo, "cannot write aggregate.csv in " + dir);
  write_aggregate_csv(rows, out);
  return rows;
}

std::string render_gap_svg(const std::vector<AggregateRow>& rows, const std::string& title) {
  constexpr double kW = 640, kH = 400, kL = 70, kR = 20, kT = 40, kB = 50;
  std::vector<std::array<double, 4>> pts;  // log x, log mean, log lo, log hi
  for (const auto& r : rows) {
    if (r.grad_evals_mean > 0 && r.opt_gap_mean > 0 && r.opt_gap_p01 > 0 && r.opt_gap_p99 > 0) {
      pts.push_back({std::log10(r.grad_evals_mean), std::log10(r.opt_gap_mean),
                     std::log10(r.opt_gap_p01), std::log10(r.opt_gap_p99)});
    }
  }
  std::ostringstream s;
  s << std::setprecision(6);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
    << "</text>\n";
  if (pts.size() >= 2) {
    double x0 = pts.front()[0], x1 = x0, y0 = pts.front()[1], y1 = y0;
    for (const auto& p : pts) {
      x0 = std::min(x0, p[0]);
      x1 = std::max(x1, p[0]);
      y0 = std::min({y0, p[1], p[2]});
      y1 = std::max({y1, p[1], p[3]});
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    auto px = [&](double x) { return kL + (x - x0) / (x1 - x0) * (kW - kL - kR); };
    auto py = [&](double y) { return kT + (y1 - y) / (y1 - y0) * (kH - kT - kB); };
    s << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR << "\" height=\""
      << kH - kT - kB << "\" fill=\"none\" stroke=\"black\"/>\n";
    s << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
    for (const auto& p : pts) s << px(p[0]) << ',' << py(p[3]) << ' ';
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) s << px((*it)[0]) << ',' << py((*it)[2]) << ' ';
    s << "\"/>\n<polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : pts) s << px(p[0]) << ',' << py(p[1]) << ' ';
    s << "\"/>\n";
    for (int e = static_cast<int>(std::ceil(x0)); e <= static_cast<int>(std::floor(x1)); ++e) {
      s << "<text x=\"" << px(e) << "\" y=\"" << kH - kB + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">1e" << e << "</text>\n";
    }
    for (int e = static_cast<int>(std::ceil(y0)); e <= static_cast<int>(std::floor(y1)); ++e) {
      s << "<text x=\"" << kL - 6 << "\" y=\"" << py(e) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">1e" << e << "</text>\n";
    }
  }
  s << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10
    << "\" text-anchor=\"middle\" font-size=\"12\">gradient evaluations</text>\n"
    << "<text x=\"16\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 16 " << kH / 2
    << ")\" text-anchor=\"middle\" font-size=\"12\">optimality gap</text>\n</svg>\n";
  return s.str();
}

}  // namespace mice
