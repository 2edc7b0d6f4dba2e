#include "experiment.hpp"

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include "invex/geometries.hpp"
#include "invex/matrix_kernels.hpp"
#include "invex/problems/dag.hpp"
#include "invex/problems/fair_lasso.hpp"
#include "invex/problems/mlr.hpp"
#include "invex/trace_io.hpp"
#include "invex/verify.hpp"

namespace invex::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// --------------------------------------------------------------------------
// Config parsing

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) known = true;
    if (!known) throw ConfigError(std::string("config: unknown key \"") + item.key() + "\" in " +
                                  where);
  }
}

double number_field(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(std::string("config: ") + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(std::string("config: ") + key + " must be finite");
  return x;
}

int int_field(const json& obj, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw ConfigError(std::string("config: ") + key + " must be an integer");
  return v.get<int>();
}

bool bool_field(const json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(std::string("config: ") + key + " must be a boolean");
  return v.get<bool>();
}

void require_range(double x, double lo, double hi, const char* key) {
  if (x < lo || x > hi)
    throw ConfigError(std::string("config: ") + key + " out of range [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]");
}

json normalize_params(const std::string& problem, const json& raw, int n, int d) {
  json out;
  if (problem == "dag") {
    check_keys(raw, {"edge_prob", "weight_scale", "cyclic"}, "params");
    // Default to sparse graphs (about 1.5 edges per node): the multiplicative
    // update resolves a handful of cycles cleanly, dense graphs force many
    // weights through zero where the sign-preserving step cannot follow.
    const double edge_prob = number_field(raw, "edge_prob", std::min(1.0, 1.5 / d));
    require_range(edge_prob, 0.0, 1.0, "edge_prob");
    const double weight_scale = number_field(raw, "weight_scale", 0.9);
    if (weight_scale <= 0) throw ConfigError("config: weight_scale must be positive");
    out["edge_prob"] = edge_prob;
    out["weight_scale"] = weight_scale;
    out["cyclic"] = bool_field(raw, "cyclic", true);
  } else if (problem == "fair_lasso") {
    check_keys(raw, {"gamma", "sparsity", "noise_sigma", "lambda"}, "params");
    const double gamma = number_field(raw, "gamma", 1.0);
    if (gamma <= 0) throw ConfigError("config: gamma must be positive");
    const int sparsity = int_field(raw, "sparsity", std::max(1, d / 10));
    if (sparsity < 1 || sparsity > d)
      throw ConfigError("config: sparsity must lie in [1, d]");
    const double noise_sigma = number_field(raw, "noise_sigma", 0.1);
    if (noise_sigma < 0) throw ConfigError("config: noise_sigma must be nonnegative");
    const double lambda = number_field(raw, "lambda", 0.1);
    if (lambda < 0) throw ConfigError("config: lambda must be nonnegative");
    out["gamma"] = gamma;
    out["sparsity"] = sparsity;
    out["noise_sigma"] = noise_sigma;
    out["lambda"] = lambda;
  } else if (problem == "mlr") {
    check_keys(raw, {"separation", "noise_sigma", "lambda1", "lambda2"}, "params");
    const double separation = number_field(raw, "separation", 2.0);
    if (separation < 0) throw ConfigError("config: separation must be nonnegative");
    const double noise_sigma = number_field(raw, "noise_sigma", 0.1);
    if (noise_sigma < 0) throw ConfigError("config: noise_sigma must be nonnegative");
    const double lambda1 = number_field(raw, "lambda1", 0.01);
    const double lambda2 = number_field(raw, "lambda2", 0.01);
    if (lambda1 < 0 || lambda2 < 0)
      throw ConfigError("config: lambda weights must be nonnegative");
    out["separation"] = separation;
    out["noise_sigma"] = noise_sigma;
    out["lambda1"] = lambda1;
    out["lambda2"] = lambda2;
  } else {  // custom_quadratic
    check_keys(raw, {"smoothness", "strong_convexity"}, "params");
    const double smoothness = number_field(raw, "smoothness", 1.0);
    if (smoothness <= 0) throw ConfigError("config: smoothness must be positive");
    const double strong = number_field(raw, "strong_convexity", smoothness / 50.0);
    if (strong <= 0 || strong > smoothness)
      throw ConfigError("config: strong_convexity must lie in (0, smoothness]");
    out["smoothness"] = smoothness;
    out["strong_convexity"] = strong;
  }
  return out;
}

// --------------------------------------------------------------------------
// Shared samplers and kernels for setup and verification

Eigen::MatrixXd symmetric_gauss(Eigen::Index m, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = gauss(rng) * scale;
  return 0.5 * (g + g.transpose());
}

Eigen::VectorXd gauss_vector(Eigen::Index m, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(m);
  for (Eigen::Index i = 0; i < m; ++i) v(i) = gauss(rng) * scale;
  return v;
}

// Weights with every entry nonzero, rescaled so that r(W.W) equals radius.
// The quotient kernel of the acyclicity geometry is blind to zero entries, so
// probes of its exact-equality identity must sample full supports.
Eigen::MatrixXd full_support_weights(int d, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.2, 1.0);
  std::bernoulli_distribution flip(0.5);
  Eigen::MatrixXd w(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) w(i, j) = (flip(rng) ? 1.0 : -1.0) * mag(rng);
  const double r = spectral_radius(w.cwiseProduct(w));
  if (r > 0) w *= std::sqrt(radius / r);
  return w;
}

ObjectiveFn dag_objective_fn() {
  return [](const VariablePoint& p) { return dag::objective(p.block("W").mat()); };
}

GradientFn dag_gradient_fn() {
  return [](const VariablePoint& p) {
    return GradientVector::single_matrix(dag::gradient(p.block("W").mat()), "W");
  };
}

verify::EtaFn euclidean_eta() {
  return [](const VariablePoint& y, const VariablePoint& x) { return y - x; };
}

VariablePoint fair_to_point_raw(const Eigen::VectorXd& w, const Eigen::MatrixXd& z) {
  fairlasso::FairIterate it;
  it.w = w;
  it.z = z;
  return fairlasso::to_point(it);
}

VariablePoint mlr_to_point_raw(const Eigen::VectorXd& t, const Eigen::MatrixXd& w,
                               const Eigen::MatrixXd& u) {
  mlr::MlrIterate it;
  it.t = t;
  it.w = w;
  it.u = u;
  return mlr::to_point(it);
}

struct QuadraticInstance {
  Eigen::VectorXd scales;  // log spaced eigenvalues in [mu, L]
  Eigen::VectorXd center;
};

QuadraticInstance make_quadratic(int d, double smoothness, double strong, std::uint64_t seed) {
  QuadraticInstance q;
  q.scales.resize(d);
  for (int i = 0; i < d; ++i) {
    const double t = d == 1 ? 1.0 : static_cast<double>(i) / (d - 1);
    q.scales(i) = strong * std::pow(smoothness / strong, t);
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  q.center = gauss_vector(d, 1.0, rng);
  return q;
}

ProblemSpec quadratic_problem(const QuadraticInstance& q) {
  ProblemSpec spec;
  spec.name = "custom_quadratic";
  const auto inst = std::make_shared<const QuadraticInstance>(q);
  spec.objective = [inst](const VariablePoint& p) {
    const Eigen::VectorXd delta = p.block("x").vec() - inst->center;
    return 0.5 * delta.dot(inst->scales.cwiseProduct(delta));
  };
  spec.gradient = [inst](const VariablePoint& p) {
    const Eigen::VectorXd delta = p.block("x").vec() - inst->center;
    return GradientVector::single(inst->scales.cwiseProduct(delta), "x");
  };
  spec.geometry = make_euclidean();
  return spec;
}

// --------------------------------------------------------------------------
// Step size estimation (used when the config leaves alpha unset)

double inverse_smoothness(double estimate) {
  if (!std::isfinite(estimate) || estimate <= 1e-12) return 1e-2;
  return 1.0 / estimate;
}

double estimate_alpha(const ExperimentConfig& config, const VariablePoint& x0) {
  const std::uint64_t probe_seed = config.seed ^ 0xa5a5a5a5ULL;
  if (config.problem == "custom_quadratic")
    return 1.0 / config.params.at("smoothness").get<double>();
  if (config.problem == "dag") {
    const int d = config.d;
    // Curvature of the acyclicity objective grows sharply toward the edge of
    // the admissible region, so probe across the radius range iterates visit.
    verify::Sampler sampler = [d](std::mt19937_64& rng) {
      std::uniform_real_distribution<double> radius(0.05, 0.8);
      return dag::to_point(full_support_weights(d, radius(rng), rng));
    };
    const double L = verify::estimate_smoothness(dag_objective_fn(), dag_gradient_fn(),
                                                 euclidean_eta(), sampler, 100, probe_seed);
    double alpha = inverse_smoothness(L);
    // The multiplicative update also has to keep I - W.W inside the log
    // domain, a constraint the smoothness estimate cannot see. Back off until
    // the first step from x0 is admissible; both compare arms share this value.
    const Eigen::MatrixXd w0 = x0.block("W").mat();
    for (int i = 0; i < 60 && !dag::step(w0, alpha).ok(); ++i) alpha *= 0.5;
    return alpha;
  }
  if (config.problem == "fair_lasso") {
    const auto inst = std::make_shared<const fairlasso::FairLassoInstance>(fairlasso::generate(
        config.n, config.d, config.params.at("gamma").get<double>(),
        config.params.at("sparsity").get<int>(), config.params.at("noise_sigma").get<double>(),
        config.params.at("lambda").get<double>(), config.seed));
    ObjectiveFn f = [inst](const VariablePoint& p) {
      return fairlasso::smooth_objective(fairlasso::from_point(p), *inst);
    };
    GradientFn g = [inst](const VariablePoint& p) {
      const fairlasso::FairGradient fg = fairlasso::gradient(fairlasso::from_point(p), *inst);
      std::vector<Block> blocks;
      blocks.push_back(Block::vector("w", fg.w));
      blocks.push_back(Block::matrix("Z", fg.z));
      return GradientVector(std::move(blocks));
    };
    const Eigen::Index m = inst->n() + 1;
    verify::Sampler sampler = [m, dcols = inst->d()](std::mt19937_64& rng) {
      const Eigen::VectorXd w = gauss_vector(dcols, 0.5, rng);
      const Eigen::MatrixXd z =
          Eigen::MatrixXd::Identity(m, m) + symmetric_gauss(m, 0.1, rng);
      return fair_to_point_raw(w, z);
    };
    const double L = verify::estimate_smoothness(f, g, euclidean_eta(), sampler, 60, probe_seed);
    return inverse_smoothness(L);
  }
  // mlr
  const auto inst = std::make_shared<const mlr::MlrInstance>(mlr::generate(
      config.n, config.d, config.params.at("separation").get<double>(),
      config.params.at("noise_sigma").get<double>(), config.params.at("lambda1").get<double>(),
      config.params.at("lambda2").get<double>(), config.seed));
  ObjectiveFn f = [inst](const VariablePoint& p) {
    return mlr::smooth_objective(mlr::from_point(p), *inst);
  };
  GradientFn g = [inst](const VariablePoint& p) {
    const mlr::MlrGradient mg = mlr::gradient(mlr::from_point(p), *inst);
    std::vector<Block> blocks;
    blocks.push_back(Block::vector("t", mg.t));
    blocks.push_back(Block::matrix("W", mg.w));
    blocks.push_back(Block::matrix("U", mg.u));
    return GradientVector(std::move(blocks));
  };
  const Eigen::Index m = inst->d() + 1;
  verify::Sampler sampler = [nrows = inst->n(), m](std::mt19937_64& rng) {
    const Eigen::VectorXd t = gauss_vector(nrows, 0.5, rng);
    const Eigen::MatrixXd w = Eigen::MatrixXd::Identity(m, m) + symmetric_gauss(m, 0.1, rng);
    const Eigen::MatrixXd u = Eigen::MatrixXd::Identity(m, m) + symmetric_gauss(m, 0.1, rng);
    return mlr_to_point_raw(t, w, u);
  };
  const double L = verify::estimate_smoothness(f, g, euclidean_eta(), sampler, 60, probe_seed);
  return inverse_smoothness(L);
}

// --------------------------------------------------------------------------
// Zero step runs. StepSchedule requires a positive alpha, so the degenerate
// alpha = 0 experiment replays the loop semantics here with a literal zero.

IterationTrace zero_alpha_trace(const ProblemSpec& problem, const VariablePoint& x0,
                                const RunOptions& opts, bool projected) {
  if (projected && problem.feasible && !problem.feasible(x0, opts.feasibility_tol))
    throw std::invalid_argument("pigd run: x0 is not feasible");
  const auto started = std::chrono::steady_clock::now();
  auto elapsed_ms = [&]() {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
        .count();
  };

  IterationTrace trace;
  VariablePoint x = x0;
  double fx = problem.objective(x);
  GradientVector gx = problem.gradient(x);
  double gnorm = gx.norm();
  trace.rows.push_back({0, fx, gnorm, 0.0, elapsed_ms()});

  auto finish = [&](TerminalStatus status) {
    trace.status = status;
    trace.final_point = std::move(x);
    return std::move(trace);
  };

  if (!std::isfinite(fx) || !std::isfinite(gnorm) || fx > opts.divergence_threshold)
    return finish(TerminalStatus::diverged);
  if (gnorm <= opts.grad_tol) return finish(TerminalStatus::converged);

  for (int k = 1; k <= opts.max_iter; ++k) {
    std::optional<VariablePoint> next;
    if (problem.advance) {
      next = problem.advance(x, 0.0);
    } else {
      next = problem.geometry->step_solve(x, 0.0 * gx);
      if (next && projected) next = problem.projector(*next);
    }
    if (!next || !next->all_finite()) return finish(TerminalStatus::step_solve_failed);
    const double step_norm = (*next - x).norm();
    x = std::move(*next);
    fx = problem.objective(x);
    gx = problem.gradient(x);
    gnorm = gx.norm();
    trace.rows.push_back({k, fx, gnorm, step_norm, elapsed_ms()});
    if (!std::isfinite(fx) || !std::isfinite(gnorm) || fx > opts.divergence_threshold)
      return finish(TerminalStatus::diverged);
    if (gnorm <= opts.grad_tol) return finish(TerminalStatus::converged);
  }
  return finish(TerminalStatus::max_iter);
}

// --------------------------------------------------------------------------
// Reports

json probe_json(const verify::ProbeReport& r) {
  return json{{"samples_tested", r.samples_tested},
              {"violations", r.violations},
              {"worst_residual", r.worst_residual},
              {"tolerance_used", r.tolerance_used},
              {"clean", r.clean()}};
}

json rate_fit_json(const verify::RateFit& fit) {
  return json{{"model", fit.model == verify::RateModel::sublinear_1_over_k
                            ? "sublinear_1_over_k"
                            : "linear_geometric"},
              {"constant", fit.fitted_constant},
              {"r_squared", fit.r_squared}};
}

json init_point_json(const VariablePoint& p) {
  const Eigen::VectorXd flat = p.flatten();
  json values = json::array();
  for (Eigen::Index i = 0; i < flat.size(); ++i) values.push_back(flat(i));
  return json{{"digest", digest_point(p)}, {"flat", std::move(values)}};
}

void write_json_file(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << "\n";
}

int first_iteration_at_or_below(const IterationTrace& trace, double threshold) {
  for (const auto& row : trace.rows)
    if (row.objective <= threshold) return row.iter;
  return -1;
}

}  // namespace

// --------------------------------------------------------------------------

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid json: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(doc, {"problem", "algorithm", "seed", "alpha", "max_iter", "grad_tol", "dims",
                   "params"},
             "config");

  ExperimentConfig c;
  if (!doc.contains("problem") || !doc.at("problem").is_string())
    throw ConfigError("config: problem must be a string");
  c.problem = doc.at("problem").get<std::string>();
  if (c.problem != "dag" && c.problem != "fair_lasso" && c.problem != "mlr" &&
      c.problem != "custom_quadratic")
    throw ConfigError("config: unknown problem \"" + c.problem + "\"");

  if (!doc.contains("algorithm") || !doc.at("algorithm").is_string())
    throw ConfigError("config: algorithm must be a string");
  c.algorithm = doc.at("algorithm").get<std::string>();
  if (c.algorithm != "igd" && c.algorithm != "gd" && c.algorithm != "pigd" &&
      c.algorithm != "pgd")
    throw ConfigError("config: unknown algorithm \"" + c.algorithm + "\"");
  const bool constrained = c.problem == "fair_lasso" || c.problem == "mlr";
  if (constrained && c.algorithm != "pigd" && c.algorithm != "pgd")
    throw ConfigError("config: " + c.problem + " requires algorithm pigd or pgd");
  if (!constrained && c.algorithm != "igd" && c.algorithm != "gd")
    throw ConfigError("config: " + c.problem + " requires algorithm igd or gd");

  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                   s.get<long long>() < 0))
      throw ConfigError("config: seed must be a nonnegative integer");
    c.seed = s.get<std::uint64_t>();
  }

  if (doc.contains("alpha") && !doc.at("alpha").is_null()) {
    if (!doc.at("alpha").is_number()) throw ConfigError("config: alpha must be a number");
    const double a = doc.at("alpha").get<double>();
    if (!std::isfinite(a) || a < 0)
      throw ConfigError("config: alpha must be a finite nonnegative number");
    c.alpha = a;
  }

  c.max_iter = int_field(doc, "max_iter", 1000);
  if (c.max_iter < 1) throw ConfigError("config: max_iter must be at least 1");
  c.grad_tol = number_field(doc, "grad_tol", 1e-8);
  if (c.grad_tol < 0) throw ConfigError("config: grad_tol must be nonnegative");

  json dims = doc.value("dims", json::object());
  if (!dims.is_object()) throw ConfigError("config: dims must be an object");
  check_keys(dims, {"n", "d"}, "dims");
  c.n = int_field(dims, "n", 0);
  c.d = int_field(dims, "d", 0);
  if (c.problem == "dag") {
    if (c.d < 2) throw ConfigError("config: dag requires dims.d >= 2");
  } else if (c.problem == "custom_quadratic") {
    if (c.d < 1) throw ConfigError("config: custom_quadratic requires dims.d >= 1");
  } else {
    if (c.n < 1 || c.d < 1)
      throw ConfigError("config: " + c.problem + " requires dims.n >= 1 and dims.d >= 1");
  }

  json params = doc.value("params", json::object());
  if (!params.is_object()) throw ConfigError("config: params must be an object");
  c.params = normalize_params(c.problem, params, c.n, c.d);
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

ExperimentSetup build_setup(const ExperimentConfig& config) {
  ExperimentSetup s;
  if (config.problem == "dag") {
    dag::DagInstance inst =
        dag::generate(config.d, config.params.at("edge_prob").get<double>(),
                      config.params.at("weight_scale").get<double>(),
                      config.params.at("cyclic").get<bool>(), config.seed);
    Eigen::MatrixXd w0 = inst.weights;
    // Keep the start well inside the admissible region.
    const double r = spectral_radius(w0.cwiseProduct(w0));
    if (r > 0.5) w0 *= std::sqrt(0.5 / r);
    s.problem = dag::make_problem(config.algorithm == "gd");
    s.x0 = dag::to_point(w0);
    s.f_star = 0.0;
  } else if (config.problem == "custom_quadratic") {
    const QuadraticInstance q =
        make_quadratic(config.d, config.params.at("smoothness").get<double>(),
                       config.params.at("strong_convexity").get<double>(), config.seed);
    s.problem = quadratic_problem(q);
    std::mt19937_64 rng(config.seed);
    s.x0 = BlockVector::single(gauss_vector(config.d, 1.0, rng), "x");
    s.f_star = 0.0;
  } else if (config.problem == "fair_lasso") {
    const auto inst = std::make_shared<const fairlasso::FairLassoInstance>(fairlasso::generate(
        config.n, config.d, config.params.at("gamma").get<double>(),
        config.params.at("sparsity").get<int>(), config.params.at("noise_sigma").get<double>(),
        config.params.at("lambda").get<double>(), config.seed));
    s.problem = fairlasso::make_problem(inst, config.algorithm == "pigd");
    std::mt19937_64 rng(config.seed ^ 0x1234abcdULL);
    const Eigen::Index m = inst->n() + 1;
    s.x0 = fair_to_point_raw(gauss_vector(inst->d(), 1.0, rng),
                             Eigen::MatrixXd::Identity(m, m));
  } else {  // mlr
    const auto inst = std::make_shared<const mlr::MlrInstance>(mlr::generate(
        config.n, config.d, config.params.at("separation").get<double>(),
        config.params.at("noise_sigma").get<double>(),
        config.params.at("lambda1").get<double>(), config.params.at("lambda2").get<double>(),
        config.seed));
    s.problem = mlr::make_problem(inst, config.algorithm == "pigd");
    std::mt19937_64 rng(config.seed ^ 0x5678ef01ULL);
    const Eigen::Index m = inst->d() + 1;
    // Asymmetric starts: with W0 = U0 the mixture gradients coincide and the
    // label coordinates never move.
    auto psd_start = [&]() {
      const Eigen::MatrixXd raw =
          Eigen::MatrixXd::Identity(m, m) + symmetric_gauss(m, 0.05, rng);
      const DykstraResult proj = dykstra_psd_fixed_entry(raw, m - 1, 1.0);
      return proj.z;
    };
    const Eigen::MatrixXd w0 = psd_start();
    const Eigen::MatrixXd u0 = psd_start();
    s.x0 = mlr_to_point_raw(Eigen::VectorXd::Zero(inst->n()), w0, u0);
  }
  s.estimated_alpha = config.alpha.has_value() ? 0.0 : estimate_alpha(config, s.x0);
  return s;
}

RunArtifacts execute(const ExperimentConfig& config, const ExperimentSetup& setup) {
  RunArtifacts art;
  art.alpha_from_config = config.alpha.has_value();
  art.alpha_used = config.alpha.value_or(setup.estimated_alpha);
  art.init_digest = digest_point(setup.x0);

  RunOptions opts;
  opts.max_iter = config.max_iter;
  opts.grad_tol = config.grad_tol;
  const bool projected = config.algorithm == "pigd" || config.algorithm == "pgd";
  if (art.alpha_used == 0.0) {
    art.trace = zero_alpha_trace(setup.problem, setup.x0, opts, projected);
  } else {
    StepSchedule schedule;
    schedule.alpha = art.alpha_used;
    art.trace = projected ? pigd_run(setup.problem, setup.x0, schedule, opts)
                          : igd_run(setup.problem, setup.x0, schedule, opts);
  }
  return art;
}

std::string digest_point(const VariablePoint& p) {
  const Eigen::VectorXd flat = p.flatten();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(flat.data());
  const size_t count = static_cast<size_t>(flat.size()) * sizeof(double);
  for (size_t i = 0; i < count; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << hash;
  return out.str();
}

int run_command(const std::string& config_path, const std::string& output_dir) {
  const ExperimentConfig config = parse_config_file(config_path);
  const ExperimentSetup setup = build_setup(config);
  const RunArtifacts art = execute(config, setup);

  fs::create_directories(output_dir);
  write_trace_csv(art.trace, (fs::path(output_dir) / "trace.csv").string());

  json report{{"problem", config.problem},
              {"algorithm", config.algorithm},
              {"seed", config.seed},
              {"alpha", art.alpha_used},
              {"alpha_source", art.alpha_from_config ? "config" : "estimated"},
              {"max_iter", config.max_iter},
              {"grad_tol", config.grad_tol},
              {"status", std::string(to_string(art.trace.status))},
              {"iterations", art.trace.iterations()},
              {"final_objective", art.trace.back().objective},
              {"final_grad_norm", art.trace.back().grad_norm},
              {"init_digest", art.init_digest},
              {"elapsed_ms", art.trace.back().elapsed_ms}};
  if (setup.f_star && art.trace.rows.size() >= 10) {
    try {
      report["rate_fit"] = rate_fit_json(verify::fit_rate(art.trace, *setup.f_star));
    } catch (const std::exception&) {
      // Not enough usable rows (e.g. already at the optimum); omit the fit.
    }
  }
  write_json_file(fs::path(output_dir) / "report.json", report);

  const bool solver_ok = art.trace.status == TerminalStatus::converged ||
                         art.trace.status == TerminalStatus::max_iter;
  return solver_ok ? 0 : 1;
}

int compare_command(const std::string& path_a, const std::string& path_b,
                    const std::string& output_dir) {
  const ExperimentConfig a = parse_config_file(path_a);
  const ExperimentConfig b = parse_config_file(path_b);
  if (a.seed != b.seed) throw ConfigError("compare: seeds must match");
  if (a.algorithm == b.algorithm)
    throw ConfigError("compare: configs must differ in algorithm");
  if (a.problem != b.problem || a.alpha != b.alpha || a.max_iter != b.max_iter ||
      a.grad_tol != b.grad_tol || a.n != b.n || a.d != b.d || a.params != b.params)
    throw ConfigError("compare: configs may differ only in algorithm");

  const ExperimentSetup setup_a = build_setup(a);
  const ExperimentSetup setup_b = build_setup(b);
  const RunArtifacts art_a = execute(a, setup_a);
  const RunArtifacts art_b = execute(b, setup_b);
  if (art_a.init_digest != art_b.init_digest)
    throw std::logic_error("compare: initial iterates diverged between arms");

  fs::create_directories(output_dir);
  const fs::path out(output_dir);
  write_trace_csv(art_a.trace, (out / "trace_a.csv").string());
  write_trace_csv(art_b.trace, (out / "trace_b.csv").string());
  write_json_file(out / "init_a.json", init_point_json(setup_a.x0));
  write_json_file(out / "init_b.json", init_point_json(setup_b.x0));

  // Threshold: the worst final objective among arms that finished with a
  // finite value, so "iterations to threshold" is meaningful for both.
  std::optional<double> threshold;
  for (const IterationTrace* trace : {&art_a.trace, &art_b.trace}) {
    const double final_obj = trace->back().objective;
    if (trace->status == TerminalStatus::diverged || !std::isfinite(final_obj)) continue;
    threshold = threshold ? std::max(*threshold, final_obj) : final_obj;
  }
  const int hit_a = threshold ? first_iteration_at_or_below(art_a.trace, *threshold) : -1;
  const int hit_b = threshold ? first_iteration_at_or_below(art_b.trace, *threshold) : -1;

  json doc{{"problem", a.problem},
           {"seed", a.seed},
           {"alpha_a", art_a.alpha_used},
           {"alpha_b", art_b.alpha_used},
           {"algorithm_a", a.algorithm},
           {"algorithm_b", b.algorithm},
           {"status_a", std::string(to_string(art_a.trace.status))},
           {"status_b", std::string(to_string(art_b.trace.status))},
           {"final_objective_a", art_a.trace.back().objective},
           {"final_objective_b", art_b.trace.back().objective},
           {"iterations_a", art_a.trace.iterations()},
           {"iterations_b", art_b.trace.iterations()},
           {"iterations_to_threshold_a", hit_a},
           {"iterations_to_threshold_b", hit_b},
           {"init_digest_a", art_a.init_digest},
           {"init_digest_b", art_b.init_digest}};
  doc["threshold"] = threshold ? json(*threshold) : json(nullptr);
  doc["ratio"] = (hit_a > 0 && hit_b > 0)
                     ? json(static_cast<double>(hit_a) / static_cast<double>(hit_b))
                     : json(nullptr);
  write_json_file(out / "comparison.json", doc);
  return 0;
}

int verify_command(const std::string& problem, std::uint64_t seed,
                   const std::string& output_dir) {
  json report{{"problem", problem}, {"seed", seed}};
  bool clean = true;
  const double fd_tolerance = 1e-5;

  if (problem == "dag") {
    verify::Sampler sampler = [](std::mt19937_64& rng) {
      return dag::to_point(full_support_weights(6, 0.5, rng));
    };
    verify::EtaFn kernel = [](const VariablePoint& y, const VariablePoint& x) {
      return GradientVector::single_matrix(dag::eta(y.block("W").mat(), x.block("W").mat()),
                                           "W");
    };
    const auto invexity = verify::check_invexity(dag_objective_fn(), dag_gradient_fn(), kernel,
                                                 sampler, 1000, 1e-8, seed);
    const auto triangle =
        verify::check_triangle(euclidean_eta(), sampler, 1.0, 2.0, 1000, 1e-9, seed + 1);
    std::mt19937_64 fd_rng(seed + 2);
    const double fd = verify::gradient_fd_check(
        dag_objective_fn(), dag_gradient_fn(),
        dag::to_point(full_support_weights(4, 0.4, fd_rng)), 1e-5);
    report["invexity"] = probe_json(invexity);
    report["triangle_euclidean"] = probe_json(triangle);
    report["gradient_fd_worst"] = fd;
    report["symmetry_ratio_estimate"] =
        verify::estimate_symmetry_ratio(kernel, sampler, 200, seed + 3);
    clean = invexity.clean() && triangle.clean() && fd <= fd_tolerance;
  } else if (problem == "fair_lasso") {
    const auto inst = std::make_shared<const fairlasso::FairLassoInstance>(
        fairlasso::generate(8, 4, 0.8, 2, 0.05, 0.1, seed));
    ObjectiveFn f = [inst](const VariablePoint& p) {
      return fairlasso::smooth_objective(fairlasso::from_point(p), *inst);
    };
    GradientFn g = [inst](const VariablePoint& p) {
      const fairlasso::FairGradient fg = fairlasso::gradient(fairlasso::from_point(p), *inst);
      std::vector<Block> blocks;
      blocks.push_back(Block::vector("w", fg.w));
      blocks.push_back(Block::matrix("Z", fg.z));
      return GradientVector(std::move(blocks));
    };
    verify::EtaFn kernel = [inst](const VariablePoint& y, const VariablePoint& x) {
      const fairlasso::FairEta e =
          fairlasso::eta(fairlasso::from_point(y), fairlasso::from_point(x), *inst);
      std::vector<Block> blocks;
      blocks.push_back(Block::vector("w", e.w));
      blocks.push_back(Block::matrix("Z", e.z));
      return GradientVector(std::move(blocks));
    };
    const Eigen::Index m = inst->n() + 1;
    verify::Sampler feasible_sampler = [inst, m](std::mt19937_64& rng) {
      const Eigen::VectorXd w = gauss_vector(inst->d(), 0.5, rng);
      const Eigen::MatrixXd raw =
          Eigen::MatrixXd::Identity(m, m) + symmetric_gauss(m, 0.2, rng);
      const DykstraResult proj = dykstra_psd_unitdiag(raw);
      return fair_to_point_raw(w, proj.z);
    };
    verify::Sampler wide_sampler = [inst, m](std::mt19937_64& rng) {
      const Eigen::VectorXd w = gauss_vector(inst->d(), 1.0, rng);
      return fair_to_point_raw(w, symmetric_gauss(m, 0.7, rng));
    };
    verify::ProjectorMap projector = [inst, m](const VariablePoint& p) {
      const fairlasso::FairIterate it = fairlasso::from_point(p);
      const DykstraResult proj = dykstra_psd_unitdiag(0.5 * (it.z + it.z.transpose()));
      return fair_to_point_raw(it.w, proj.z);
    };
    const auto invexity = verify::check_invexity(f, g, kernel, feasible_sampler, 1000, 1e-8, seed);
    const auto contraction =
        verify::check_contraction(projector, euclidean_eta(), wide_sampler, 500, 1e-6, seed + 1);
    const auto triangle =
        verify::check_triangle(euclidean_eta(), feasible_sampler, 1.0, 2.0, 1000, 1e-9, seed + 2);
    std::mt19937_64 fd_rng(seed + 3);
    const auto small = std::make_shared<const fairlasso::FairLassoInstance>(
        fairlasso::generate(6, 3, 0.8, 2, 0.05, 0.1, seed + 4));
    ObjectiveFn fsmall = [small](const VariablePoint& p) {
      return fairlasso::smooth_objective(fairlasso::from_point(p), *small);
    };
    GradientFn gsmall = [small](const VariablePoint& p) {
      const fairlasso::FairGradient fg = fairlasso::gradient(fairlasso::from_point(p), *small);
      std::vector<Block> blocks;
      blocks.push_back(Block::vector("w", fg.w));
      blocks.push_back(Block::matrix("Z", fg.z));
      return GradientVector(std::move(blocks));
    };
    const Eigen::Index msmall = small->n() + 1;
    const Eigen::MatrixXd zprobe =
        dykstra_psd_unitdiag(Eigen::MatrixXd::Identity(msmall, msmall) +
                             symmetric_gauss(msmall, 0.2, fd_rng))
            .z;
    const double fd = verify::gradient_fd_check(
        fsmall, gsmall, fair_to_point_raw(gauss_vector(small->d(), 0.5, fd_rng), zprobe), 1e-5);
    report["invexity"] = probe_json(invexity);
    report["contraction"] = probe_json(contraction);
    report["triangle_euclidean"] = probe_json(triangle);
    report["gradient_fd_worst"] = fd;
    clean = invexity.clean() && contraction.clean() && triangle.clean() && fd <= fd_tolerance;
  } else if (problem == "mlr") {
    const auto inst = std::make_shared<const mlr::MlrInstance>(
        mlr::generate(8, 3, 2.0, 0.05, 0.02, 0.02, seed));
    ObjectiveFn f = [inst](const VariablePoint& p) {
      return mlr::smooth_objective(mlr::from_point(p), *inst);
    };
    GradientFn g = [inst](const VariablePoint& p) {
      const mlr::MlrGradient mg = mlr::gradient(mlr::from_point(p), *inst);
      std::vector<Block> blocks;
      blocks.push_back(Block::vector("t", mg.t));
      blocks.push_back(Block::matrix("W", mg.w));
      blocks.push_back(Block::matrix("U", mg.u));
      return GradientVector(std::move(blocks));
    };
    verify::EtaFn kernel = [inst](const VariablePoint& y, const VariablePoint& x) {
      const mlr::MlrEta e = mlr::eta(mlr::from_point(y), mlr::from_point(x), *inst);
      std::vector<Block> blocks;
      blocks.push_back(Block::vector("t", e.t));
      blocks.push_back(Block::matrix("W", e.w));
      blocks.push_back(Block::matrix("U", e.u));
      return GradientVector(std::move(blocks));
    };
    const Eigen::Index m = inst->d() + 1;
    verify::Sampler feasible_sampler = [inst, m](std::mt19937_64& rng) {
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      Eigen::VectorXd t(inst->n());
      for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = unit(rng);
      auto psd = [&]() {
        const Eigen::MatrixXd raw =
            Eigen::MatrixXd::Identity(m, m) + symmetric_gauss(m, 0.4, rng);
        return dykstra_psd_fixed_entry(raw, m - 1, 1.0).z;
      };
      const Eigen::MatrixXd w = psd();
      const Eigen::MatrixXd u = psd();
      return mlr_to_point_raw(t, w, u);
    };
    verify::Sampler wide_sampler = [inst, m](std::mt19937_64& rng) {
      return mlr_to_point_raw(gauss_vector(inst->n(), 2.0, rng), symmetric_gauss(m, 0.7, rng),
                              symmetric_gauss(m, 0.7, rng));
    };
    verify::ProjectorMap projector = [inst, m](const VariablePoint& p) {
      const mlr::MlrIterate it = mlr::from_point(p);
      mlr::MlrIterate out;
      out.t = box_project_linf(it.t, 1.0);
      out.w = dykstra_psd_fixed_entry(0.5 * (it.w + it.w.transpose()), m - 1, 1.0).z;
      out.u = dykstra_psd_fixed_entry(0.5 * (it.u + it.u.transpose()), m - 1, 1.0).z;
      return mlr_to_point_raw(out.t, out.w, out.u);
    };
    const auto invexity = verify::check_invexity(f, g, kernel, feasible_sampler, 1000, 1e-8, seed);
    const auto contraction =
        verify::check_contraction(projector, euclidean_eta(), wide_sampler, 500, 1e-6, seed + 1);
    const auto triangle =
        verify::check_triangle(euclidean_eta(), feasible_sampler, 1.0, 2.0, 1000, 1e-9, seed + 2);
    std::mt19937_64 fd_rng(seed + 3);
    const double fd =
        verify::gradient_fd_check(f, g, feasible_sampler(fd_rng), 1e-5);
    report["invexity"] = probe_json(invexity);
    report["contraction"] = probe_json(contraction);
    report["triangle_euclidean"] = probe_json(triangle);
    report["gradient_fd_worst"] = fd;
    clean = invexity.clean() && contraction.clean() && triangle.clean() && fd <= fd_tolerance;
  } else if (problem == "custom_quadratic") {
    const QuadraticInstance q = make_quadratic(6, 1.0, 0.05, seed);
    const ProblemSpec spec = quadratic_problem(q);
    verify::Sampler sampler = [](std::mt19937_64& rng) {
      return BlockVector::single(gauss_vector(6, 1.0, rng), "x");
    };
    const auto invexity =
        verify::check_invexity(spec.objective, spec.gradient, euclidean_eta(), sampler, 1000,
                               1e-8, seed);
    const auto triangle =
        verify::check_triangle(euclidean_eta(), sampler, 1.0, 2.0, 1000, 1e-9, seed + 1);
    std::mt19937_64 fd_rng(seed + 2);
    const double fd =
        verify::gradient_fd_check(spec.objective, spec.gradient, sampler(fd_rng), 1e-5);
    report["invexity"] = probe_json(invexity);
    report["triangle_euclidean"] = probe_json(triangle);
    report["gradient_fd_worst"] = fd;
    clean = invexity.clean() && triangle.clean() && fd <= fd_tolerance;
  } else {
    throw ConfigError("verify: unknown problem \"" + problem + "\"");
  }

  report["gradient_fd_tolerance"] = fd_tolerance;
  report["clean"] = clean;
  fs::create_directories(output_dir);
  write_json_file(fs::path(output_dir) / "verify_report.json", report);
  return clean ? 0 : 1;
}

void apply_thread_env() {
  const char* raw = std::getenv("INVEXOPT_THREADS");
  if (!raw) return;
  char* end = nullptr;
  const long parsed = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || parsed < 1) {
    std::fprintf(stderr, "warning: ignoring INVEXOPT_THREADS=%s (want a positive integer)\n",
                 raw);
    return;
  }
  const std::string value = std::to_string(parsed);
  setenv("OPENBLAS_NUM_THREADS", value.c_str(), 1);
  setenv("OMP_NUM_THREADS", value.c_str(), 1);
  Eigen::setNbThreads(static_cast<int>(parsed));
}

}  // namespace invex::cli
