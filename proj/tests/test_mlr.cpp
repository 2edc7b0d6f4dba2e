#include "doctest.h"

#include <cmath>
#include <memory>
#include <random>

#include "invex/matrix_kernels.hpp"
#include "invex/optimizer.hpp"
#include "invex/problems/mlr.hpp"
#include "invex/verify.hpp"
#include "oracles.hpp"

using namespace invex;
using mlr::MlrInstance;
using mlr::MlrIterate;

namespace {

MlrInstance tiny_instance(std::uint64_t seed = 5) {
  return mlr::generate(8, 3, 2.0, 0.05, 0.02, 0.02, seed);
}

MlrIterate random_feasible_iterate(const MlrInstance& inst, std::mt19937_64& rng,
                                   double spread = 0.4) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Eigen::Index m = inst.d() + 1;
  MlrIterate p;
  p.t.resize(inst.n());
  for (Eigen::Index i = 0; i < inst.n(); ++i) p.t(i) = unit(rng);
  auto sample_psd = [&]() {
    Eigen::MatrixXd g(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) g(i, j) = gauss(rng) * spread;
    const DykstraResult proj =
        dykstra_psd_fixed_entry(Eigen::MatrixXd(Eigen::MatrixXd::Identity(m, m) + g), m - 1, 1.0);
    return proj.z;
  };
  p.w = sample_psd();
  p.u = sample_psd();
  return p;
}

}  // namespace

TEST_CASE("lifted outer products square with the data") {
  MlrInstance inst = tiny_instance();
  REQUIRE(inst.s.size() == static_cast<size_t>(inst.n()));
  for (Eigen::Index i = 0; i < inst.n(); ++i) {
    Eigen::VectorXd lift(inst.d() + 1);
    lift.head(inst.d()) = inst.x.row(i).transpose();
    lift(inst.d()) = -inst.y(i);
    CHECK((inst.s[static_cast<size_t>(i)] - lift * lift.transpose()).norm() <= 1e-12);
  }
}

TEST_CASE("objective decomposes over the mixture") {
  MlrInstance inst = tiny_instance();
  std::mt19937_64 rng(301);
  MlrIterate p = random_feasible_iterate(inst, rng);
  double expect = 0.0;
  for (Eigen::Index i = 0; i < inst.n(); ++i) {
    const auto& s = inst.s[static_cast<size_t>(i)];
    expect += 0.5 * s.cwiseProduct(p.w + p.u).sum() +
              0.5 * p.t(i) * s.cwiseProduct(p.w - p.u).sum();
  }
  CHECK(mlr::smooth_objective(p, inst) == doctest::Approx(expect).epsilon(1e-12));
  const double full = mlr::objective(p, inst);
  CHECK(full == doctest::Approx(expect + inst.lambda1 * p.w.cwiseAbs().sum() +
                                inst.lambda2 * p.u.cwiseAbs().sum())
                    .epsilon(1e-12));
}

TEST_CASE("gradients match finite differences") {
  MlrInstance inst = tiny_instance();
  const auto instp = std::make_shared<const MlrInstance>(inst);
  const ObjectiveFn f = [instp](const VariablePoint& p) {
    return mlr::smooth_objective(mlr::from_point(p), *instp);
  };
  const GradientFn g = [instp](const VariablePoint& p) {
    mlr::MlrGradient mg = mlr::gradient(mlr::from_point(p), *instp);
    std::vector<Block> blocks;
    blocks.push_back(Block::vector("t", mg.t));
    blocks.push_back(Block::matrix("W", mg.w));
    blocks.push_back(Block::matrix("U", mg.u));
    return GradientVector(std::move(blocks));
  };
  std::mt19937_64 rng(302);
  for (int trial = 0; trial < 3; ++trial) {
    MlrIterate p = random_feasible_iterate(inst, rng);
    CHECK(verify::gradient_fd_check(f, g, mlr::to_point(p), 1e-5) <= 1e-5);
  }
}

TEST_CASE("invexity identity is exact for the lifted kernel") {
  MlrInstance inst = tiny_instance();
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 100; ++trial) {
    MlrIterate a = random_feasible_iterate(inst, rng);
    MlrIterate b = random_feasible_iterate(inst, rng);
    const double gap = mlr::smooth_objective(b, inst) - mlr::smooth_objective(a, inst);
    mlr::MlrGradient g = mlr::gradient(a, inst);
    mlr::MlrEta e = mlr::eta(b, a, inst);
    const double inner =
        e.t.dot(g.t) + e.w.cwiseProduct(g.w).sum() + e.u.cwiseProduct(g.u).sum();
    CHECK(std::abs(gap - inner) <= 1e-8 * (1.0 + std::abs(gap)));
  }
}

TEST_CASE("tau falls back to identity on vanishing denominators") {
  MlrInstance inst = tiny_instance();
  std::mt19937_64 rng(304);
  MlrIterate a = random_feasible_iterate(inst, rng);
  const Eigen::VectorXd scale = mlr::tau(a.w, a.u, a.w, a.w, inst);  // base W = base U
  for (Eigen::Index i = 0; i < scale.size(); ++i) CHECK(scale(i) == 1.0);
}

TEST_CASE("projected step keeps iterates feasible and solves the lifted t equation") {
  MlrInstance inst = tiny_instance();
  std::mt19937_64 rng(305);
  MlrIterate p = random_feasible_iterate(inst, rng);
  const double alpha = 0.02;
  for (bool lifted : {true, false}) {
    auto next = mlr::step(p, alpha, inst, lifted);
    REQUIRE(next.has_value());
    CHECK(mlr::feasible(*next, 1e-8));
  }
  auto next = mlr::step(p, alpha, inst, true);
  mlr::MlrGradient g = mlr::gradient(p, inst);
  const Eigen::VectorXd scale = mlr::tau(next->w, next->u, p.w, p.u, inst);
  for (Eigen::Index i = 0; i < inst.n(); ++i) {
    const double tbar = scale(i) == 0.0 ? p.t(i) : p.t(i) - alpha * g.t(i) / scale(i);
    // Inside the box the kernel equation tau .* (t+ - t) = -alpha grad_t holds.
    if (std::abs(tbar) < 1.0)
      CHECK(scale(i) * (next->t(i) - p.t(i)) ==
            doctest::Approx(-alpha * g.t(i)).epsilon(1e-10).scale(1.0));
    else
      CHECK(std::abs(next->t(i)) == doctest::Approx(1.0));
  }
}

TEST_CASE("generator separates the two regression vectors") {
  MlrInstance inst = mlr::generate(30, 6, 3.0, 0.0, 0.01, 0.01, 17);
  CHECK((inst.beta1_star - inst.beta2_star).norm() >= 3.0 - 1e-12);
  for (Eigen::Index i = 0; i < inst.n(); ++i) {
    const double z = inst.z_star(i);
    CHECK((z == 0.0 || z == 1.0));
    const double mean = z > 0.5 ? inst.x.row(i).dot(inst.beta1_star)
                                : inst.x.row(i).dot(inst.beta2_star);
    CHECK(inst.y(i) == doctest::Approx(mean).epsilon(1e-12));  // noiseless
  }
  MlrInstance again = mlr::generate(30, 6, 3.0, 0.0, 0.01, 0.01, 17);
  CHECK((again.y - inst.y).norm() == 0.0);
}

TEST_CASE("lifted runs reach the baseline objective at least as fast") {
  auto inst = std::make_shared<const MlrInstance>(mlr::generate(12, 4, 2.5, 0.05, 0.02, 0.02, 23));
  ProblemSpec lifted = mlr::make_problem(inst, true);
  ProblemSpec plain = mlr::make_problem(inst, false);
  const Eigen::Index m = inst->d() + 1;
  MlrIterate start;
  start.t = Eigen::VectorXd::Zero(inst->n());
  start.w = Eigen::MatrixXd::Identity(m, m);
  start.u = 0.5 * Eigen::MatrixXd::Identity(m, m);
  start.u(m - 1, m - 1) = 1.0;
  const VariablePoint x0 = mlr::to_point(start);
  StepSchedule sched;
  sched.alpha = 0.01;
  RunOptions opts;
  opts.max_iter = 150;
  opts.grad_tol = 0.0;
  IterationTrace a = pigd_run(lifted, x0, sched, opts);
  IterationTrace b = pigd_run(plain, x0, sched, opts);
  REQUIRE(a.rows.size() == b.rows.size());
  const double target = b.back().objective;
  int hit = -1;
  for (const auto& row : a.rows) {
    if (row.objective <= target) {
      hit = row.iter;
      break;
    }
  }
  REQUIRE(hit >= 0);
  CHECK(hit <= b.back().iter);
}
