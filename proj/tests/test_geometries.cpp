#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "invex/geometries.hpp"
#include "oracles.hpp"

using namespace invex;

namespace {

VariablePoint pt(const Eigen::VectorXd& v) { return VariablePoint::single(v, "x"); }

Eigen::VectorXd rand_vec(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(rng) * scale;
  return v;
}

double roundtrip_residual(const Geometry& geo, const VariablePoint& x, const GradientVector& v) {
  auto y = geo.step_solve(x, v);
  REQUIRE(y.has_value());
  return (geo.eta(*y, x) - v).norm() / (1.0 + v.norm());
}

}  // namespace

TEST_CASE("euclidean kernel is displacement and step is translation") {
  auto geo = make_euclidean();
  VariablePoint x = pt(Eigen::Vector3d(1, 2, 3));
  VariablePoint y = pt(Eigen::Vector3d(0, -1, 5));
  CHECK((geo->eta(y, x) - (y - x)).norm() == doctest::Approx(0.0));
  CHECK(geo->eta(x, x).norm() == doctest::Approx(0.0));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    VariablePoint a = pt(rand_vec(4, rng));
    GradientVector v = pt(rand_vec(4, rng));
    CHECK(roundtrip_residual(*geo, a, v) <= 1e-14);
    auto stepped = geo->step_solve(a, v);
    CHECK(((*stepped) - (a + v)).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("generic inverse solver inverts a monotone map") {
  auto g = [](const Eigen::VectorXd& y) {
    Eigen::VectorXd out = y;
    for (Eigen::Index i = 0; i < y.size(); ++i) out(i) = y(i) + 0.25 * std::tanh(y(i));
    return out;
  };
  Eigen::VectorXd target(2);
  target << 0.7, -0.3;
  auto sol = generic_inverse_solve(g, target, Eigen::VectorXd::Zero(2));
  REQUIRE(sol.has_value());
  CHECK((g(*sol) - target).norm() <= 1e-8 * (1.0 + target.norm()));
}

TEST_CASE("generic inverse solver reports breakdown") {
  auto g = [](const Eigen::VectorXd& y) {
    return Eigen::VectorXd(Eigen::VectorXd::Constant(y.size(), std::nan("")));
  };
  Eigen::VectorXd target = Eigen::VectorXd::Ones(2);
  auto sol = generic_inverse_solve(g, target, Eigen::VectorXd::Zero(2));
  CHECK(!sol.has_value());
}

TEST_CASE("quasar kernel scales displacement and inverts exactly") {
  const double nu = 0.9, beta = 0.5;
  QuasarGeometry geo(nu, beta);
  std::mt19937_64 rng(2);
  VariablePoint x = pt(rand_vec(5, rng));
  VariablePoint y = pt(rand_vec(5, rng));
  const double scale = beta / (nu * (1.0 - beta));
  CHECK((geo.eta(y, x) - scale * (y - x)).norm() <= 1e-14);
  for (int i = 0; i < 100; ++i) {
    VariablePoint a = pt(rand_vec(5, rng));
    GradientVector v = pt(rand_vec(5, rng));
    CHECK(roundtrip_residual(geo, a, v) <= 1e-12);
  }
  auto stepped = geo.step_solve(x, pt(Eigen::VectorXd::Ones(5)));
  CHECK(((*stepped) - (x + (nu * (1.0 - beta) / beta) * pt(Eigen::VectorXd::Ones(5)))).norm() <=
        1e-14);
}

TEST_CASE("quasar kernel at beta one pins the iterate") {
  QuasarGeometry geo(0.9, 1.0);
  VariablePoint x = pt(Eigen::Vector2d(1, 2));
  auto stepped = geo.step_solve(x, pt(Eigen::Vector2d(5, 5)));
  REQUIRE(stepped.has_value());
  CHECK(((*stepped) - x).norm() == doctest::Approx(0.0));
  CHECK(geo.eta(x, x).norm() == doctest::Approx(0.0));
  CHECK_THROWS_AS(geo.eta(pt(Eigen::Vector2d(0, 0)), x), std::domain_error);
  CHECK_THROWS_AS(QuasarGeometry(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(QuasarGeometry(0.5, 1.5), std::invalid_argument);
}

TEST_CASE("beta search certifies the quasar inequality on a convex function") {
  auto f = [](const VariablePoint& p) { return 0.5 * p.vec().squaredNorm(); };
  auto grad = [](const VariablePoint& p) { return pt(p.vec()); };
  std::mt19937_64 rng(3);
  const double nu = 1.0;
  int informative = 0;
  for (int i = 0; i < 50; ++i) {
    VariablePoint x = pt(rand_vec(4, rng));
    VariablePoint y = pt(rand_vec(4, rng));
    BetaSearchResult res = quasar_beta_search(f, grad, x, y, nu);
    CHECK(res.found);
    const double d = dot(grad(x), y - x);
    if (res.beta < 1.0) {
      ++informative;
      const double lhs = res.beta / (1.0 - res.beta) * d;
      CHECK(lhs <= nu * (f(y) - f(x)) + 1e-8);
    } else {
      CHECK(d <= 0.0);  // descent direction, beta collapses to 1
    }
  }
  CHECK(informative > 0);
}

TEST_CASE("beta search falls back when no admissible beta exists") {
  // Concave bowl: the pair below has the gradient pointing toward y while f
  // still decreases, so no positive beta satisfies the inequality.
  auto f = [](const VariablePoint& p) { return -0.5 * p.vec().squaredNorm(); };
  auto grad = [](const VariablePoint& p) { return pt(Eigen::VectorXd(-p.vec())); };
  VariablePoint x = pt(Eigen::Vector2d(1.0, 0.0));
  VariablePoint y = pt(Eigen::Vector2d(-1.1, 0.0));
  CHECK(dot(grad(x), y - x) > 0.0);
  CHECK(f(y) < f(x));
  BetaSearchResult res = quasar_beta_search(f, grad, x, y, 1.0);
  CHECK(!res.found);
  CHECK(res.beta == doctest::Approx(1.0));
}

TEST_CASE("pl kernel matches its formula and drops the ratio term at stationary points") {
  Eigen::Matrix2d a;
  a << 2.0, 0.3, 0.3, 1.0;
  auto grad = [&](const VariablePoint& p) { return pt(Eigen::VectorXd(a * p.vec())); };
  const double L = 2.1;  // >= max eigenvalue of a
  const double mu = 0.4;
  PlGeometry geo(mu, L, grad);
  VariablePoint x = pt(Eigen::Vector2d(1.0, -0.5));
  VariablePoint y = pt(Eigen::Vector2d(0.3, 0.2));
  const Eigen::VectorXd gx = a * x.vec();
  const Eigen::VectorXd expect =
      (a * y.vec() + L * (y - x).norm() / gx.norm() * gx) / mu;
  CHECK((geo.eta(y, x).vec() - expect).norm() <= 1e-14);

  VariablePoint origin = pt(Eigen::Vector2d(0.0, 0.0));
  CHECK((geo.eta(y, origin).vec() - (a * y.vec()) / mu).norm() <= 1e-14);
}

TEST_CASE("pl step solver satisfies the round trip residual") {
  Eigen::Matrix2d a;
  a << 2.0, 0.3, 0.3, 1.0;
  auto grad = [&](const VariablePoint& p) { return pt(Eigen::VectorXd(a * p.vec())); };
  PlGeometry geo(0.4, 2.1, grad);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    VariablePoint x = pt(rand_vec(2, rng));
    if (grad(x).norm() < 1e-6) continue;
    VariablePoint y = pt(Eigen::VectorXd(x.vec() + rand_vec(2, rng, 0.5)));
    const GradientVector v = geo.eta(y, x);
    auto back = geo.step_solve(x, v);
    REQUIRE(back.has_value());
    CHECK((geo.eta(*back, x) - v).norm() <= 1e-8 * (1.0 + v.norm()));
  }
}

TEST_CASE("bregman quadratic generator reduces to plain translation") {
  BregmanGeometry geo(quadratic_generator());
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    VariablePoint x = pt(rand_vec(3, rng));
    GradientVector v = pt(rand_vec(3, rng));
    CHECK(roundtrip_residual(geo, x, v) <= 1e-12);
    auto y = geo.step_solve(x, v);
    CHECK(((*y) - (x + v)).norm() <= 1e-14);
  }
}

TEST_CASE("bregman negative entropy gives the multiplicative update") {
  BregmanGeometry geo(negative_entropy_generator());
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd xv = rand_vec(3, rng).array().exp();  // positive orthant
    VariablePoint x = pt(xv);
    GradientVector g = pt(rand_vec(3, rng));
    const double alpha = 0.3;
    auto y = bregman_step(x, g, alpha, negative_entropy_generator());
    REQUIRE(y.has_value());
    const Eigen::VectorXd expect = xv.array() * (-alpha * g.vec().array()).exp();
    CHECK((y->vec() - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
    // eta is the mirror-map difference log y - log x
    const Eigen::VectorXd eta = geo.eta(*y, x).vec();
    const Eigen::VectorXd logs = (y->vec().array().log() - xv.array().log()).matrix();
    CHECK((eta - logs).norm() <= 1e-12);
    GradientVector v = pt(rand_vec(3, rng, 0.5));
    CHECK(roundtrip_residual(geo, x, v) <= 1e-10);
  }
}

TEST_CASE("block kernel couples the second block and inverts by cholesky") {
  BlockGeometry::CouplingMap map = [](const Eigen::VectorXd& y1, const Eigen::VectorXd& x1) {
    Eigen::Matrix2d a;
    const double s = 1.0 + 0.5 * (y1 - x1).squaredNorm();
    a << s, 0.2, 0.2, s;
    return a;
  };
  BlockGeometry geo(map);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    VariablePoint x({Block::vector("x1", rand_vec(3, rng)), Block::vector("x2", rand_vec(2, rng))});
    VariablePoint y({Block::vector("x1", rand_vec(3, rng)), Block::vector("x2", rand_vec(2, rng))});
    const GradientVector e = geo.eta(y, x);
    CHECK((e.block("x1").vec() - (y.block("x1").vec() - x.block("x1").vec())).norm() <= 1e-14);
    const Eigen::MatrixXd a = map(y.block("x1").vec(), x.block("x1").vec());
    CHECK((e.block("x2").vec() - a * (y.block("x2").vec() - x.block("x2").vec())).norm() <= 1e-13);

    GradientVector v(
        {Block::vector("x1", rand_vec(3, rng)), Block::vector("x2", rand_vec(2, rng))});
    CHECK(roundtrip_residual(geo, x, v) <= 1e-10);
  }
}
