#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "invex/geometry.hpp"

namespace invex {

struct InverseSolveOptions {
  int max_iter = 500;
  double tol = 1e-8;  // residual target, scaled by (1 + ||v||)
};

/// Solve g(y) = v by damped fixed-point iteration y <- y - s (g(y) - v),
/// starting at full steps and halving s on residual increase. Empty result on
/// breakdown or non-convergence.
std::optional<Eigen::VectorXd> generic_inverse_solve(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& g, const Eigen::VectorXd& v,
    const Eigen::VectorXd& y0, const InverseSolveOptions& opts = {});

/// Kernel for mu-PL, L-smooth objectives:
///   eta(y, x) = (1/mu) (grad f(y) + L ||y - x|| / ||grad f(x)|| * grad f(x)),
/// with the second term dropped at stationary x. The step equation has no
/// closed form; step_solve runs a damped fixed-point iteration with damping
/// mu/(2L), halving the step whenever the residual fails to decrease, at most
/// 500 iterations.
class PlGeometry final : public Geometry {
 public:
  PlGeometry(double mu, double smoothness,
             std::function<GradientVector(const VariablePoint&)> grad);

  std::string_view name() const override { return "pl"; }
  GradientVector eta(const VariablePoint& y, const VariablePoint& x) const override;
  std::optional<VariablePoint> step_solve(const VariablePoint& x,
                                          const GradientVector& v) const override;
  bool eta_vanishes_at_identity() const override { return false; }

 private:
  double mu_;
  double smoothness_;
  std::function<GradientVector(const VariablePoint&)> grad_;
};

/// Kernel for nu-quasar-convex objectives with weakness parameter beta:
///   eta(y, x) = beta / (nu (1 - beta)) (y - x),
/// so the update scales the displacement by nu (1 - beta) / beta. beta = 1
/// collapses the step to y = x.
class QuasarGeometry final : public Geometry {
 public:
  QuasarGeometry(double nu, double beta);

  std::string_view name() const override { return "quasar"; }
  GradientVector eta(const VariablePoint& y, const VariablePoint& x) const override;
  std::optional<VariablePoint> step_solve(const VariablePoint& x,
                                          const GradientVector& v) const override;

  double nu() const { return nu_; }
  double beta() const { return beta_; }

 private:
  double nu_;
  double beta_;
};

struct BetaSearchResult {
  double beta = 1.0;
  bool found = false;
};

/// Bisection for a weakness parameter beta in (0, 1] satisfying
///   beta grad f(x)^T (y - (x - beta y)/(1 - beta)) <= nu (f(y) - f(x)) + tol.
/// Not-found results signal the caller to fall back to beta = 1.
BetaSearchResult quasar_beta_search(const std::function<double(const VariablePoint&)>& f,
                                    const std::function<GradientVector(const VariablePoint&)>& grad,
                                    const VariablePoint& x, const VariablePoint& y, double nu,
                                    int max_steps = 60, double tol = 1e-10);

/// Mirror-map kernel eta(y, x) = grad psi(y) - grad psi(x) for a strictly
/// convex generator psi acting on the flattened iterate. step_solve applies
/// the closed-form inverse gradient when provided, otherwise the generic
/// damped inverse solver.
class BregmanGeometry final : public Geometry {
 public:
  struct Generator {
    std::string name;
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_inverse;  // may be empty
  };

  explicit BregmanGeometry(Generator gen);

  std::string_view name() const override { return "bregman"; }
  GradientVector eta(const VariablePoint& y, const VariablePoint& x) const override;
  std::optional<VariablePoint> step_solve(const VariablePoint& x,
                                          const GradientVector& v) const override;

  const Generator& generator() const { return gen_; }

 private:
  Generator gen_;
};

/// psi(x) = ||x||^2 / 2; the induced update is plain gradient descent.
BregmanGeometry::Generator quadratic_generator();
/// psi(x) = sum_i x_i log x_i on the positive orthant; the induced update is
/// the multiplicative-weights map y = x .* exp(-alpha g).
BregmanGeometry::Generator negative_entropy_generator();

/// Mirror-descent step y with grad psi(y) = grad psi(x) - alpha * g.
std::optional<VariablePoint> bregman_step(const VariablePoint& x, const GradientVector& g,
                                          double alpha, const BregmanGeometry::Generator& gen);

/// Two-block kernel on points (x1, x2):
///   eta(y, x) = [y1 - x1; A(y1, x1) (y2 - x2)]
/// for a caller-supplied positive definite coupling map A. step_solve inverts
/// the second block by Cholesky; failure of the factorization rejects the step.
class BlockGeometry final : public Geometry {
 public:
  using CouplingMap =
      std::function<Eigen::MatrixXd(const Eigen::VectorXd& y1, const Eigen::VectorXd& x1)>;

  explicit BlockGeometry(CouplingMap a);

  std::string_view name() const override { return "block"; }
  GradientVector eta(const VariablePoint& y, const VariablePoint& x) const override;
  std::optional<VariablePoint> step_solve(const VariablePoint& x,
                                          const GradientVector& v) const override;

 private:
  CouplingMap a_;
};

}  // namespace invex
