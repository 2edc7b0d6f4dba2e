#include "invex/geometries.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace invex {

std::optional<Eigen::VectorXd> generic_inverse_solve(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& g, const Eigen::VectorXd& v,
    const Eigen::VectorXd& y0, const InverseSolveOptions& opts) {
  const double target = opts.tol * (1.0 + v.norm());
  Eigen::VectorXd y = y0;
  Eigen::VectorXd r = g(y) - v;
  if (!r.allFinite()) return std::nullopt;
  double rnorm = r.norm();
  for (int it = 0; it < opts.max_iter; ++it) {
    if (rnorm <= target) return y;
    double step = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 50; ++bt) {
      Eigen::VectorXd ytrial = y - step * r;
      Eigen::VectorXd rtrial = g(ytrial) - v;
      if (rtrial.allFinite() && rtrial.norm() < rnorm) {
        y = std::move(ytrial);
        r = std::move(rtrial);
        rnorm = r.norm();
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) return std::nullopt;
  }
  return rnorm <= target ? std::optional<Eigen::VectorXd>(y) : std::nullopt;
}

// ---------------------------------------------------------------------------
// PL kernel

PlGeometry::PlGeometry(double mu, double smoothness,
                       std::function<GradientVector(const VariablePoint&)> grad)
    : mu_(mu), smoothness_(smoothness), grad_(std::move(grad)) {
  if (mu <= 0 || smoothness <= 0)
    throw std::invalid_argument("PlGeometry: mu and smoothness must be positive");
  if (!grad_) throw std::invalid_argument("PlGeometry: gradient callback required");
}

GradientVector PlGeometry::eta(const VariablePoint& y, const VariablePoint& x) const {
  if (!y.same_shape(x)) throw std::invalid_argument("PlGeometry::eta: shape mismatch");
  GradientVector gy = grad_(y);
  GradientVector gx = grad_(x);
  const double gx_norm = gx.norm();
  if (gx_norm > 0) {
    const double scale = smoothness_ * (y - x).norm() / gx_norm;
    gy += scale * gx;
  }
  return (1.0 / mu_) * gy;
}

std::optional<VariablePoint> PlGeometry::step_solve(const VariablePoint& x,
                                                    const GradientVector& v) const {
  if (!v.same_shape(x)) throw std::invalid_argument("PlGeometry::step_solve: shape mismatch");
  const Eigen::VectorXd vflat = v.flatten();
  const Eigen::VectorXd gx = grad_(x).flatten();
  const double gx_norm = gx.norm();
  const Eigen::VectorXd xflat = x.flatten();
  VariablePoint scratch = x;
  auto residual = [&](const Eigen::VectorXd& yflat) {
    scratch.unflatten(yflat);
    Eigen::VectorXd gy = grad_(scratch).flatten();
    if (gx_norm > 0) gy += smoothness_ * (yflat - xflat).norm() / gx_norm * gx;
    return Eigen::VectorXd((1.0 / mu_) * gy - vflat);
  };

  const double damping = mu_ / (2.0 * smoothness_);
  const double target = 1e-8 * (1.0 + vflat.norm());
  const Eigen::Index n = xflat.size();
  Eigen::VectorXd yflat = xflat;
  Eigen::VectorXd r = residual(yflat);
  if (!r.allFinite()) return std::nullopt;
  double rnorm = r.norm();
  for (int it = 0; it < 500; ++it) {
    if (rnorm <= target) break;
    const double previous = rnorm;
    // Damped fixed point with a monotone-residual safeguard: the map is not
    // a global contraction, so halve the step until the residual improves.
    double s = damping;
    bool improved = false;
    for (int bt = 0; bt < 40 && !improved; ++bt, s *= 0.5) {
      Eigen::VectorXd ytrial = yflat - s * r;
      Eigen::VectorXd rtrial = residual(ytrial);
      if (rtrial.allFinite() && rtrial.norm() < rnorm) {
        yflat.swap(ytrial);
        r.swap(rtrial);
        rnorm = r.norm();
        improved = true;
      }
    }
    if (improved && rnorm <= 0.9 * previous) continue;
    // The plain iteration can stall or crawl against the kernel's ratio term;
    // refine with a damped Gauss-Newton step on a finite-difference Jacobian.
    Eigen::MatrixXd jac(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double h = 1e-6 * (1.0 + std::abs(yflat(j)));
      Eigen::VectorXd ypert = yflat;
      ypert(j) += h;
      const Eigen::VectorXd rpert = residual(ypert);
      if (!rpert.allFinite()) return std::nullopt;
      jac.col(j) = (rpert - r) / h;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    double lev = 1e-8 * (1.0 + jtj.trace());
    for (int bt = 0; bt < 30; ++bt, lev *= 10.0) {
      Eigen::MatrixXd damped = jtj + lev * Eigen::MatrixXd::Identity(n, n);
      Eigen::VectorXd ytrial = yflat + damped.ldlt().solve(-jtr);
      Eigen::VectorXd rtrial = residual(ytrial);
      if (rtrial.allFinite() && rtrial.norm() < rnorm) {
        yflat.swap(ytrial);
        r.swap(rtrial);
        rnorm = r.norm();
        improved = true;
        break;
      }
    }
    if (!improved) return std::nullopt;
  }
  if (rnorm > target) return std::nullopt;
  VariablePoint out = x;
  out.unflatten(yflat);
  return out;
}

// ---------------------------------------------------------------------------
// Quasar kernel

QuasarGeometry::QuasarGeometry(double nu, double beta) : nu_(nu), beta_(beta) {
  if (nu <= 0 || nu > 1) throw std::invalid_argument("QuasarGeometry: nu must lie in (0, 1]");
  if (beta <= 0 || beta > 1) throw std::invalid_argument("QuasarGeometry: beta must lie in (0, 1]");
}

GradientVector QuasarGeometry::eta(const VariablePoint& y, const VariablePoint& x) const {
  if (!y.same_shape(x)) throw std::invalid_argument("QuasarGeometry::eta: shape mismatch");
  GradientVector d = y - x;
  if (beta_ == 1.0) {
    if (d.norm() != 0.0)
      throw std::domain_error("QuasarGeometry::eta: undefined for beta = 1 and y != x");
    return d;  // zero
  }
  return (beta_ / (nu_ * (1.0 - beta_))) * d;
}

std::optional<VariablePoint> QuasarGeometry::step_solve(const VariablePoint& x,
                                                        const GradientVector& v) const {
  if (!v.same_shape(x)) throw std::invalid_argument("QuasarGeometry::step_solve: shape mismatch");
  return x + (nu_ * (1.0 - beta_) / beta_) * v;
}

BetaSearchResult quasar_beta_search(const std::function<double(const VariablePoint&)>& f,
                                    const std::function<GradientVector(const VariablePoint&)>& grad,
                                    const VariablePoint& x, const VariablePoint& y, double nu,
                                    int max_steps, double tol) {
  // The acceptance condition simplifies: y - (x - beta y)/(1 - beta) equals
  // (y - x)/(1 - beta), so the left side is beta/(1-beta) * <grad f(x), y-x>.
  const double d = dot(grad(x), y - x);
  const double rhs = nu * (f(y) - f(x));
  if (d <= 0.0) {
    // Left side is nonpositive and decreasing in beta; beta = 1 is the limit.
    if (d < 0.0 || rhs >= -tol) return {1.0, true};
    return {1.0, false};
  }
  auto admissible = [&](double beta) { return beta / (1.0 - beta) * d - rhs <= tol; };
  if (!admissible(0.0)) return {1.0, false};
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < max_steps; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (admissible(mid))
      lo = mid;
    else
      hi = mid;
  }
  if (lo == 0.0) return {1.0, false};
  return {lo, true};
}

// ---------------------------------------------------------------------------
// Bregman kernel

BregmanGeometry::BregmanGeometry(Generator gen) : gen_(std::move(gen)) {
  if (!gen_.value || !gen_.grad)
    throw std::invalid_argument("BregmanGeometry: generator needs value and grad");
}

GradientVector BregmanGeometry::eta(const VariablePoint& y, const VariablePoint& x) const {
  if (!y.same_shape(x)) throw std::invalid_argument("BregmanGeometry::eta: shape mismatch");
  GradientVector out = y;
  out.unflatten(gen_.grad(y.flatten()) - gen_.grad(x.flatten()));
  return out;
}

std::optional<VariablePoint> BregmanGeometry::step_solve(const VariablePoint& x,
                                                         const GradientVector& v) const {
  if (!v.same_shape(x)) throw std::invalid_argument("BregmanGeometry::step_solve: shape mismatch");
  const Eigen::VectorXd target = gen_.grad(x.flatten()) + v.flatten();
  Eigen::VectorXd yflat;
  if (gen_.grad_inverse) {
    yflat = gen_.grad_inverse(target);
  } else {
    auto solved = generic_inverse_solve(gen_.grad, target, x.flatten());
    if (!solved) return std::nullopt;
    yflat = *solved;
  }
  if (!yflat.allFinite()) return std::nullopt;
  VariablePoint y = x;
  y.unflatten(yflat);
  return y;
}

BregmanGeometry::Generator quadratic_generator() {
  BregmanGeometry::Generator g;
  g.name = "quadratic";
  g.value = [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); };
  g.grad = [](const Eigen::VectorXd& x) { return x; };
  g.grad_inverse = [](const Eigen::VectorXd& t) { return t; };
  return g;
}

BregmanGeometry::Generator negative_entropy_generator() {
  BregmanGeometry::Generator g;
  g.name = "negative_entropy";
  g.value = [](const Eigen::VectorXd& x) { return (x.array() * x.array().log()).sum(); };
  g.grad = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.array().log() + 1.0; };
  g.grad_inverse = [](const Eigen::VectorXd& t) -> Eigen::VectorXd {
    return (t.array() - 1.0).exp();
  };
  return g;
}

std::optional<VariablePoint> bregman_step(const VariablePoint& x, const GradientVector& g,
                                          double alpha, const BregmanGeometry::Generator& gen) {
  BregmanGeometry geo(gen);
  return geo.step_solve(x, (-alpha) * g);
}

// ---------------------------------------------------------------------------
// Two-block kernel

BlockGeometry::BlockGeometry(CouplingMap a) : a_(std::move(a)) {
  if (!a_) throw std::invalid_argument("BlockGeometry: coupling map required");
}

namespace {
void require_two_vector_blocks(const VariablePoint& p, const char* op) {
  if (p.block_count() != 2 || p.block(0).is_matrix() || p.block(1).is_matrix())
    throw std::invalid_argument(std::string(op) + ": point must have two vector blocks");
}
}  // namespace

GradientVector BlockGeometry::eta(const VariablePoint& y, const VariablePoint& x) const {
  require_two_vector_blocks(x, "BlockGeometry::eta");
  if (!y.same_shape(x)) throw std::invalid_argument("BlockGeometry::eta: shape mismatch");
  const Eigen::MatrixXd a = a_(y.block(0).vec(), x.block(0).vec());
  const Eigen::Index n2 = x.block(1).vec().size();
  if (a.rows() != n2 || a.cols() != n2)
    throw std::invalid_argument("BlockGeometry::eta: coupling map has wrong shape");
  GradientVector out = y - x;
  out.block(1).vec() = a * out.block(1).vec();
  return out;
}

std::optional<VariablePoint> BlockGeometry::step_solve(const VariablePoint& x,
                                                       const GradientVector& v) const {
  require_two_vector_blocks(x, "BlockGeometry::step_solve");
  if (!v.same_shape(x)) throw std::invalid_argument("BlockGeometry::step_solve: shape mismatch");
  VariablePoint y = x;
  y.block(0).vec() += v.block(0).vec();
  const Eigen::MatrixXd a = a_(y.block(0).vec(), x.block(0).vec());
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  y.block(1).vec() += llt.solve(v.block(1).vec());
  return y;
}

}  // namespace invex
