#include "invex/problems/mlr.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <stdexcept>

#include "invex/matrix_kernels.hpp"

namespace invex::mlr {

namespace {
double frob_dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.cwiseProduct(b).sum();
}
}  // namespace

double smooth_objective(const MlrIterate& p, const MlrInstance& inst) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < inst.n(); ++i) {
    const auto& s = inst.s[static_cast<size_t>(i)];
    acc += 0.5 * frob_dot(s, p.w + p.u) + 0.5 * p.t(i) * frob_dot(s, p.w - p.u);
  }
  return acc;
}

double objective(const MlrIterate& p, const MlrInstance& inst) {
  return smooth_objective(p, inst) + inst.lambda1 * p.w.cwiseAbs().sum() +
         inst.lambda2 * p.u.cwiseAbs().sum();
}

MlrGradient gradient(const MlrIterate& p, const MlrInstance& inst) {
  const Eigen::Index n = inst.n();
  const Eigen::Index order = inst.d() + 1;
  MlrGradient g;
  g.t.resize(n);
  g.w = Eigen::MatrixXd::Zero(order, order);
  g.u = Eigen::MatrixXd::Zero(order, order);
  const Eigen::MatrixXd diff = p.w - p.u;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = inst.s[static_cast<size_t>(i)];
    g.t(i) = 0.5 * frob_dot(s, diff);
    g.w += 0.5 * (p.t(i) + 1.0) * s;
    g.u += 0.5 * (1.0 - p.t(i)) * s;
  }
  return g;
}

Eigen::VectorXd tau(const Eigen::MatrixXd& w, const Eigen::MatrixXd& u,
                    const Eigen::MatrixXd& w_base, const Eigen::MatrixXd& u_base,
                    const MlrInstance& inst) {
  const Eigen::Index n = inst.n();
  const Eigen::MatrixXd num_diff = w - u;
  const Eigen::MatrixXd den_diff = w_base - u_base;
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = inst.s[static_cast<size_t>(i)];
    const double den = frob_dot(s, den_diff);
    out(i) = std::abs(den) < 1e-12 ? 1.0 : frob_dot(s, num_diff) / den;
  }
  return out;
}

MlrEta eta(const MlrIterate& p, const MlrIterate& base, const MlrInstance& inst) {
  MlrEta e;
  e.t = tau(p.w, p.u, base.w, base.u, inst).cwiseProduct(p.t - base.t);
  e.w = p.w - base.w;
  e.u = p.u - base.u;
  return e;
}

std::optional<MlrIterate> step(const MlrIterate& p, double alpha, const MlrInstance& inst,
                               bool lifted_kernel) {
  const Eigen::Index corner = inst.d();
  MlrGradient g = gradient(p, inst);

  const Eigen::MatrixXd wbar =
      soft_threshold(Eigen::MatrixXd(p.w - alpha * g.w), alpha * inst.lambda1);
  const Eigen::MatrixXd ubar =
      soft_threshold(Eigen::MatrixXd(p.u - alpha * g.u), alpha * inst.lambda2);
  DykstraResult wproj = dykstra_psd_fixed_entry(wbar, corner, 1.0);
  if (!wproj.converged) return std::nullopt;
  DykstraResult uproj = dykstra_psd_fixed_entry(ubar, corner, 1.0);
  if (!uproj.converged) return std::nullopt;

  MlrIterate next;
  next.w = std::move(wproj.z);
  next.u = std::move(uproj.z);

  Eigen::VectorXd tbar(inst.n());
  if (lifted_kernel) {
    const Eigen::VectorXd scale = tau(next.w, next.u, p.w, p.u, inst);
    for (Eigen::Index i = 0; i < inst.n(); ++i) {
      // Entrywise quotient convention: a zero scale freezes the coordinate.
      tbar(i) = scale(i) == 0.0 ? p.t(i) : p.t(i) - alpha * g.t(i) / scale(i);
    }
  } else {
    tbar = p.t - alpha * g.t;
  }
  next.t = box_project_linf(tbar, 1.0);
  return next;
}

bool feasible(const MlrIterate& p, double tol) {
  if (p.t.size() == 0 || p.w.rows() != p.w.cols() || p.u.rows() != p.u.cols()) return false;
  if (p.t.cwiseAbs().maxCoeff() > 1.0 + tol) return false;
  const Eigen::Index corner = p.w.rows() - 1;
  if (std::abs(p.w(corner, corner) - 1.0) > tol) return false;
  if (std::abs(p.u(corner, corner) - 1.0) > tol) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ew(0.5 * (p.w + p.w.transpose()),
                                                    Eigen::EigenvaluesOnly);
  if (ew.eigenvalues().minCoeff() < -tol) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eu(0.5 * (p.u + p.u.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return eu.eigenvalues().minCoeff() >= -tol;
}

MlrInstance generate(int n, int d, double separation, double noise_sigma, double lambda1,
                     double lambda2, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("mlr::generate: n, d must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);

  MlrInstance inst;
  inst.x.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) inst.x(i, j) = gauss(rng);

  inst.beta1_star.resize(d);
  inst.beta2_star.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) inst.beta1_star(j) = gauss(rng);
  for (Eigen::Index j = 0; j < d; ++j) inst.beta2_star(j) = gauss(rng);
  Eigen::VectorXd gap = inst.beta2_star - inst.beta1_star;
  const double gap_norm = gap.norm();
  if (gap_norm < separation) {
    // Push the components apart along their difference (or a fixed axis).
    Eigen::VectorXd dir = gap_norm > 1e-12 ? Eigen::VectorXd(gap / gap_norm)
                                           : Eigen::VectorXd(Eigen::VectorXd::Unit(d, 0));
    inst.beta2_star = inst.beta1_star + separation * dir;
  }

  inst.z_star.resize(n);
  inst.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    inst.z_star(i) = coin(rng);
    const double mean = inst.z_star(i) > 0.5 ? inst.x.row(i).dot(inst.beta1_star)
                                             : inst.x.row(i).dot(inst.beta2_star);
    inst.y(i) = mean + noise_sigma * gauss(rng);
  }

  inst.s.reserve(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd lift(d + 1);
    lift.head(d) = inst.x.row(i).transpose();
    lift(d) = -inst.y(i);
    inst.s.push_back(lift * lift.transpose());
  }

  inst.lambda1 = lambda1;
  inst.lambda2 = lambda2;
  inst.separation = separation;
  inst.noise_sigma = noise_sigma;
  inst.seed = seed;
  return inst;
}

VariablePoint to_point(const MlrIterate& p) {
  std::vector<Block> blocks;
  blocks.push_back(Block::vector("t", p.t));
  blocks.push_back(Block::matrix("W", p.w));
  blocks.push_back(Block::matrix("U", p.u));
  return VariablePoint(std::move(blocks));
}

MlrIterate from_point(const VariablePoint& x) {
  return {x.block("t").vec(), x.block("W").mat(), x.block("U").mat()};
}

ProblemSpec make_problem(std::shared_ptr<const MlrInstance> inst, bool lifted_kernel) {
  ProblemSpec p;
  p.name = lifted_kernel ? "mlr/pigd" : "mlr/pgd";
  p.objective = [inst](const VariablePoint& x) { return objective(from_point(x), *inst); };
  p.gradient = [inst](const VariablePoint& x) {
    MlrGradient g = gradient(from_point(x), *inst);
    std::vector<Block> blocks;
    blocks.push_back(Block::vector("t", std::move(g.t)));
    blocks.push_back(Block::matrix("W", std::move(g.w)));
    blocks.push_back(Block::matrix("U", std::move(g.u)));
    return GradientVector(std::move(blocks));
  };
  p.advance = [inst, lifted_kernel](const VariablePoint& x,
                                    double alpha) -> std::optional<VariablePoint> {
    auto next = step(from_point(x), alpha, *inst, lifted_kernel);
    if (!next) return std::nullopt;
    return to_point(*next);
  };
  p.feasible = [](const VariablePoint& x, double tol) { return feasible(from_point(x), tol); };
  return p;
}

}  // namespace invex::mlr
