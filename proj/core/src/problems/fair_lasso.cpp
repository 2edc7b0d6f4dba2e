#include "invex/problems/fair_lasso.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "invex/matrix_kernels.hpp"

namespace invex::fairlasso {

Eigen::MatrixXd coupling_matrix(const Eigen::VectorXd& w, const FairLassoInstance& inst) {
  const Eigen::Index n = inst.n();
  const Eigen::VectorXd r = inst.x * w - inst.y;
  Eigen::MatrixXd m(n + 1, n + 1);
  m(0, 0) = r.squaredNorm() / static_cast<double>(n) + 1.0;
  m.block(0, 1, 1, n) = (inst.gamma / static_cast<double>(n)) * r.transpose();
  m.block(1, 0, n, 1) = (inst.gamma / static_cast<double>(n)) * r;
  m.block(1, 1, n, n) = (inst.gamma * inst.gamma / static_cast<double>(n) + 1.0) *
                        Eigen::MatrixXd::Identity(n, n);
  return m;
}

double smooth_objective(const FairIterate& p, const FairLassoInstance& inst) {
  return coupling_matrix(p.w, inst).cwiseProduct(p.z).sum();
}

double objective(const FairIterate& p, const FairLassoInstance& inst) {
  return smooth_objective(p, inst) + inst.lambda * p.w.cwiseAbs().sum();
}

FairGradient gradient(const FairIterate& p, const FairLassoInstance& inst) {
  const Eigen::Index n = inst.n();
  const Eigen::VectorXd r = inst.x * p.w - inst.y;
  const Eigen::VectorXd z21 = p.z.col(0).tail(n);
  FairGradient g;
  g.w = (2.0 / static_cast<double>(n)) * inst.x.transpose() * (p.z(0, 0) * r + inst.gamma * z21);
  g.z = coupling_matrix(p.w, inst);
  return g;
}

FairEta eta(const FairIterate& p, const FairIterate& base, const FairLassoInstance& inst) {
  FairEta e;
  e.w = p.w - base.w;
  const Eigen::MatrixXd m_base = coupling_matrix(base.w, inst);
  const Eigen::MatrixXd m_new = coupling_matrix(p.w, inst);
  e.z = Eigen::LLT<Eigen::MatrixXd>(m_base).solve(m_new * (p.z - base.z));
  return e;
}

std::optional<FairIterate> step(const FairIterate& p, double alpha, const FairLassoInstance& inst,
                                bool coupled_kernel) {
  FairGradient g = gradient(p, inst);
  FairIterate next;
  next.w = soft_threshold(Eigen::VectorXd(p.w - alpha * g.w), alpha * inst.lambda);

  Eigen::MatrixXd direction;
  if (coupled_kernel) {
    const Eigen::MatrixXd m_next = coupling_matrix(next.w, inst);
    direction = Eigen::LLT<Eigen::MatrixXd>(m_next).solve(g.z * g.z);
  } else {
    direction = g.z;
  }
  Eigen::MatrixXd zbar = p.z - alpha * direction;
  zbar = 0.5 * (zbar + zbar.transpose());
  DykstraResult proj = dykstra_psd_unitdiag(zbar);
  if (!proj.converged) return std::nullopt;
  next.z = std::move(proj.z);
  return next;
}

bool feasible(const FairIterate& p, double tol) {
  if (p.z.rows() != p.z.cols()) return false;
  if ((p.z.diagonal().array() - 1.0).abs().maxCoeff() > tol) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (p.z + p.z.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

FairLassoInstance generate(int n, int d, double gamma, int sparsity, double noise_sigma,
                           double lambda, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("fairlasso::generate: n, d must be positive");
  if (sparsity < 0 || sparsity > d)
    throw std::invalid_argument("fairlasso::generate: sparsity must lie in [0, d]");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  std::uniform_int_distribution<int> coin(0, 1);

  FairLassoInstance inst;
  inst.x.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) inst.x(i, j) = gauss(rng);

  inst.w_star = Eigen::VectorXd::Zero(d);
  std::vector<int> idx(static_cast<size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  for (int k = 0; k < sparsity; ++k)
    inst.w_star(idx[static_cast<size_t>(k)]) = (coin(rng) ? 1.0 : -1.0) * mag(rng);

  inst.z_star.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) inst.z_star(i) = coin(rng) ? 1.0 : -1.0;

  Eigen::VectorXd noise(n);
  for (Eigen::Index i = 0; i < n; ++i) noise(i) = noise_sigma * gauss(rng);
  inst.y = inst.x * inst.w_star + gamma * inst.z_star + noise;

  inst.gamma = gamma;
  inst.lambda = lambda;
  inst.sparsity = sparsity;
  inst.noise_sigma = noise_sigma;
  inst.seed = seed;
  return inst;
}

VariablePoint to_point(const FairIterate& p) {
  std::vector<Block> blocks;
  blocks.push_back(Block::vector("w", p.w));
  blocks.push_back(Block::matrix("Z", p.z));
  return VariablePoint(std::move(blocks));
}

FairIterate from_point(const VariablePoint& x) {
  return {x.block("w").vec(), x.block("Z").mat()};
}

ProblemSpec make_problem(std::shared_ptr<const FairLassoInstance> inst, bool coupled_kernel) {
  ProblemSpec p;
  p.name = coupled_kernel ? "fair_lasso/pigd" : "fair_lasso/pgd";
  p.objective = [inst](const VariablePoint& x) { return objective(from_point(x), *inst); };
  p.gradient = [inst](const VariablePoint& x) {
    FairGradient g = gradient(from_point(x), *inst);
    std::vector<Block> blocks;
    blocks.push_back(Block::vector("w", std::move(g.w)));
    blocks.push_back(Block::matrix("Z", std::move(g.z)));
    return GradientVector(std::move(blocks));
  };
  p.advance = [inst, coupled_kernel](const VariablePoint& x,
                                     double alpha) -> std::optional<VariablePoint> {
    auto next = step(from_point(x), alpha, *inst, coupled_kernel);
    if (!next) return std::nullopt;
    return to_point(*next);
  };
  p.feasible = [](const VariablePoint& x, double tol) { return feasible(from_point(x), tol); };
  return p;
}

}  // namespace invex::fairlasso
