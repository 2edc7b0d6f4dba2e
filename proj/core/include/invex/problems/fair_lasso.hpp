#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "invex/optimizer.hpp"

namespace invex::fairlasso {

/// Sparse regression with a systematic group bias: y = X w* + gamma z* + e,
/// z* in {-1,+1}^n. The relaxation couples the regression weights w with a
/// unit-diagonal psd matrix Z of order n+1.
struct FairLassoInstance {
  Eigen::MatrixXd x;  // n x d design
  Eigen::VectorXd y;
  double gamma = 0.0;   // bias magnitude
  double lambda = 0.0;  // l1 weight
  Eigen::VectorXd w_star;
  Eigen::VectorXd z_star;
  int sparsity = 0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index d() const { return x.cols(); }
};

struct FairIterate {
  Eigen::VectorXd w;
  Eigen::MatrixXd z;  // order n+1
};

/// M(w) = [[r'r/n + 1, (gamma/n) r'], [(gamma/n) r, (gamma^2/n + 1) I]] with
/// r = X w - y. Positive definite for every w.
Eigen::MatrixXd coupling_matrix(const Eigen::VectorXd& w, const FairLassoInstance& inst);

/// <M(w), Z> + lambda ||w||_1.
double objective(const FairIterate& p, const FairLassoInstance& inst);
/// <M(w), Z> only.
double smooth_objective(const FairIterate& p, const FairLassoInstance& inst);

struct FairGradient {
  Eigen::VectorXd w;  // (2/n) X' (Z_11 r + gamma z_21)
  Eigen::MatrixXd z;  // M(w)
};
FairGradient gradient(const FairIterate& p, const FairLassoInstance& inst);

/// eta under the coupled kernel:
///   [w - w~;  M(w~)^{-1} M(w) (Z - Z~)].
struct FairEta {
  Eigen::VectorXd w;
  Eigen::MatrixXd z;
};
FairEta eta(const FairIterate& p, const FairIterate& base, const FairLassoInstance& inst);

/// One projected update with constant step alpha:
///   w_{t+1} = soft_threshold(w_t - alpha grad_w, alpha lambda)
///   Zbar    = Z_t - alpha * D, symmetrized, D the Z-direction
///   Z_{t+1} = Dykstra projection onto {diag = 1, psd}
/// where D = M(w_{t+1})^{-1} M(w_t) M(w_t) for the coupled kernel and plainly
/// M(w_t) for the Euclidean baseline. Empty result if Dykstra fails.
std::optional<FairIterate> step(const FairIterate& p, double alpha, const FairLassoInstance& inst,
                                bool coupled_kernel);

/// diag(Z) within tol of one and lambda_min(Z) >= -tol.
bool feasible(const FairIterate& p, double tol);

FairLassoInstance generate(int n, int d, double gamma, int sparsity, double noise_sigma,
                           double lambda, std::uint64_t seed);

VariablePoint to_point(const FairIterate& p);
FairIterate from_point(const VariablePoint& x);

/// Wired problem; iterates carry blocks "w" (vector) and "Z" (matrix).
ProblemSpec make_problem(std::shared_ptr<const FairLassoInstance> inst, bool coupled_kernel);

}  // namespace invex::fairlasso
