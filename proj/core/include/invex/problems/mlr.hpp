#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "invex/optimizer.hpp"

namespace invex::mlr {

/// Two-component mixed regression: y_i = z_i <X_i, b1> + (1 - z_i) <X_i, b2>
/// + e_i with hidden labels z_i in {0, 1}. The lifted variables are label
/// scores t in [-1, 1]^n and psd matrices W, U of order d+1 whose last
/// diagonal entry is pinned to one. S_i is the rank-one lift of (X_i, -y_i).
struct MlrInstance {
  Eigen::MatrixXd x;  // n x d design
  Eigen::VectorXd y;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::vector<Eigen::MatrixXd> s;  // n lifted outer products, order d+1
  Eigen::VectorXd beta1_star;
  Eigen::VectorXd beta2_star;
  Eigen::VectorXd z_star;  // {0,1}
  double separation = 0.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index d() const { return x.cols(); }
};

struct MlrIterate {
  Eigen::VectorXd t;
  Eigen::MatrixXd w;  // order d+1
  Eigen::MatrixXd u;  // order d+1
};

/// Smooth part: sum_i [ <S_i, W+U>/2 + t_i <S_i, W-U>/2 ].
double smooth_objective(const MlrIterate& p, const MlrInstance& inst);
/// Smooth part plus lambda1 ||vec(W)||_1 + lambda2 ||vec(U)||_1.
double objective(const MlrIterate& p, const MlrInstance& inst);

struct MlrGradient {
  Eigen::VectorXd t;  // d f / d t_i = <S_i, W - U> / 2
  Eigen::MatrixXd w;  // sum_i (t_i + 1)/2 S_i
  Eigen::MatrixXd u;  // sum_i (1 - t_i)/2 S_i
};
MlrGradient gradient(const MlrIterate& p, const MlrInstance& inst);

/// tau_i = <S_i, W - U> / <S_i, W~ - U~>; denominators below 1e-12 in
/// magnitude fall back to tau_i = 1 (identity kernel on that coordinate).
Eigen::VectorXd tau(const Eigen::MatrixXd& w, const Eigen::MatrixXd& u,
                    const Eigen::MatrixXd& w_base, const Eigen::MatrixXd& u_base,
                    const MlrInstance& inst);

/// eta under the lifted kernel: [tau .* (t - t~); W - W~; U - U~].
struct MlrEta {
  Eigen::VectorXd t;
  Eigen::MatrixXd w;
  Eigen::MatrixXd u;
};
MlrEta eta(const MlrIterate& p, const MlrIterate& base, const MlrInstance& inst);

/// One projected update with constant step alpha:
///   Wbar = soft_threshold(W - alpha grad_W, alpha lambda1), likewise Ubar;
///   W+, U+ = Dykstra projections onto {psd, corner entry = 1};
///   tbar_i = t_i - alpha grad_t_i / tau_i(W+, U+, W, U), frozen where tau_i = 0;
///   t+   = clamp to [-1, 1].
/// The Euclidean baseline skips the tau division. Empty result if a Dykstra
/// projection fails.
std::optional<MlrIterate> step(const MlrIterate& p, double alpha, const MlrInstance& inst,
                               bool lifted_kernel);

/// ||t||_inf <= 1 + tol, W and U psd within tol with corner entries within
/// tol of one.
bool feasible(const MlrIterate& p, double tol);

MlrInstance generate(int n, int d, double separation, double noise_sigma, double lambda1,
                     double lambda2, std::uint64_t seed);

VariablePoint to_point(const MlrIterate& p);
MlrIterate from_point(const VariablePoint& x);

/// Wired problem; iterates carry blocks "t" (vector), "W" and "U" (matrices).
ProblemSpec make_problem(std::shared_ptr<const MlrInstance> inst, bool lifted_kernel);

}  // namespace invex::mlr
