#pragma once

#include <cstdint>
#include <optional>

#include "invex/geometry.hpp"
#include "invex/optimizer.hpp"

namespace invex::dag {

/// Weighted adjacency matrix for acyclicity minimization. The admissible
/// domain keeps the spectral radius of W.W (entrywise square) below one; the
/// diagonal is zero (no self-loops).
struct DagInstance {
  int d = 0;
  Eigen::MatrixXd weights;
  double edge_prob = 0.0;
  double weight_scale = 0.0;
  bool cyclic = false;
  std::uint64_t seed = 0;
};

/// Membership in {W : spectral_radius(W.W) < 1 - margin}.
bool in_domain(const Eigen::MatrixXd& w, double margin = 0.0);

/// h(W) = -log det(I - W.W). Zero exactly on acyclic supports; positive
/// otherwise. Throws std::domain_error outside the admissible domain.
double objective(const Eigen::MatrixXd& w);

/// grad h(W) = 2 (I - W.W)^{-T} . W.
Eigen::MatrixXd gradient(const Eigen::MatrixXd& w);

/// eta(U, W) = -1/2 [(I - W.W)(log(I - U.U) - log(I - W.W))] (/) W, where (/)
/// is the entrywise quotient that zeroes coordinates where W vanishes.
Eigen::MatrixXd eta(const Eigen::MatrixXd& u, const Eigen::MatrixXd& w);

enum class StepError { none, negative_square, left_domain };

struct StepResult {
  Eigen::MatrixXd w;
  StepError error = StepError::none;
  bool ok() const { return error == StepError::none; }
};

/// Solve eta(W', W) = v on the support of W: W' = sign(W) . sqrt(I - M) with
/// M = exp(log(I - W.W) - 2 (I - W.W)^{-1} (v . W)). Entries of I - M below
/// -1e-6 on the support flag negative_square; recovered points outside the
/// domain flag left_domain. Small negative entries are clamped to zero.
StepResult step_from_direction(const Eigen::MatrixXd& w, const Eigen::MatrixXd& v);

/// One update with constant step alpha: step_from_direction along
/// -alpha grad h(W), diagonal forced to zero.
StepResult step(const Eigen::MatrixXd& w, double alpha);

/// Draw an instance: off-diagonal support Bernoulli(edge_prob), weights
/// uniform in [-weight_scale, weight_scale], rescaled so the squared matrix
/// has spectral radius at most 0.9. cyclic=true guarantees at least one
/// directed cycle; cyclic=false produces a DAG (acyclic support).
DagInstance generate(int d, double edge_prob, double weight_scale, bool cyclic,
                     std::uint64_t seed);

/// Geometry adapter over single-matrix-block points (block name "W").
class DagGeometry final : public Geometry {
 public:
  std::string_view name() const override { return "dag"; }
  GradientVector eta(const VariablePoint& y, const VariablePoint& x) const override;
  std::optional<VariablePoint> step_solve(const VariablePoint& x,
                                          const GradientVector& v) const override;
};

/// ProblemSpec for the update loops; euclidean_baseline swaps the kernel for
/// the identity displacement (vanilla gradient descent). The objective is
/// +infinity outside the admissible domain so escapes register as divergence.
ProblemSpec make_problem(bool euclidean_baseline = false);

VariablePoint to_point(const Eigen::MatrixXd& w);

}  // namespace invex::dag
