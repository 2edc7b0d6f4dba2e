#include "invex/problems/dag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "invex/matrix_kernels.hpp"

namespace invex::dag {

namespace {
Eigen::MatrixXd squared(const Eigen::MatrixXd& w) { return w.cwiseProduct(w); }

Eigen::MatrixXd complement(const Eigen::MatrixXd& w) {
  return Eigen::MatrixXd::Identity(w.rows(), w.cols()) - squared(w);
}
}  // namespace

bool in_domain(const Eigen::MatrixXd& w, double margin) {
  if (w.rows() != w.cols()) return false;
  if (!w.allFinite()) return false;
  return spectral_radius(squared(w)) < 1.0 - margin;
}

double objective(const Eigen::MatrixXd& w) {
  if (!in_domain(w)) throw std::domain_error("dag::objective: W outside admissible domain");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(complement(w));
  const auto& lu_mat = lu.matrixLU();
  double log_abs = 0.0;
  double sign = lu.permutationP().determinant() > 0 ? 1.0 : -1.0;
  for (Eigen::Index i = 0; i < lu_mat.rows(); ++i) {
    const double u = lu_mat(i, i);
    if (u == 0.0) throw std::domain_error("dag::objective: singular I - W.W");
    if (u < 0) sign = -sign;
    log_abs += std::log(std::abs(u));
  }
  if (sign <= 0) throw std::domain_error("dag::objective: nonpositive det(I - W.W)");
  return -log_abs;
}

Eigen::MatrixXd gradient(const Eigen::MatrixXd& w) {
  const Eigen::MatrixXd n_inv = complement(w).partialPivLu().inverse();
  return 2.0 * n_inv.transpose().cwiseProduct(w);
}

Eigen::MatrixXd eta(const Eigen::MatrixXd& u, const Eigen::MatrixXd& w) {
  const Eigen::MatrixXd n = complement(w);
  const Eigen::MatrixXd diff = matlog_near_identity(complement(u)) - matlog_near_identity(n);
  return hadamard_div(-0.5 * (n * diff), w);
}

StepResult step_from_direction(const Eigen::MatrixXd& w, const Eigen::MatrixXd& v) {
  const Eigen::Index d = w.rows();
  const Eigen::MatrixXd n = complement(w);
  const Eigen::MatrixXd b =
      matlog_near_identity(n) - 2.0 * n.partialPivLu().solve(v.cwiseProduct(w));
  const Eigen::MatrixXd m = matexp(b);

  StepResult out;
  out.w = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (w(i, j) == 0.0) continue;
      const double sq = (i == j ? 1.0 : 0.0) - m(i, j);
      if (sq < -1e-6) {
        out.error = StepError::negative_square;
        return out;
      }
      const double mag = std::sqrt(std::max(0.0, sq));
      out.w(i, j) = w(i, j) > 0 ? mag : -mag;
    }
  }
  if (!in_domain(out.w)) {
    out.error = StepError::left_domain;
    return out;
  }
  return out;
}

StepResult step(const Eigen::MatrixXd& w, double alpha) {
  StepResult out = step_from_direction(w, -alpha * gradient(w));
  if (out.ok()) out.w.diagonal().setZero();
  return out;
}

DagInstance generate(int d, double edge_prob, double weight_scale, bool cyclic,
                     std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("dag::generate: d must be at least 2");
  if (edge_prob < 0 || edge_prob > 1)
    throw std::invalid_argument("dag::generate: edge_prob must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight(-weight_scale, weight_scale);

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
  if (cyclic) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (i != j && unit(rng) < edge_prob) w(i, j) = weight(rng);
    // Guarantee a directed cycle through three random distinct nodes.
    if (spectral_radius(squared(w)) < 1e-12) {
      std::vector<int> perm(static_cast<size_t>(d));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      const int k = d >= 3 ? 3 : 2;
      for (int i = 0; i < k; ++i) {
        double v = weight(rng);
        if (std::abs(v) < 0.1 * weight_scale) v = 0.5 * weight_scale;
        w(perm[static_cast<size_t>(i)], perm[static_cast<size_t>((i + 1) % k)]) = v;
      }
    }
  } else {
    std::vector<int> order(static_cast<size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> rank(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) rank[static_cast<size_t>(order[static_cast<size_t>(i)])] = i;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (rank[static_cast<size_t>(i)] < rank[static_cast<size_t>(j)] && unit(rng) < edge_prob)
          w(i, j) = weight(rng);
  }

  const double radius = spectral_radius(squared(w));
  if (radius > 0.9) w *= std::sqrt(0.9 / radius) * (1.0 - 1e-12);

  DagInstance inst;
  inst.d = d;
  inst.weights = std::move(w);
  inst.edge_prob = edge_prob;
  inst.weight_scale = weight_scale;
  inst.cyclic = cyclic;
  inst.seed = seed;
  return inst;
}

GradientVector DagGeometry::eta(const VariablePoint& y, const VariablePoint& x) const {
  return GradientVector::single_matrix(dag::eta(y.block(0).mat(), x.block(0).mat()), "W");
}

std::optional<VariablePoint> DagGeometry::step_solve(const VariablePoint& x,
                                                     const GradientVector& v) const {
  StepResult r = step_from_direction(x.block(0).mat(), v.block(0).mat());
  if (!r.ok()) return std::nullopt;
  return VariablePoint::single_matrix(std::move(r.w), "W");
}

ProblemSpec make_problem(bool euclidean_baseline) {
  ProblemSpec p;
  p.name = euclidean_baseline ? "dag/gd" : "dag/igd";
  p.objective = [](const VariablePoint& x) {
    const auto& w = x.block(0).mat();
    if (!in_domain(w)) return std::numeric_limits<double>::infinity();
    return objective(w);
  };
  p.gradient = [](const VariablePoint& x) {
    return GradientVector::single_matrix(gradient(x.block(0).mat()), "W");
  };
  if (euclidean_baseline)
    p.geometry = make_euclidean();
  else
    p.geometry = std::make_shared<const DagGeometry>();
  return p;
}

VariablePoint to_point(const Eigen::MatrixXd& w) {
  return VariablePoint::single_matrix(w, "W");
}

}  // namespace invex::dag
