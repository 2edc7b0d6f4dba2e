#pragma once

// Independent reference implementations used only by tests. These deliberately
// avoid the code paths under test: projections are solved by factored gradient
// descent on ||XX' - S||^2, matrix functions come from Eigen's unsupported
// module, spectra from a dense (non-iterative) eigensolver.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace oracles {

inline double spectral_radius_dense(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("oracle eigensolver failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline Eigen::MatrixXd matexp_ref(const Eigen::MatrixXd& a) { return a.exp(); }

inline Eigen::MatrixXd matlog_ref(const Eigen::MatrixXd& a) { return a.log(); }

// Nearest matrix to S in the PSD cone, optionally with prescribed row norms of
// the factor (row i of X forced to norm sqrt(diag target)). Solved as
// min_X 0.25 ||XX' - S||_F^2 by projected gradient descent with backtracking,
// full-rank factor, multiple restarts.
inline Eigen::MatrixXd factored_psd_fit(const Eigen::MatrixXd& s_in,
                                        const Eigen::VectorXd& fixed_diag,
                                        int restarts = 3, int max_iter = 50000,
                                        double tol = 1e-12) {
  const Eigen::Index n = s_in.rows();
  const Eigen::MatrixXd s = 0.5 * (s_in + s_in.transpose());
  const bool constrained = fixed_diag.size() > 0;
  if (constrained && fixed_diag.size() != n)
    throw std::invalid_argument("factored_psd_fit: diag size mismatch");

  std::mt19937_64 rng(0x0facade5u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = std::max(1.0, s.norm());

  auto renorm = [&](Eigen::MatrixXd& x) {
    if (!constrained) return;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double target = std::sqrt(std::max(0.0, fixed_diag(i)));
      double nrm = x.row(i).norm();
      if (nrm < 1e-300) {
        for (Eigen::Index j = 0; j < n; ++j) x(i, j) = 1e-6 * gauss(rng);
        nrm = x.row(i).norm();
      }
      x.row(i) *= target / nrm;
    }
  };

  double best_obj = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < restarts; ++r) {
    Eigen::MatrixXd x(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) x(i, j) = gauss(rng) * std::sqrt(scale / n);
    renorm(x);

    auto objective = [&](const Eigen::MatrixXd& xx) {
      return 0.25 * (xx * xx.transpose() - s).squaredNorm();
    };
    double fx = objective(x);
    double lr = 1.0 / (1.0 + scale);
    for (int it = 0; it < max_iter; ++it) {
      const Eigen::MatrixXd grad = (x * x.transpose() - s) * x;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        Eigen::MatrixXd cand = x - lr * grad;
        renorm(cand);
        const double fc = objective(cand);
        if (fc < fx - 1e-18) {
          x = cand;
          fx = fc;
          moved = true;
          lr *= 1.3;
          break;
        }
        lr *= 0.5;
      }
      if (!moved || grad.norm() < tol * (1.0 + scale)) break;
    }
    if (fx < best_obj) {
      best_obj = fx;
      best = x * x.transpose();
    }
  }
  return 0.5 * (best + best.transpose());
}

// Nearest PSD matrix (Frobenius) via the factored solver.
inline Eigen::MatrixXd psd_project_ref(const Eigen::MatrixXd& s) {
  return factored_psd_fit(s, Eigen::VectorXd());
}

// Nearest correlation matrix (PSD, unit diagonal).
inline Eigen::MatrixXd nearest_correlation_ref(const Eigen::MatrixXd& s) {
  return factored_psd_fit(s, Eigen::VectorXd::Ones(s.rows()));
}

// Nearest PSD matrix with one fixed diagonal entry.
inline Eigen::MatrixXd psd_fixed_entry_ref(const Eigen::MatrixXd& s, Eigen::Index k,
                                           double value) {
  // Only the k-th factor row is norm-constrained; mark the rest free with a
  // negative sentinel handled below.
  const Eigen::Index n = s.rows();
  const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  // Reformulate: min ||Z - S||^2 over PSD Z with Z_kk fixed. Parameterize
  // Z = XX', constrain only row k. The generic helper fixes every row, so do a
  // dedicated loop here.
  std::mt19937_64 rng(0x5eed0002u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = std::max(1.0, sym.norm());
  auto renorm = [&](Eigen::MatrixXd& x) {
    const double target = std::sqrt(std::max(0.0, value));
    double nrm = x.row(k).norm();
    if (nrm < 1e-300) {
      for (Eigen::Index j = 0; j < n; ++j) x(k, j) = 1e-6 * gauss(rng);
      nrm = x.row(k).norm();
    }
    x.row(k) *= target / nrm;
  };
  double best_obj = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < 3; ++r) {
    Eigen::MatrixXd x(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) x(i, j) = gauss(rng) * std::sqrt(scale / n);
    renorm(x);
    auto objective = [&](const Eigen::MatrixXd& xx) {
      return 0.25 * (xx * xx.transpose() - sym).squaredNorm();
    };
    double fx = objective(x);
    double lr = 1.0 / (1.0 + scale);
    for (int it = 0; it < 50000; ++it) {
      const Eigen::MatrixXd grad = (x * x.transpose() - sym) * x;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        Eigen::MatrixXd cand = x - lr * grad;
        renorm(cand);
        const double fc = objective(cand);
        if (fc < fx - 1e-18) {
          x = cand;
          fx = fc;
          moved = true;
          lr *= 1.3;
          break;
        }
        lr *= 0.5;
      }
      if (!moved || grad.norm() < 1e-12 * (1.0 + scale)) break;
    }
    if (fx < best_obj) {
      best_obj = fx;
      best = x * x.transpose();
    }
  }
  return 0.5 * (best + best.transpose());
}

inline Eigen::MatrixXd random_symmetric(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = gauss(rng) * scale;
  return 0.5 * (a + a.transpose());
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                                     double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = gauss(rng) * scale;
  return a;
}

}  // namespace oracles
