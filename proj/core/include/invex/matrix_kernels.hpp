#pragma once

#include <Eigen/Dense>
#include <functional>

namespace invex {

/// Entrywise product; shapes must match.
Eigen::MatrixXd hadamard_prod(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Entrywise quotient with the convention a/0 := 0.
Eigen::MatrixXd hadamard_div(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// max |lambda_i(a)|. Orders <= 64 use a dense eigensolve directly; larger
/// matrices use power iteration with random restarts (relative tolerance tol),
/// falling back to the eigensolve only when the iteration stalls.
double spectral_radius(const Eigen::MatrixXd& a, double tol = 1e-8, int max_iter = 10000);

/// log(m) for m = I - a with spectral_radius(a) < 1, by the series
/// -(a + a^2/2 + a^3/3 + ...), truncated when a term's Frobenius norm drops
/// below 1e-14. Throws std::domain_error when spectral_radius(a) >= 1 - 1e-6.
Eigen::MatrixXd matlog_near_identity(const Eigen::MatrixXd& m);

/// Matrix exponential by scaling-and-squaring with a truncated Taylor series.
Eigen::MatrixXd matexp(const Eigen::MatrixXd& x);

/// Nearest (Frobenius) positive semidefinite matrix: symmetrize, then clip
/// negative eigenvalues to zero.
Eigen::MatrixXd psd_project(const Eigen::MatrixXd& s);

struct DykstraResult {
  Eigen::MatrixXd z;
  bool converged = false;
  int sweeps = 0;
  double residual = 0.0;  // Frobenius gap between the two half-step iterates
};

/// Dykstra projection onto {Z psd} intersected with an affine set given by its
/// (idempotent, linear) projection map. On convergence z satisfies both
/// constraints within tol.
DykstraResult dykstra_psd_affine(const Eigen::MatrixXd& s,
                                 const std::function<void(Eigen::MatrixXd&)>& affine_project,
                                 double tol = 1e-8, int max_sweeps = 5000);

/// Projection onto the correlation-matrix set {Z psd, diag(Z) = 1}.
DykstraResult dykstra_psd_unitdiag(const Eigen::MatrixXd& s, double tol = 1e-8,
                                   int max_sweeps = 5000);

/// Projection onto {Z psd, Z(k,k) = value}.
DykstraResult dykstra_psd_fixed_entry(const Eigen::MatrixXd& s, Eigen::Index k, double value,
                                      double tol = 1e-8, int max_sweeps = 5000);

/// Entrywise shrinkage sign(v) * max(|v| - theta, 0); theta >= 0.
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double theta);
Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& v, double theta);

/// Clamp every entry to [-radius, radius].
Eigen::VectorXd box_project_linf(const Eigen::VectorXd& t, double radius);

}  // namespace invex
