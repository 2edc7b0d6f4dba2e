#include "invex/verify.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "invex/block_vector.hpp"

namespace invex::verify {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LineFit fit;
  if (sxx <= 0.0) return fit;  // degenerate abscissa, keep r^2 = 0
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy <= 0.0) {
    fit.r_squared = 1.0;  // constant response fitted exactly
    return fit;
  }
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += resid * resid;
  }
  fit.r_squared = 1.0 - ss_res / syy;
  return fit;
}

}  // namespace

ProbeReport check_invexity(const ObjectiveFn& f, const GradientFn& grad, const EtaFn& eta,
                           const Sampler& sampler, int n_samples, double tol,
                           std::uint64_t seed) {
  if (!f || !grad || !eta || !sampler) throw std::invalid_argument("check_invexity: null callback");
  std::mt19937_64 rng(seed);
  ProbeReport report;
  report.tolerance_used = tol;
  for (int k = 0; k < n_samples; ++k) {
    const VariablePoint x = sampler(rng);
    const VariablePoint y = sampler(rng);
    const double fx = f(x);
    const double fy = f(y);
    const GradientVector g = grad(x);
    const double lhs = dot(eta(y, x), g);
    const double residual = lhs - (fy - fx);
    ++report.samples_tested;
    if (residual > report.worst_residual || report.samples_tested == 1) {
      report.worst_residual = residual;
      report.witness = std::vector<VariablePoint>{x, y};
    }
    if (residual > tol * (1.0 + std::abs(fx) + std::abs(fy))) ++report.violations;
  }
  return report;
}

ProbeReport check_triangle(const EtaFn& eta, const Sampler& sampler, double b, double c,
                           int n_samples, double tol, std::uint64_t seed) {
  if (!eta || !sampler) throw std::invalid_argument("check_triangle: null callback");
  std::mt19937_64 rng(seed);
  ProbeReport report;
  report.tolerance_used = tol;
  for (int k = 0; k < n_samples; ++k) {
    const VariablePoint x = sampler(rng);
    const VariablePoint y = sampler(rng);
    const VariablePoint z = sampler(rng);
    const double lhs = eta(y, z).norm() * eta(y, z).norm();
    const double exz = eta(x, z).norm();
    const GradientVector eyx = eta(y, x);
    const GradientVector ezx = eta(z, x);
    const double rhs = exz * exz + b * eyx.norm() * eyx.norm() - c * dot(eyx, ezx);
    const double residual = lhs - rhs;
    ++report.samples_tested;
    if (residual > report.worst_residual || report.samples_tested == 1) {
      report.worst_residual = residual;
      report.witness = std::vector<VariablePoint>{x, y, z};
    }
    if (residual > tol) ++report.violations;
  }
  return report;
}

ProbeReport check_contraction(const ProjectorMap& projector, const EtaFn& eta,
                              const Sampler& sampler, int n_samples, double tol,
                              std::uint64_t seed) {
  if (!projector || !eta || !sampler)
    throw std::invalid_argument("check_contraction: null callback");
  std::mt19937_64 rng(seed);
  ProbeReport report;
  report.tolerance_used = tol;
  for (int k = 0; k < n_samples; ++k) {
    const VariablePoint x = sampler(rng);
    const VariablePoint y = sampler(rng);
    const double residual = eta(projector(y), projector(x)).norm() - eta(y, x).norm();
    ++report.samples_tested;
    if (residual > report.worst_residual || report.samples_tested == 1) {
      report.worst_residual = residual;
      report.witness = std::vector<VariablePoint>{x, y};
    }
    if (residual > tol) ++report.violations;
  }
  return report;
}

ProbeReport check_pl(const ObjectiveFn& f, const GradientFn& grad, double f_star, double mu,
                     const Sampler& sampler, int n_samples, std::uint64_t seed) {
  if (!f || !grad || !sampler) throw std::invalid_argument("check_pl: null callback");
  std::mt19937_64 rng(seed);
  ProbeReport report;
  for (int k = 0; k < n_samples; ++k) {
    const VariablePoint x = sampler(rng);
    const double gap = f(x) - f_star;
    const double gnorm = grad(x).norm();
    const double residual = mu * gap - gnorm * gnorm;
    const double tol = 1e-10 * (1.0 + std::abs(mu * gap));
    report.tolerance_used = std::max(report.tolerance_used, tol);
    ++report.samples_tested;
    if (residual > report.worst_residual || report.samples_tested == 1) {
      report.worst_residual = residual;
      report.witness = std::vector<VariablePoint>{x};
    }
    if (residual > tol) ++report.violations;
  }
  return report;
}

double estimate_smoothness(const ObjectiveFn& f, const GradientFn& grad, const EtaFn& eta,
                           const Sampler& sampler, int n_samples, std::uint64_t seed) {
  if (!f || !grad || !eta || !sampler)
    throw std::invalid_argument("estimate_smoothness: null callback");
  std::mt19937_64 rng(seed);
  double best = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const VariablePoint x = sampler(rng);
    const VariablePoint y = sampler(rng);
    const GradientVector e = eta(y, x);
    const double nrm2 = e.norm() * e.norm();
    if (nrm2 <= 0.0) continue;
    const double excess = f(y) - f(x) - dot(e, grad(x));
    best = std::max(best, 2.0 * excess / nrm2);
  }
  return best;
}

double estimate_symmetry_ratio(const EtaFn& eta, const Sampler& sampler, int n_samples,
                               std::uint64_t seed) {
  if (!eta || !sampler) throw std::invalid_argument("estimate_symmetry_ratio: null callback");
  std::mt19937_64 rng(seed);
  double best = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const VariablePoint x = sampler(rng);
    const VariablePoint y = sampler(rng);
    const double fwd = eta(y, x).norm();
    const double bwd = eta(x, y).norm();
    if (bwd <= 0.0) continue;
    best = std::max(best, (fwd * fwd) / (bwd * bwd));
  }
  return best;
}

RateFit fit_rate(const IterationTrace& trace, double f_star) {
  if (trace.rows.size() < 10) throw std::invalid_argument("fit_rate: trace shorter than 10 rows");
  const std::size_t skip = trace.rows.size() / 10;  // transient head
  std::vector<double> ks, log_ks, log_gaps;
  for (std::size_t i = skip; i < trace.rows.size(); ++i) {
    const TraceRow& row = trace.rows[i];
    const double gap = row.objective - f_star;
    if (!(gap > 0.0) || row.iter < 1) continue;
    ks.push_back(static_cast<double>(row.iter));
    log_ks.push_back(std::log(static_cast<double>(row.iter)));
    log_gaps.push_back(std::log(gap));
  }
  if (ks.size() < 2) throw std::invalid_argument("fit_rate: fewer than 2 usable rows");
  const LineFit power = least_squares(log_ks, log_gaps);
  const LineFit geo = least_squares(ks, log_gaps);
  RateFit fit;
  if (power.r_squared >= geo.r_squared) {
    fit.model = RateModel::sublinear_1_over_k;
    fit.fitted_constant = std::exp(power.intercept);
    fit.r_squared = power.r_squared;
  } else {
    fit.model = RateModel::linear_geometric;
    fit.fitted_constant = std::exp(geo.slope);
    fit.r_squared = geo.r_squared;
  }
  return fit;
}

double gradient_fd_check(const ObjectiveFn& f, const GradientFn& grad, const VariablePoint& point,
                         double epsilon) {
  if (!f || !grad) throw std::invalid_argument("gradient_fd_check: null callback");
  if (epsilon <= 0.0) throw std::invalid_argument("gradient_fd_check: epsilon must be positive");
  const Eigen::VectorXd g = grad(point).flatten();
  Eigen::VectorXd flat = point.flatten();
  VariablePoint probe = point;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    const double saved = flat(i);
    flat(i) = saved + epsilon;
    probe.unflatten(flat);
    const double fp = f(probe);
    flat(i) = saved - epsilon;
    probe.unflatten(flat);
    const double fm = f(probe);
    flat(i) = saved;
    probe.unflatten(flat);
    const double fd = (fp - fm) / (2.0 * epsilon);
    const double err = std::abs(fd - g(i)) / (1.0 + std::max(std::abs(fd), std::abs(g(i))));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace invex::verify
