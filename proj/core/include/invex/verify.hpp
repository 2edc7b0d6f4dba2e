#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "invex/optimizer.hpp"

namespace invex::verify {

using Sampler = std::function<VariablePoint(std::mt19937_64&)>;
using EtaFn = std::function<GradientVector(const VariablePoint&, const VariablePoint&)>;
using ProjectorMap = std::function<VariablePoint(const VariablePoint&)>;

struct ProbeReport {
  int samples_tested = 0;
  int violations = 0;
  double worst_residual = 0.0;  // max signed residual; positive means violation
  double tolerance_used = 0.0;
  std::optional<std::vector<VariablePoint>> witness;  // points of the worst sample

  bool clean() const { return violations == 0; }
};

/// Counts violations of f(y) - f(x) >= <eta(y, x), grad f(x)>, allowing
/// tol * (1 + |f(x)| + |f(y)|) slack per pair.
ProbeReport check_invexity(const ObjectiveFn& f, const GradientFn& grad, const EtaFn& eta,
                           const Sampler& sampler, int n_samples, double tol,
                           std::uint64_t seed = 0);

/// Counts violations of the displacement inequality
///   ||eta(y,z)||^2 <= ||eta(x,z)||^2 + b ||eta(y,x)||^2 - c <eta(y,x), eta(z,x)>
/// over sampled triples, with absolute slack tol.
ProbeReport check_triangle(const EtaFn& eta, const Sampler& sampler, double b, double c,
                           int n_samples, double tol, std::uint64_t seed = 0);

/// Counts violations of ||eta(p(y), p(x))|| <= ||eta(y, x)|| + tol.
ProbeReport check_contraction(const ProjectorMap& projector, const EtaFn& eta,
                              const Sampler& sampler, int n_samples, double tol,
                              std::uint64_t seed = 0);

/// Counts violations of the gradient-dominance inequality
///   ||grad f(x)||^2 >= mu (f(x) - f_star).
ProbeReport check_pl(const ObjectiveFn& f, const GradientFn& grad, double f_star, double mu,
                     const Sampler& sampler, int n_samples, std::uint64_t seed = 0);

/// Largest sampled curvature ratio 2 (f(y) - f(x) - <eta(y,x), grad f(x)>) /
/// ||eta(y,x)||^2; an empirical smoothness constant for the kernel.
double estimate_smoothness(const ObjectiveFn& f, const GradientFn& grad, const EtaFn& eta,
                           const Sampler& sampler, int n_samples, std::uint64_t seed = 0);

/// Largest sampled ratio ||eta(y,x)||^2 / ||eta(x,y)||^2 (the constant R of
/// the reversed-displacement bound).
double estimate_symmetry_ratio(const EtaFn& eta, const Sampler& sampler, int n_samples,
                               std::uint64_t seed = 0);

enum class RateModel { sublinear_1_over_k, linear_geometric };

struct RateFit {
  RateModel model = RateModel::sublinear_1_over_k;
  double fitted_constant = 0.0;  // C of C/k^p, or the per-iteration factor
  double r_squared = 0.0;
};

/// Regresses log(f_k - f_star) against log k (power-law family) and against k
/// (geometric family); reports the better fit. The first 10% of rows are
/// dropped as transient, as are rows with nonpositive gap. Requires at least
/// 10 trace rows and 2 usable rows after dropping.
RateFit fit_rate(const IterationTrace& trace, double f_star);

/// Max over flat coordinates of |fd_i - g_i| / (1 + max(|fd_i|, |g_i|)) with
/// central differences of width epsilon.
double gradient_fd_check(const ObjectiveFn& f, const GradientFn& grad, const VariablePoint& point,
                         double epsilon = 1e-5);

}  // namespace invex::verify
