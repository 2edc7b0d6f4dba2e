#include "invex/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace invex {

StepInterval admissible_step(double smoothness) {
  if (smoothness <= 0) throw std::invalid_argument("admissible_step: smoothness must be positive");
  return {0.0, 2.0 / smoothness};
}

StepInterval admissible_step(double smoothness, double mu, double b, double c, double R) {
  if (smoothness <= 0 || mu <= 0 || b <= 0 || c <= 0 || R <= 0)
    throw std::invalid_argument("admissible_step: constants must be positive");
  return {0.0, std::min(2.0 / (R * mu * c), c / (2.0 * b * smoothness))};
}

void StepSchedule::validate() const {
  if (!(alpha > 0)) throw std::invalid_argument("StepSchedule: alpha must be positive");
  if (strong_invexity && symmetry_ratio) {
    if (!smoothness) throw std::invalid_argument("StepSchedule: smoothness required with mu");
    if (!admissible_step(*smoothness, *strong_invexity, b, c, *symmetry_ratio).contains(alpha))
      throw std::invalid_argument("StepSchedule: alpha outside strongly invex admissible range");
  } else if (smoothness) {
    if (!admissible_step(*smoothness).contains(alpha))
      throw std::invalid_argument("StepSchedule: alpha outside (0, 2/L)");
  }
}

std::string_view to_string(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::converged: return "converged";
    case TerminalStatus::max_iter: return "max_iter";
    case TerminalStatus::diverged: return "diverged";
    case TerminalStatus::step_solve_failed: return "step_solve_failed";
  }
  return "unknown";
}

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

IterationTrace run_loop(const ProblemSpec& problem, const VariablePoint& x0,
                        const StepSchedule& schedule, const RunOptions& opts, bool projected) {
  if (!problem.objective || !problem.gradient)
    throw std::invalid_argument("run: problem needs objective and gradient");
  if (!problem.advance && !problem.geometry)
    throw std::invalid_argument("run: problem needs a geometry or a custom advance");
  if (projected && !problem.advance && !problem.projector)
    throw std::invalid_argument("pigd_run: problem needs a projector");
  if (!x0.all_finite()) throw std::invalid_argument("run: x0 must be finite");
  schedule.validate();
  if (projected && problem.feasible && !problem.feasible(x0, opts.feasibility_tol))
    throw std::invalid_argument("pigd_run: x0 is not feasible");

  Stopwatch clock;
  IterationTrace trace;
  trace.rows.reserve(static_cast<size_t>(opts.max_iter) + 1);

  VariablePoint x = x0;
  double fx = problem.objective(x);
  GradientVector gx = problem.gradient(x);
  double gnorm = gx.norm();
  trace.rows.push_back({0, fx, gnorm, 0.0, clock.ms()});

  auto finish = [&](TerminalStatus status) {
    trace.status = status;
    trace.final_point = std::move(x);
    return std::move(trace);
  };

  if (!std::isfinite(fx) || !std::isfinite(gnorm) || fx > opts.divergence_threshold)
    return finish(TerminalStatus::diverged);
  if (gnorm <= opts.grad_tol) return finish(TerminalStatus::converged);

  for (int k = 1; k <= opts.max_iter; ++k) {
    std::optional<VariablePoint> next;
    if (problem.advance) {
      next = problem.advance(x, schedule.alpha);
    } else {
      next = problem.geometry->step_solve(x, (-schedule.alpha) * gx);
      if (next && projected) next = problem.projector(*next);
    }
    if (!next || !next->all_finite()) return finish(TerminalStatus::step_solve_failed);

    const double step_norm = (*next - x).norm();
    x = std::move(*next);
    fx = problem.objective(x);
    gx = problem.gradient(x);
    gnorm = gx.norm();
    trace.rows.push_back({k, fx, gnorm, step_norm, clock.ms()});

    if (!std::isfinite(fx) || !std::isfinite(gnorm) || fx > opts.divergence_threshold)
      return finish(TerminalStatus::diverged);
    if (gnorm <= opts.grad_tol) return finish(TerminalStatus::converged);
  }
  return finish(TerminalStatus::max_iter);
}

}  // namespace

IterationTrace igd_run(const ProblemSpec& problem, const VariablePoint& x0,
                       const StepSchedule& schedule, const RunOptions& opts) {
  return run_loop(problem, x0, schedule, opts, /*projected=*/false);
}

IterationTrace pigd_run(const ProblemSpec& problem, const VariablePoint& x0,
                        const StepSchedule& schedule, const RunOptions& opts) {
  return run_loop(problem, x0, schedule, opts, /*projected=*/true);
}

}  // namespace invex
