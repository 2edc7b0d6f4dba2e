#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "invex/geometry.hpp"

namespace invex {

struct StepInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double alpha) const { return alpha > lo && alpha < hi; }
};

/// Admissible constant steps (0, 2/L) for an L-smooth objective.
StepInterval admissible_step(double smoothness);

/// Admissible constant steps under strong invexity mu with displacement
/// inequality constants (b, c) and symmetry ratio R:
///   (0, min(2/(R mu c), c/(2 b L))).
StepInterval admissible_step(double smoothness, double mu, double b, double c, double R);

/// Constant step size plus the declared problem constants it must respect.
struct StepSchedule {
  double alpha = 0.0;
  std::optional<double> smoothness;       // L
  std::optional<double> strong_invexity;  // mu
  double b = 1.0;
  double c = 2.0;
  std::optional<double> symmetry_ratio;   // R

  /// Throws std::invalid_argument when alpha is outside the admissible range
  /// implied by the declared constants.
  void validate() const;
};

enum class TerminalStatus { converged, max_iter, diverged, step_solve_failed };
std::string_view to_string(TerminalStatus s);

struct TraceRow {
  int iter = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double step_norm = 0.0;
  double elapsed_ms = 0.0;
};

struct IterationTrace {
  std::vector<TraceRow> rows;
  TerminalStatus status = TerminalStatus::max_iter;
  VariablePoint final_point;

  const TraceRow& back() const { return rows.back(); }
  int iterations() const { return static_cast<int>(rows.size()) - 1; }
};

using ObjectiveFn = std::function<double(const VariablePoint&)>;
using GradientFn = std::function<GradientVector(const VariablePoint&)>;
using ProjectorFn = std::function<std::optional<VariablePoint>(const VariablePoint&)>;
using AdvanceFn = std::function<std::optional<VariablePoint>(const VariablePoint&, double)>;
using FeasibleFn = std::function<bool(const VariablePoint&, double)>;

/// A problem instance wired for the update loops. objective/gradient refer to
/// the smooth part driving the step equation; objective may include
/// nonsmooth penalty terms handled by `advance` or `projector`.
struct ProblemSpec {
  std::string name;
  ObjectiveFn objective;
  GradientFn gradient;
  std::shared_ptr<const Geometry> geometry;
  ProjectorFn projector;  // feasible-set map for the projected loop
  AdvanceFn advance;      // optional full custom iteration (prox composites)
  FeasibleFn feasible;    // optional feasibility test used at entry
};

struct RunOptions {
  int max_iter = 10000;
  double grad_tol = 1e-8;
  double divergence_threshold = 1e12;
  double feasibility_tol = 1e-8;
};

/// Update loop solving eta(x_{k+1}, x_k) = -alpha grad f(x_k) each iteration.
/// Row 0 of the trace records x0; row k records the k-th iterate. Solver
/// breakdowns terminate with a status instead of throwing.
IterationTrace igd_run(const ProblemSpec& problem, const VariablePoint& x0,
                       const StepSchedule& schedule, const RunOptions& opts = {});

/// Projected variant: each iteration solves the step equation, then maps the
/// trial point through the problem's projector. Requires feasible x0.
IterationTrace pigd_run(const ProblemSpec& problem, const VariablePoint& x0,
                        const StepSchedule& schedule, const RunOptions& opts = {});

}  // namespace invex
