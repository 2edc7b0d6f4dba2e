#pragma once

#include <memory>
#include <optional>
#include <string_view>

#include "invex/block_vector.hpp"

namespace invex {

/// A displacement kernel eta together with the inverse map needed by the
/// update rule: step_solve(x, v) finds y with eta(y, x) = v.
///
/// Contract: for admissible (x, v), eta(step_solve(x, v), x) == v within 1e-8
/// relative. step_solve reports failure by returning an empty optional; it
/// never throws on solver breakdown.
class Geometry {
 public:
  virtual ~Geometry() = default;

  virtual std::string_view name() const = 0;

  /// Displacement of y as seen from x.
  virtual GradientVector eta(const VariablePoint& y, const VariablePoint& x) const = 0;

  /// Solve eta(y, x) = v for y.
  virtual std::optional<VariablePoint> step_solve(const VariablePoint& x,
                                                  const GradientVector& v) const = 0;

  /// Norm of a displacement anchored at x. Flat Euclidean by default.
  virtual double norm_at(const VariablePoint& x, const GradientVector& v) const;

  /// Whether eta(x, x) == 0 holds identically. False for kernels (such as the
  /// gradient-based one) that only vanish at stationary points.
  virtual bool eta_vanishes_at_identity() const { return true; }
};

/// eta(y, x) = y - x; step_solve(x, v) = x + v.
class EuclideanGeometry final : public Geometry {
 public:
  std::string_view name() const override { return "euclidean"; }
  GradientVector eta(const VariablePoint& y, const VariablePoint& x) const override;
  std::optional<VariablePoint> step_solve(const VariablePoint& x,
                                          const GradientVector& v) const override;
};

std::shared_ptr<const Geometry> make_euclidean();

}  // namespace invex
