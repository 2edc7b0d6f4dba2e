#include "invex/geometry.hpp"

#include <stdexcept>

namespace invex {

double Geometry::norm_at(const VariablePoint&, const GradientVector& v) const { return v.norm(); }

GradientVector EuclideanGeometry::eta(const VariablePoint& y, const VariablePoint& x) const {
  if (!y.same_shape(x)) throw std::invalid_argument("EuclideanGeometry::eta: shape mismatch");
  return y - x;
}

std::optional<VariablePoint> EuclideanGeometry::step_solve(const VariablePoint& x,
                                                           const GradientVector& v) const {
  if (!v.same_shape(x)) throw std::invalid_argument("EuclideanGeometry::step_solve: shape mismatch");
  return x + v;
}

std::shared_ptr<const Geometry> make_euclidean() {
  return std::make_shared<const EuclideanGeometry>();
}

}  // namespace invex
