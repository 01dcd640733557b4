#pragma once

#include "xiga/system.hpp"

namespace xiga::solution {

/// Point evaluation of a solved enriched field.
class FieldSampler {
 public:
  FieldSampler(const system::Discretization& disc, Eigen::VectorXd coeffs);

  const system::Discretization& disc() const { return *disc_; }
  const Eigen::VectorXd& coeffs() const { return u_; }

  /// Value at an arbitrary point (locates the integration cell first);
  /// throws DomainError when x lies outside the material domain.
  Eigen::Vector2d value(const Vec2& x) const;

  /// Value and gradient when the (element, component) pair is known.
  Eigen::Vector2d value_on(int e, int comp, const Vec2& x) const;
  /// Row f holds the gradient of field component f.
  Eigen::Matrix2d gradient_on(int e, int comp, const Vec2& x) const;

  /// (element, component) of the integration cell containing x.
  std::pair<int, int> locate(const Vec2& x) const;

 private:
  const system::Discretization* disc_;
  Eigen::VectorXd u_;
};

}  // namespace xiga::solution
