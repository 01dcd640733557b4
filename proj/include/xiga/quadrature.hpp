#pragma once

#include <vector>

#include "xiga/types.hpp"

namespace xiga::quadrature {

struct QuadPoint1D {
  double x;
  double w;
};

struct QuadPoint2D {
  Vec2 x;
  double w;
};

/// Gauss-Legendre rule with n points on [-1,1].
std::vector<QuadPoint1D> gauss_legendre(int n);

/// Gauss-Legendre rule with n points mapped to [a,b].
std::vector<QuadPoint1D> gauss_legendre(int n, double a, double b);

/// Gauss-Lobatto nodes (no weights) on [-1,1], n = p+1 points, p in {1,2,3}.
std::vector<double> gauss_lobatto_nodes(int n);

/// Symmetric rule on the triangle (v0,v1,v2). npoints must be 7, 12 or 25
/// (degree 5, 6 and 10 respectively). Weights sum to the triangle area.
std::vector<QuadPoint2D> triangle_rule(int npoints, const Vec2& v0, const Vec2& v1,
                                       const Vec2& v2);

/// Tensor Gauss rule with n x n points on an axis-aligned rectangle.
std::vector<QuadPoint2D> quad_rule(int n, const Vec2& lo, const Vec2& hi);

/// Duffy-transformed tensor Gauss rule on a triangle; exact for total degree
/// <= 2n-2. Used for error integration at arbitrary order.
std::vector<QuadPoint2D> triangle_duffy(int n, const Vec2& v0, const Vec2& v1,
                                        const Vec2& v2);

}  // namespace xiga::quadrature
