#pragma once

#include <functional>

#include "xiga/solution.hpp"

namespace xiga::verification {

/// Relative L2 error and relative H1 seminorm error.
struct ErrorNorms {
  double l2 = 0.0;
  double h1 = 0.0;
};

using ExactFn = std::function<Eigen::Vector2d(const Vec2&)>;
/// Row f of the result is the gradient of field component f.
using ExactGradFn = std::function<Eigen::Matrix2d(const Vec2&)>;

/// Errors against a closed-form solution, integrated cell by cell with a
/// rule exact to the given polynomial order.
ErrorNorms errors_vs_exact(const solution::FieldSampler& u, const ExactFn& exact,
                           const ExactGradFn& exact_grad, int order);

/// Errors against a reference discrete field on a (finer) mesh of the same
/// domain; the reference is point-located at every quadrature point.
ErrorNorms errors_vs_reference(const solution::FieldSampler& u,
                               const solution::FieldSampler& ref, int order);

/// Area covered by the integration cells of one material.
double material_volume(const cutmesh::CutMesh& mesh, MaterialIndex m);

/// Signed relative geometric error (V_h - V) / V.
double geometric_error(const cutmesh::CutMesh& mesh, MaterialIndex m, double exact_volume);

/// Least-squares slope of log(err) against log(h).
double convergence_rate(const std::vector<double>& h, const std::vector<double>& err);

/// A closed-form field together with its gradient.
struct ExactField {
  ExactFn value;
  ExactGradFn gradient;
};

enum class BarLoad {
  Traction,       // end traction t: u0 = t x0 / (E A)
  ConstantBody,   // f = b0:    u0 = b0 (2 L x0 - x0^2) / (2 E A)
  LinearBody,     // f = b0 x0: u0 = b0 (3 L^2 x0 - x0^3) / (6 E A)
  QuadraticBody,  // f = b0 x0^2: u0 = b0 (4 L^3 x0 - x0^4) / (12 E A)
};

/// Axial bar displacement u(x) = u0(x0) e0 with local coordinate
/// x0 = (x - anchor) . e0 and axis e0 = (cos angle, sin angle); clamped at
/// x0 = 0 and traction-loaded or free at x0 = L.
ExactField bar_solution(BarLoad load, double magnitude, double E, double A, double L,
                        const Vec2& anchor, double angle_rad);

/// Radial temperature of a heated circular inclusion (radius a,
/// conductivity k_in, uniform source q) in a matrix of conductivity k_out,
/// normalized to theta(0) = theta0:
///   theta = theta0 - q r^2/(4 k_in)                       r <= a
///   theta = theta(a) - q a^2/(2 k_out) log(r/a)           r >  a
ExactField cylinder_solution(double a, double k_in, double k_out, double q, double theta0);

}  // namespace xiga::verification
