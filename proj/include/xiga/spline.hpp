#pragma once

#include <array>
#include <vector>

#include "xiga/types.hpp"

namespace xiga::splines {

/// Open knot vector with uniform degree. Immutable after construction.
class KnotVector {
 public:
  KnotVector(std::vector<double> knots, int degree);

  /// Open uniform knot vector with num_elements spans over [a,b].
  static KnotVector open_uniform(int degree, int num_elements, double a, double b);

  int degree() const { return degree_; }
  int num_basis() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  int num_elements() const { return static_cast<int>(spans_.size()); }
  const std::vector<double>& knots() const { return knots_; }

  double domain_min() const { return knots_.front(); }
  double domain_max() const { return knots_.back(); }

  /// Knot span index of element e (e-th nonempty span).
  int span_of_element(int e) const;
  double element_min(int e) const { return knots_[span_of_element(e)]; }
  double element_max(int e) const { return knots_[span_of_element(e) + 1]; }

  /// Knot index i with knots[i] <= xi < knots[i+1]; the right endpoint maps
  /// to the last nonempty span. Throws DomainError outside the knot range.
  int find_span(double xi) const;

  /// Index of the first basis function supported on the given span.
  int first_basis(int span) const { return span - degree_; }

  /// Values and derivatives of the p+1 basis functions supported at xi.
  /// Row k of the result holds the k-th derivatives, k = 0..max_order.
  /// Throws ArgumentError if max_order > p.
  Eigen::MatrixXd eval(double xi, int max_order) const;

  /// Same, but using the polynomial pieces of the given span. Valid for any
  /// xi (polynomial extension beyond the span).
  Eigen::MatrixXd eval_at_span(int span, double xi, int max_order) const;

 private:
  std::vector<double> knots_;
  std::vector<int> spans_;  // knot indices of nonempty spans
  int degree_;
};

/// Result of evaluating a tensor-product basis at one point: the (p+1)^2
/// supported functions with mixed derivatives d^(a+b)B/dx^a dy^b.
struct TensorEval {
  int count = 0;
  std::array<int, 16> ids{};                            // global basis indices
  std::array<std::array<std::array<double, 16>, 4>, 4> d{};  // d[a][b][j]

  double value(int j) const { return d[0][0][j]; }
  Vec2 gradient(int j) const { return Vec2(d[1][0][j], d[0][1][j]); }
};

/// Tensor-product B-spline basis on an axis-aligned rectangle; the
/// parametric and physical coordinates coincide.
class TensorBasis {
 public:
  TensorBasis(KnotVector kx, KnotVector ky);

  static TensorBasis uniform(int degree, int nel_x, int nel_y, const Vec2& lo,
                             const Vec2& hi);

  const KnotVector& kv(int dir) const { return dir == 0 ? kx_ : ky_; }
  int degree() const { return kx_.degree(); }
  int num_basis() const { return kx_.num_basis() * ky_.num_basis(); }
  int num_basis(int dir) const { return kv(dir).num_basis(); }
  int num_elements(int dir) const { return kv(dir).num_elements(); }
  int num_elements() const { return kx_.num_elements() * ky_.num_elements(); }

  int global_index(int ix, int iy) const { return ix + kx_.num_basis() * iy; }
  int element_index(int ex, int ey) const { return ex + kx_.num_elements() * ey; }

  Vec2 domain_min() const { return Vec2(kx_.domain_min(), ky_.domain_min()); }
  Vec2 domain_max() const { return Vec2(kx_.domain_max(), ky_.domain_max()); }

  /// Values and mixed derivatives at x; throws DomainError outside the domain.
  TensorEval eval(const Vec2& x, int max_order) const;

  /// Evaluation using the polynomial pieces of element (ex, ey); valid for
  /// any x (used for polynomial extension across facets).
  TensorEval eval_on_element(int ex, int ey, const Vec2& x, int max_order) const;

 private:
  TensorEval eval_spans(int sx, int sy, const Vec2& x, int max_order) const;

  KnotVector kx_, ky_;
};

/// Per-element operator expressing the supported B-splines in the tensor
/// Gauss-Lobatto nodal Lagrange basis of the same degree.
struct ExtractionOperator {
  int element = 0;
  Eigen::MatrixXd C;           // rows: background functions, cols: nodal basis
  std::vector<int> row_basis;  // global basis index per row
  std::vector<Vec2> nodes;     // nodal points (tensor Gauss-Lobatto)
};

ExtractionOperator extraction_operator(const TensorBasis& basis, int element);

/// Values of the tensor Lagrange basis attached to an extraction operator at
/// point x inside the element.
Eigen::VectorXd lagrange_values(const ExtractionOperator& op, const TensorBasis& basis,
                                const Vec2& x);

}  // namespace xiga::splines
