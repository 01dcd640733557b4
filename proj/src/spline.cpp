#include "xiga/spline.hpp"

#include <algorithm>
#include <cmath>

#include "xiga/quadrature.hpp"

namespace xiga::splines {

KnotVector::KnotVector(std::vector<double> knots, int degree)
    : knots_(std::move(knots)), degree_(degree) {
  if (degree_ < 1) throw ArgumentError("KnotVector: degree must be >= 1");
  if (static_cast<int>(knots_.size()) < 2 * (degree_ + 1))
    throw ArgumentError("KnotVector: too few knots");
  for (size_t i = 0; i + 1 < knots_.size(); ++i)
    if (knots_[i] > knots_[i + 1]) throw ArgumentError("KnotVector: knots must be non-decreasing");
  for (int i = 0; i <= degree_; ++i) {
    if (knots_[i] != knots_.front() || knots_[knots_.size() - 1 - i] != knots_.back())
      throw ArgumentError("KnotVector: knot vector must be open (first/last knot repeated p+1 times)");
  }
  if (num_basis() < degree_ + 1) throw ArgumentError("KnotVector: not enough basis functions");
  for (size_t i = 0; i + 1 < knots_.size(); ++i)
    if (knots_[i] < knots_[i + 1]) spans_.push_back(static_cast<int>(i));
}

KnotVector KnotVector::open_uniform(int degree, int num_elements, double a, double b) {
  if (num_elements < 1) throw ArgumentError("open_uniform: need at least one element");
  if (!(b > a)) throw ArgumentError("open_uniform: empty interval");
  std::vector<double> knots;
  knots.reserve(num_elements + 1 + 2 * degree);
  const double h = (b - a) / num_elements;
  for (int i = 0; i < degree; ++i) knots.push_back(a);
  for (int i = 0; i <= num_elements; ++i)
    knots.push_back(i == num_elements ? b : a + i * h);
  for (int i = 0; i < degree; ++i) knots.push_back(b);
  return KnotVector(std::move(knots), degree);
}

int KnotVector::span_of_element(int e) const {
  if (e < 0 || e >= num_elements()) throw ArgumentError("span_of_element: element out of range");
  return spans_[e];
}

int KnotVector::find_span(double xi) const {
  if (xi < knots_.front() || xi > knots_.back())
    throw DomainError("find_span: parameter outside knot range");
  if (xi >= knots_[spans_.back()]) return spans_.back();
  // binary search over nonempty spans
  int lo = 0, hi = static_cast<int>(spans_.size()) - 1;
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (xi < knots_[spans_[mid]])
      hi = mid - 1;
    else if (xi >= knots_[spans_[mid] + 1])
      lo = mid + 1;
    else
      lo = hi = mid;
  }
  return spans_[lo];
}

Eigen::MatrixXd KnotVector::eval(double xi, int max_order) const {
  return eval_at_span(find_span(xi), xi, max_order);
}

// Cox-de Boor values and derivatives (the classic DersBasisFuns algorithm).
Eigen::MatrixXd KnotVector::eval_at_span(int span, double xi, int max_order) const {
  const int p = degree_;
  if (max_order > p)
    throw ArgumentError("eval: derivative order exceeds degree (higher derivatives vanish)");
  if (max_order < 0) throw ArgumentError("eval: negative derivative order");
  const int n = max_order;
  Eigen::MatrixXd ndu(p + 1, p + 1);
  std::vector<double> left(p + 1), right(p + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = xi - knots_[span + 1 - j];
    right[j] = knots_[span + j] - xi;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }
  Eigen::MatrixXd ders = Eigen::MatrixXd::Zero(n + 1, p + 1);
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);
  Eigen::MatrixXd a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= n; ++k) {
      double dd = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        dd = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        dd += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        dd += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = dd;
      std::swap(s1, s2);
    }
  }
  double r = p;
  for (int k = 1; k <= n; ++k) {
    for (int j = 0; j <= p; ++j) ders(k, j) *= r;
    r *= (p - k);
  }
  return ders;
}

TensorBasis::TensorBasis(KnotVector kx, KnotVector ky) : kx_(std::move(kx)), ky_(std::move(ky)) {
  if (kx_.degree() != ky_.degree())
    throw ArgumentError("TensorBasis: degree must match across directions");
}

TensorBasis TensorBasis::uniform(int degree, int nel_x, int nel_y, const Vec2& lo,
                                 const Vec2& hi) {
  return TensorBasis(KnotVector::open_uniform(degree, nel_x, lo.x(), hi.x()),
                     KnotVector::open_uniform(degree, nel_y, lo.y(), hi.y()));
}

TensorEval TensorBasis::eval_spans(int sx, int sy, const Vec2& x, int max_order) const {
  const int p = degree();
  const Eigen::MatrixXd dx = kx_.eval_at_span(sx, x.x(), max_order);
  const Eigen::MatrixXd dy = ky_.eval_at_span(sy, x.y(), max_order);
  TensorEval out;
  out.count = (p + 1) * (p + 1);
  const int bx = kx_.first_basis(sx), by = ky_.first_basis(sy);
  int j = 0;
  for (int iy = 0; iy <= p; ++iy)
    for (int ix = 0; ix <= p; ++ix, ++j) {
      out.ids[j] = global_index(bx + ix, by + iy);
      for (int a = 0; a <= max_order; ++a)
        for (int b = 0; b <= max_order; ++b) out.d[a][b][j] = dx(a, ix) * dy(b, iy);
    }
  return out;
}

TensorEval TensorBasis::eval(const Vec2& x, int max_order) const {
  return eval_spans(kx_.find_span(x.x()), ky_.find_span(x.y()), x, max_order);
}

TensorEval TensorBasis::eval_on_element(int ex, int ey, const Vec2& x, int max_order) const {
  return eval_spans(kx_.span_of_element(ex), ky_.span_of_element(ey), x, max_order);
}

ExtractionOperator extraction_operator(const TensorBasis& basis, int element) {
  if (element < 0 || element >= basis.num_elements())
    throw ArgumentError("extraction_operator: element out of range");
  const int p = basis.degree();
  const int nelx = basis.num_elements(0);
  const int ex = element % nelx, ey = element / nelx;
  const double x0 = basis.kv(0).element_min(ex), x1 = basis.kv(0).element_max(ex);
  const double y0 = basis.kv(1).element_min(ey), y1 = basis.kv(1).element_max(ey);
  const auto gl = quadrature::gauss_lobatto_nodes(p + 1);

  ExtractionOperator op;
  op.element = element;
  const int nfun = (p + 1) * (p + 1);
  op.C.resize(nfun, nfun);
  op.nodes.reserve(nfun);
  for (int iy = 0; iy <= p; ++iy)
    for (int ix = 0; ix <= p; ++ix)
      op.nodes.push_back(Vec2(x0 + 0.5 * (gl[ix] + 1.0) * (x1 - x0),
                              y0 + 0.5 * (gl[iy] + 1.0) * (y1 - y0)));

  // With an interpolatory nodal target the extraction coefficients are the
  // spline values at the nodes.
  for (int col = 0; col < nfun; ++col) {
    const TensorEval ev = basis.eval_on_element(ex, ey, op.nodes[col], 0);
    if (col == 0) op.row_basis.assign(ev.ids.begin(), ev.ids.begin() + ev.count);
    for (int row = 0; row < nfun; ++row) op.C(row, col) = ev.value(row);
  }
  return op;
}

Eigen::VectorXd lagrange_values(const ExtractionOperator& op, const TensorBasis& basis,
                                const Vec2& x) {
  const int p = basis.degree();
  const int nelx = basis.num_elements(0);
  const int ex = op.element % nelx, ey = op.element / nelx;
  const double x0 = basis.kv(0).element_min(ex), x1 = basis.kv(0).element_max(ex);
  const double y0 = basis.kv(1).element_min(ey), y1 = basis.kv(1).element_max(ey);
  auto gl = quadrature::gauss_lobatto_nodes(p + 1);
  const double u = 2.0 * (x.x() - x0) / (x1 - x0) - 1.0;
  const double v = 2.0 * (x.y() - y0) / (y1 - y0) - 1.0;
  auto lag1d = [&](double t) {
    Eigen::VectorXd vals(p + 1);
    for (int i = 0; i <= p; ++i) {
      double num = 1.0, den = 1.0;
      for (int j = 0; j <= p; ++j) {
        if (j == i) continue;
        num *= (t - gl[j]);
        den *= (gl[i] - gl[j]);
      }
      vals[i] = num / den;
    }
    return vals;
  };
  const Eigen::VectorXd lu = lag1d(u), lv = lag1d(v);
  Eigen::VectorXd out((p + 1) * (p + 1));
  int j = 0;
  for (int iy = 0; iy <= p; ++iy)
    for (int ix = 0; ix <= p; ++ix, ++j) out[j] = lu[ix] * lv[iy];
  return out;
}

}  // namespace xiga::splines
