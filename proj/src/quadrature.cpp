#include "xiga/quadrature.hpp"

#include <cmath>

namespace xiga::quadrature {

std::vector<QuadPoint1D> gauss_legendre(int n) {
  if (n < 1) throw ArgumentError("gauss_legendre: n must be >= 1");
  std::vector<QuadPoint1D> pts(n);
  // Newton iteration on Legendre polynomials, nodes symmetric about 0.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    pts[i] = {-x, w};
    pts[n - 1 - i] = {x, w};
  }
  if (n % 2 == 1) pts[n / 2].x = 0.0;
  return pts;
}

std::vector<QuadPoint1D> gauss_legendre(int n, double a, double b) {
  auto pts = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (auto& q : pts) {
    q.x = mid + half * q.x;
    q.w *= half;
  }
  return pts;
}

std::vector<double> gauss_lobatto_nodes(int n) {
  switch (n) {
    case 2:
      return {-1.0, 1.0};
    case 3:
      return {-1.0, 0.0, 1.0};
    case 4: {
      const double a = std::sqrt(1.0 / 5.0);
      return {-1.0, -a, a, 1.0};
    }
    default:
      throw ArgumentError("gauss_lobatto_nodes: only 2..4 nodes supported");
  }
}

namespace {

struct BaryGroup {
  double w;        // weight (fraction of area)
  double a, b, c;  // barycentric coordinates of a representative point
  int mult;        // 1 (centroid), 3 or 6
};

// Symmetric triangle rules; barycentric representation.
// 7-point rule of degree 5, 12-point of degree 6, 25-point of degree 10.
const std::vector<BaryGroup>& rule_groups(int npoints) {
  static const std::vector<BaryGroup> r7 = {
      {0.225, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1},
      {(155.0 + std::sqrt(15.0)) / 1200.0, (6.0 + std::sqrt(15.0)) / 21.0,
       (6.0 + std::sqrt(15.0)) / 21.0, 1.0 - 2.0 * (6.0 + std::sqrt(15.0)) / 21.0, 3},
      {(155.0 - std::sqrt(15.0)) / 1200.0, (6.0 - std::sqrt(15.0)) / 21.0,
       (6.0 - std::sqrt(15.0)) / 21.0, 1.0 - 2.0 * (6.0 - std::sqrt(15.0)) / 21.0, 3}};
  static const std::vector<BaryGroup> r12 = {
      {0.050844906370207, 0.063089014491502, 0.063089014491502, 0.873821971016996, 3},
      {0.116786275726379, 0.249286745170910, 0.249286745170910, 0.501426509658179, 3},
      {0.082851075618374, 0.310352451033785, 0.053145049844816, 0.636502499121399, 6}};
  static const std::vector<BaryGroup> r25 = {
      {0.090817990382754, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1},
      {0.036725957756467, 0.028844733232685, 0.485577633383657, 0.485577633383657, 3},
      {0.045321059435528, 0.781036849029926, 0.109481575485037, 0.109481575485037, 3},
      {0.072757916845420, 0.141707219414880, 0.307939838764121, 0.550352941820999, 6},
      {0.028327242531057, 0.025003534762686, 0.246672560639903, 0.728323904597411, 6},
      {0.009421666963733, 0.009540815400299, 0.066803251012200, 0.923655933587500, 6}};
  switch (npoints) {
    case 7:
      return r7;
    case 12:
      return r12;
    case 25:
      return r25;
    default:
      throw ArgumentError("triangle_rule: supported point counts are 7, 12, 25");
  }
}

void emit(std::vector<QuadPoint2D>& out, const Vec2& v0, const Vec2& v1, const Vec2& v2,
          double area, double w, double a, double b, double c) {
  out.push_back({a * v0 + b * v1 + c * v2, w * area});
}

}  // namespace

std::vector<QuadPoint2D> triangle_rule(int npoints, const Vec2& v0, const Vec2& v1,
                                       const Vec2& v2) {
  const double area =
      0.5 * std::abs((v1 - v0).x() * (v2 - v0).y() - (v1 - v0).y() * (v2 - v0).x());
  std::vector<QuadPoint2D> out;
  out.reserve(npoints);
  for (const auto& g : rule_groups(npoints)) {
    if (g.mult == 1) {
      emit(out, v0, v1, v2, area, g.w, g.a, g.b, g.c);
    } else if (g.mult == 3) {
      emit(out, v0, v1, v2, area, g.w, g.a, g.b, g.c);
      emit(out, v0, v1, v2, area, g.w, g.c, g.a, g.b);
      emit(out, v0, v1, v2, area, g.w, g.b, g.c, g.a);
    } else {
      emit(out, v0, v1, v2, area, g.w, g.a, g.b, g.c);
      emit(out, v0, v1, v2, area, g.w, g.a, g.c, g.b);
      emit(out, v0, v1, v2, area, g.w, g.b, g.a, g.c);
      emit(out, v0, v1, v2, area, g.w, g.b, g.c, g.a);
      emit(out, v0, v1, v2, area, g.w, g.c, g.a, g.b);
      emit(out, v0, v1, v2, area, g.w, g.c, g.b, g.a);
    }
  }
  return out;
}

std::vector<QuadPoint2D> quad_rule(int n, const Vec2& lo, const Vec2& hi) {
  auto gx = gauss_legendre(n, lo.x(), hi.x());
  auto gy = gauss_legendre(n, lo.y(), hi.y());
  std::vector<QuadPoint2D> out;
  out.reserve(n * n);
  for (const auto& qx : gx)
    for (const auto& qy : gy) out.push_back({Vec2(qx.x, qy.x), qx.w * qy.w});
  return out;
}

std::vector<QuadPoint2D> triangle_duffy(int n, const Vec2& v0, const Vec2& v1,
                                        const Vec2& v2) {
  const double det = (v1 - v0).x() * (v2 - v0).y() - (v1 - v0).y() * (v2 - v0).x();
  auto g = gauss_legendre(n, 0.0, 1.0);
  std::vector<QuadPoint2D> out;
  out.reserve(n * n);
  for (const auto& qu : g)
    for (const auto& qv : g) {
      // (u, v(1-u)) maps the unit square onto the reference triangle.
      const double a = qu.x, b = qv.x * (1.0 - qu.x);
      const double jac = std::abs(det) * (1.0 - qu.x);
      out.push_back({v0 + a * (v1 - v0) + b * (v2 - v0), qu.w * qv.w * jac});
    }
  return out;
}

}  // namespace xiga::quadrature
