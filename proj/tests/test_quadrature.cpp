#include <cmath>

#include "doctest.h"
#include "xiga/quadrature.hpp"

using namespace xiga;
using namespace xiga::quadrature;

namespace {

// Exact integral of x^i y^j over the unit triangle (0,0)-(1,0)-(0,1):
// i! j! / (i + j + 2)!.
double tri_monomial(int i, int j) {
  auto fact = [](int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  };
  return fact(i) * fact(j) / fact(i + j + 2);
}

void check_triangle_degree(int npoints, int degree) {
  const Vec2 v0(0, 0), v1(1, 0), v2(0, 1);
  const auto rule = triangle_rule(npoints, v0, v1, v2);
  double area = 0.0;
  for (const auto& q : rule) area += q.w;
  CHECK(std::abs(area - 0.5) <= 1e-12);
  for (int i = 0; i <= degree; ++i)
    for (int j = 0; i + j <= degree; ++j) {
      double s = 0.0;
      for (const auto& q : rule) s += q.w * std::pow(q.x.x(), i) * std::pow(q.x.y(), j);
      CHECK(std::abs(s - tri_monomial(i, j)) <= 1e-12);
    }
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n = 1; n <= 6; ++n) {
    const auto rule = gauss_legendre(n, -0.5, 2.0);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (const auto& q : rule) s += q.w * std::pow(q.x, k);
      const double exact = (std::pow(2.0, k + 1) - std::pow(-0.5, k + 1)) / (k + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("triangle rules reach their advertised degree") {
  check_triangle_degree(7, 5);
  check_triangle_degree(12, 6);
  check_triangle_degree(25, 10);
}

TEST_CASE("tensor quad rule on a rectangle") {
  const auto rule = quad_rule(3, Vec2(1, 2), Vec2(2, 4));
  for (int i = 0; i <= 5; ++i)
    for (int j = 0; j <= 5; ++j) {
      double s = 0.0;
      for (const auto& q : rule) s += q.w * std::pow(q.x.x(), i) * std::pow(q.x.y(), j);
      const double ex = (std::pow(2.0, i + 1) - 1.0) / (i + 1) *
                        (std::pow(4.0, j + 1) - std::pow(2.0, j + 1)) / (j + 1);
      CHECK(s == doctest::Approx(ex).epsilon(1e-13));
    }
}

TEST_CASE("Duffy rule is exact to total degree 2n-2") {
  const Vec2 v0(0.2, -0.1), v1(1.3, 0.4), v2(0.1, 1.1);
  // Affine map to reference coordinates for the exact value.
  const Vec2 e1 = v1 - v0, e2 = v2 - v0;
  const double J = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
  for (int n = 2; n <= 5; ++n) {
    const int deg = 2 * n - 2;
    const auto rule = triangle_duffy(n, v0, v1, v2);
    // Integrate (a . x)^deg with a fine reference-rule comparison: use the
    // 25-point rule (degree 10) as the oracle for deg <= 10.
    const auto oracle = triangle_rule(25, v0, v1, v2);
    auto f = [&](const Vec2& x) { return std::pow(0.7 * x.x() + 0.3 * x.y() + 0.1, deg); };
    double s = 0.0, ex = 0.0;
    for (const auto& q : rule) s += q.w * f(q.x);
    for (const auto& q : oracle) ex += q.w * f(q.x);
    CHECK(s == doctest::Approx(ex).epsilon(1e-12));
    double area = 0.0;
    for (const auto& q : rule) area += q.w;
    CHECK(area == doctest::Approx(J / 2.0).epsilon(1e-13));
  }
}

TEST_CASE("Gauss-Lobatto nodes interpolate the endpoints") {
  for (int n = 2; n <= 4; ++n) {
    const auto nodes = gauss_lobatto_nodes(n);
    REQUIRE(static_cast<int>(nodes.size()) == n);
    CHECK(nodes.front() == doctest::Approx(-1.0));
    CHECK(nodes.back() == doctest::Approx(1.0));
  }
  const auto n3 = gauss_lobatto_nodes(3);
  CHECK(std::abs(n3[1]) <= 1e-14);
  const auto n4 = gauss_lobatto_nodes(4);
  CHECK(n4[1] == doctest::Approx(-std::sqrt(1.0 / 5.0)).epsilon(1e-13));
}
