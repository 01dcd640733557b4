#include <cmath>
#include <random>

#include "doctest.h"
#include "xiga/spline.hpp"

using namespace xiga;
using splines::KnotVector;
using splines::TensorBasis;
using splines::TensorEval;

TEST_CASE("find_span maps points to nonempty spans") {
  const KnotVector kv = KnotVector::open_uniform(2, 4, 0.0, 1.0);
  // knots: 0 0 0 .25 .5 .75 1 1 1
  CHECK(kv.find_span(0.0) == 2);
  CHECK(kv.find_span(0.1) == 2);
  CHECK(kv.find_span(0.25) == 3);
  CHECK(kv.find_span(0.6) == 4);
  CHECK(kv.find_span(1.0) == 5);  // right endpoint: last nonempty span
  CHECK_THROWS_AS(kv.find_span(-0.1), DomainError);
  CHECK_THROWS_AS(kv.find_span(1.1), DomainError);
}

TEST_CASE("linear basis on a single span") {
  const KnotVector kv({0.0, 0.0, 1.0, 1.0}, 1);
  const Eigen::MatrixXd B = kv.eval(0.5, 1);
  CHECK(B(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(B(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(B(1, 0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(B(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("partition of unity at random points") {
  std::mt19937 rng(1234);
  for (int p = 1; p <= 3; ++p) {
    const KnotVector kv = KnotVector::open_uniform(p, 7, -1.0, 2.0);
    std::uniform_real_distribution<double> dist(-1.0, 2.0);
    for (int it = 0; it < 1000; ++it) {
      const double xi = dist(rng);
      const Eigen::MatrixXd B = kv.eval(xi, 0);
      CHECK(std::abs(B.row(0).sum() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("derivatives are continuous across interior knots") {
  for (int p = 2; p <= 3; ++p) {
    const KnotVector kv = KnotVector::open_uniform(p, 5, 0.0, 1.0);
    for (int e = 0; e + 1 < kv.num_elements(); ++e) {
      const double xk = kv.element_max(e);
      const int sl = kv.span_of_element(e);
      const int sr = kv.span_of_element(e + 1);
      for (int k = 0; k < p; ++k) {
        const Eigen::MatrixXd Bl = kv.eval_at_span(sl, xk, k);
        const Eigen::MatrixXd Br = kv.eval_at_span(sr, xk, k);
        // Compare the k-th derivative of every global basis function.
        Eigen::VectorXd gl = Eigen::VectorXd::Zero(kv.num_basis());
        Eigen::VectorXd gr = Eigen::VectorXd::Zero(kv.num_basis());
        for (int j = 0; j <= p; ++j) {
          gl[kv.first_basis(sl) + j] = Bl(k, j);
          gr[kv.first_basis(sr) + j] = Br(k, j);
        }
        CHECK((gl - gr).lpNorm<Eigen::Infinity>() <= 1e-10);
      }
    }
  }
}

TEST_CASE("derivatives agree with finite differences") {
  std::mt19937 rng(99);
  for (int p = 1; p <= 3; ++p) {
    const KnotVector kv = KnotVector::open_uniform(p, 6, 0.0, 3.0);
    std::uniform_real_distribution<double> dist(0.1, 2.9);
    for (int it = 0; it < 50; ++it) {
      const double xi = dist(rng);
      const double dh = 1e-6;
      const int s = kv.find_span(xi);
      const Eigen::MatrixXd B = kv.eval_at_span(s, xi, 1);
      const Eigen::MatrixXd Bp = kv.eval_at_span(s, xi + dh, 0);
      const Eigen::MatrixXd Bm = kv.eval_at_span(s, xi - dh, 0);
      for (int j = 0; j <= p; ++j) {
        const double fd = (Bp(0, j) - Bm(0, j)) / (2.0 * dh);
        CHECK(B(1, j) == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("tensor basis: partition of unity, gradient sums to zero") {
  std::mt19937 rng(7);
  for (int p = 1; p <= 3; ++p) {
    const TensorBasis basis = TensorBasis::uniform(p, 4, 3, Vec2(0, 0), Vec2(2, 1.5));
    std::uniform_real_distribution<double> dx(0.0, 2.0), dy(0.0, 1.5);
    for (int it = 0; it < 200; ++it) {
      const TensorEval ev = basis.eval(Vec2(dx(rng), dy(rng)), 1);
      double s = 0.0;
      Vec2 g(0, 0);
      for (int j = 0; j < ev.count; ++j) {
        s += ev.value(j);
        g += ev.gradient(j);
      }
      CHECK(std::abs(s - 1.0) <= 1e-12);
      CHECK(g.norm() <= 1e-10);
    }
  }
}

TEST_CASE("extraction operator is the identity for p = 1") {
  const TensorBasis basis = TensorBasis::uniform(1, 3, 2, Vec2(0, 0), Vec2(3, 2));
  for (int e = 0; e < basis.num_elements(); ++e) {
    const splines::ExtractionOperator op = splines::extraction_operator(basis, e);
    CHECK((op.C - Eigen::MatrixXd::Identity(4, 4)).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("extraction reproduces spline values from Lagrange values") {
  std::mt19937 rng(42);
  const int p = 3;
  const TensorBasis basis = TensorBasis::uniform(p, 4, 4, Vec2(-1, -1), Vec2(1, 1));
  const int e = basis.element_index(2, 1);
  const splines::ExtractionOperator op = splines::extraction_operator(basis, e);
  const double x0 = -1.0 + 2 * 0.5, y0 = -1.0 + 1 * 0.5;  // element lower corner
  std::uniform_real_distribution<double> d01(0.0, 1.0);
  for (int it = 0; it < 10; ++it) {
    const Vec2 x(x0 + 0.5 * d01(rng), y0 + 0.5 * d01(rng));
    const Eigen::VectorXd lag = lagrange_values(op, basis, x);
    const Eigen::VectorXd via = op.C * lag;
    const TensorEval ev = basis.eval(x, 0);
    REQUIRE(ev.count == static_cast<int>(op.row_basis.size()));
    for (int r = 0; r < via.size(); ++r) {
      // Row r corresponds to global basis op.row_basis[r].
      double direct = 0.0;
      for (int j = 0; j < ev.count; ++j)
        if (ev.ids[j] == op.row_basis[r]) direct = ev.value(j);
      CHECK(std::abs(via[r] - direct) <= 1e-12);
    }
  }
}
