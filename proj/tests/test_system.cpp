#include <algorithm>
#include <random>

#include "doctest.h"
#include "xiga/system.hpp"

using namespace xiga;
using system::SparseMat;

namespace {

std::vector<Eigen::Triplet<double>> sample_triplets() {
  return {{0, 0, 1.0}, {1, 1, 2.0}, {0, 0, 0.5}, {2, 1, -1.0},
          {1, 1, -2.0}, {2, 2, 3.0}, {0, 1, 0.25}, {1, 1, 4.0}};
}

bool bitwise_equal(const SparseMat& A, const SparseMat& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols() || A.nonZeros() != B.nonZeros())
    return false;
  return std::equal(A.valuePtr(), A.valuePtr() + A.nonZeros(), B.valuePtr()) &&
         std::equal(A.innerIndexPtr(), A.innerIndexPtr() + A.nonZeros(),
                    B.innerIndexPtr()) &&
         std::equal(A.outerIndexPtr(), A.outerIndexPtr() + A.outerSize() + 1,
                    B.outerIndexPtr());
}

}  // namespace

TEST_CASE("deterministic triplet reduction sums duplicates") {
  const SparseMat A = system::from_triplets_deterministic(3, 3, sample_triplets());
  const Eigen::MatrixXd D(A);
  CHECK(D(0, 0) == doctest::Approx(1.5));
  CHECK(D(0, 1) == doctest::Approx(0.25));
  CHECK(D(1, 1) == doctest::Approx(4.0));
  CHECK(D(2, 1) == doctest::Approx(-1.0));
  CHECK(D(2, 2) == doctest::Approx(3.0));
}

TEST_CASE("triplet reduction is invariant under input permutation") {
  auto t = sample_triplets();
  const SparseMat A = system::from_triplets_deterministic(3, 3, t);
  std::mt19937 rng(5);
  for (int it = 0; it < 20; ++it) {
    std::shuffle(t.begin(), t.end(), rng);
    const SparseMat B = system::from_triplets_deterministic(3, 3, t);
    CHECK(bitwise_equal(A, B));
  }
}

TEST_CASE("sparse solve on identity and diagonal systems") {
  system::Assembled sys;
  sys.A = system::from_triplets_deterministic(3, 3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
  sys.rhs = Eigen::Vector3d(1.0, -2.0, 3.0);
  CHECK((system::solve(sys) - sys.rhs).norm() <= 1e-14);

  sys.A = system::from_triplets_deterministic(3, 3, {{0, 0, 2.0}, {1, 1, 4.0}, {2, 2, 0.5}});
  const Eigen::VectorXd x = system::solve(sys);
  CHECK(x[0] == doctest::Approx(0.5));
  CHECK(x[1] == doctest::Approx(-0.5));
  CHECK(x[2] == doctest::Approx(6.0));
  double res = -1.0;
  system::solve(sys, &res);
  CHECK(res >= 0.0);
  CHECK(res <= 1e-14);
}

TEST_CASE("singular systems raise a solver error") {
  system::Assembled sys;
  sys.A = SparseMat(2, 2);  // zero matrix
  sys.rhs = Eigen::Vector2d(1.0, 0.0);
  CHECK_THROWS_AS(system::solve(sys), SolverError);
}

TEST_CASE("Frobenius condition number") {
  auto diag = [](const std::vector<double>& d) {
    std::vector<Eigen::Triplet<double>> t;
    for (size_t i = 0; i < d.size(); ++i)
      t.emplace_back(static_cast<int>(i), static_cast<int>(i), d[i]);
    return system::from_triplets_deterministic(static_cast<int>(d.size()),
                                               static_cast<int>(d.size()), t);
  };
  CHECK(system::condition_number_frobenius(diag({1, 1, 1, 1})) == doctest::Approx(4.0));
  CHECK(system::condition_number_frobenius(diag({1, 2})) == doctest::Approx(2.5));
  CHECK_THROWS_AS(system::condition_number_frobenius(diag({1, 0})), SolverError);
  CHECK_THROWS_AS(system::condition_number_frobenius(SparseMat(6001, 6001)),
                  ArgumentError);
  CHECK_THROWS_AS(system::condition_number_frobenius(SparseMat(2, 3)), ArgumentError);
}
