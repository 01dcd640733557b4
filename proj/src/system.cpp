#include "xiga/system.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace xiga::system {

Discretization discretize(const problem::Problem& prob) {
  if (!prob.phase_map || !prob.materials)
    throw ConfigError("discretize: phase map and material table are required");
  auto basis = splines::TensorBasis::uniform(prob.degree, prob.bg.nx, prob.bg.ny, prob.bg.lo,
                                             prob.bg.hi);
  auto mesh = cutmesh::build_cut_mesh(prob.bg, prob.levelsets, *prob.phase_map, prob.refinement);
  enrichment::Enrichment enr(basis, mesh, prob.num_fields());
  return {std::move(basis), std::move(mesh), std::move(enr), prob.num_fields()};
}

SparseMat from_triplets_deterministic(int rows, int cols,
                                      std::vector<Eigen::Triplet<double>> triplets) {
  auto key = [](const Eigen::Triplet<double>& t) {
    std::uint64_t bits;
    const double v = t.value();
    std::memcpy(&bits, &v, sizeof(bits));
    return std::make_tuple(t.row(), t.col(), bits);
  };
  std::sort(triplets.begin(), triplets.end(),
            [&](const auto& a, const auto& b) { return key(a) < key(b); });
  std::vector<Eigen::Triplet<double>> summed;
  summed.reserve(triplets.size());
  for (const auto& t : triplets) {
    if (!summed.empty() && summed.back().row() == t.row() && summed.back().col() == t.col())
      summed.back() = {t.row(), t.col(), summed.back().value() + t.value()};
    else
      summed.push_back(t);
  }
  SparseMat A(rows, cols);
  A.setFromTriplets(summed.begin(), summed.end());
  A.makeCompressed();
  return A;
}

Eigen::VectorXd solve(const Assembled& sys, double* residual) {
  Eigen::SparseLU<SparseMat> lu;
  lu.analyzePattern(sys.A);
  lu.factorize(sys.A);
  if (lu.info() != Eigen::Success) throw SolverError("solve: sparse LU factorization failed");
  Eigen::VectorXd x = lu.solve(sys.rhs);
  if (lu.info() != Eigen::Success) throw SolverError("solve: back substitution failed");
  const double bnorm = sys.rhs.norm();
  const double res = bnorm > 0.0 ? (sys.A * x - sys.rhs).norm() / bnorm : 0.0;
  if (residual != nullptr)
    *residual = res;
  else if (res > 1e-8)
    throw SolverError("solve: relative residual above 1e-8");
  return x;
}

double condition_number_frobenius(const SparseMat& A) {
  if (A.rows() != A.cols()) throw ArgumentError("condition number: matrix must be square");
  if (A.rows() > 6000)
    throw ArgumentError("condition number: dense inversion limited to 6000 unknowns");
  const Eigen::MatrixXd D(A);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(D);
  // Exactly singular matrices are an error; merely ill-conditioned ones must
  // still report their (possibly huge) value, so only zero pivots count.
  lu.setThreshold(0.0);
  if (!lu.isInvertible()) throw SolverError("condition number: matrix is singular");
  return D.norm() * lu.inverse().norm();
}

void write_matrix_market(const SparseMat& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  out.precision(17);
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it)
      out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

}  // namespace xiga::system
