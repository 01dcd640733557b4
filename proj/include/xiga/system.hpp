#pragma once

#include <Eigen/Sparse>
#include <string>

#include "xiga/enrichment.hpp"
#include "xiga/problem.hpp"

namespace xiga::system {

using SparseMat = Eigen::SparseMatrix<double>;

/// Basis, cut geometry and enriched dof map for one problem instance.
struct Discretization {
  splines::TensorBasis basis;
  cutmesh::CutMesh mesh;
  enrichment::Enrichment enr;
  int num_fields = 1;
};

Discretization discretize(const problem::Problem& prob);

struct Assembled {
  SparseMat A;
  Eigen::VectorXd rhs;
};

/// Assembles the full residual linearization: bulk terms, Neumann loads,
/// non-symmetric Nitsche boundary and interface terms and the
/// face-oriented ghost penalty. Triplet reduction is made bitwise
/// deterministic by sorting on (row, col, value bits) before summation.
Assembled assemble(const problem::Problem& prob, const Discretization& disc);

/// Deterministic triplet->sparse reduction (exposed for tests).
SparseMat from_triplets_deterministic(int rows, int cols,
                                      std::vector<Eigen::Triplet<double>> triplets);

/// Sparse LU solve. When `residual` is null the relative residual is
/// checked against 1e-8 and SolverError is thrown above it; otherwise the
/// residual is written there and left to the caller.
Eigen::VectorXd solve(const Assembled& sys, double* residual = nullptr);

/// Frobenius-norm condition number ||A||_F ||A^-1||_F via dense inversion;
/// guarded against sizes beyond 6000 unknowns.
double condition_number_frobenius(const SparseMat& A);

/// Matrix Market coordinate-format dump.
void write_matrix_market(const SparseMat& A, const std::string& path);

}  // namespace xiga::system
