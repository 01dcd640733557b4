#include <Eigen/Dense>
#include <array>
#include <map>
#include <set>
#include <cmath>
#include <memory>

#include "doctest.h"
#include "xiga/studies.hpp"
#include "xiga/system.hpp"

using namespace xiga;
using cutmesh::BackgroundMesh;
using geometry::CircleLevelSet;
using geometry::MaterialTable;
using geometry::PhaseMap;
using geometry::PlaneLevelSet;

namespace {

using LsPtr = std::shared_ptr<const geometry::LevelSet>;

// Uncut elastic bar on [0,1]^2, clamped at x = 0.
problem::Problem bar_problem(int nx, int p) {
  problem::Problem prob;
  prob.physics = Physics::Elasticity;
  prob.bg = BackgroundMesh{Vec2(0, 0), Vec2(1, 1), nx, 1};
  prob.degree = p;
  prob.levelsets = {std::make_shared<PlaneLevelSet>(Vec2(1, 0), 10.0)};
  prob.phase_map = std::make_shared<PhaseMap>(1, std::vector<MaterialIndex>{1, 1});
  prob.materials = std::make_shared<MaterialTable>(
      std::vector<Material>{{0, 0, 0}, {10.0, 0.0, 1.0}});
  prob.gamma_N = 100.0;
  prob.dirichlet = {{problem::BoundaryRef{0, -1},
                     [](const Vec2&) { return Eigen::Vector2d::Zero(); }}};
  return prob;
}

// Heat problem on [-1,1]^2 with a circular inclusion boundary (void outside).
problem::Problem cut_heat_problem(int p, double gamma_G) {
  problem::Problem prob;
  prob.physics = Physics::Heat;
  prob.bg = BackgroundMesh{Vec2(-1, -1), Vec2(1, 1), 4, 4};
  prob.degree = p;
  prob.levelsets = {std::make_shared<CircleLevelSet>(Vec2(0.05, -0.1), 0.7)};
  prob.phase_map = std::make_shared<PhaseMap>(1, std::vector<MaterialIndex>{1, 0});
  prob.materials = std::make_shared<MaterialTable>(
      std::vector<Material>{{0, 0, 0}, {1.0, 0.0, 2.0}});
  prob.gamma_N = 100.0;
  prob.gamma_G = gamma_G;
  return prob;
}

// B-spline coefficients reproducing a bivariate polynomial, by least squares
// over a dense sample (splines reproduce polynomials of degree <= p exactly).
Eigen::VectorXd fit_spline(const splines::TensorBasis& basis,
                           const std::function<double(const Vec2&)>& f) {
  const Vec2 lo = basis.domain_min(), hi = basis.domain_max();
  const int n = 25;
  Eigen::MatrixXd M(n * n, basis.num_basis());
  Eigen::VectorXd b(n * n);
  M.setZero();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 x(lo.x() + (hi.x() - lo.x()) * (i + 0.5) / n,
                   lo.y() + (hi.y() - lo.y()) * (j + 0.5) / n);
      const splines::TensorEval ev = basis.eval(x, 0);
      for (int k = 0; k < ev.count; ++k) M(i * n + j, ev.ids[k]) = ev.value(k);
      b[i * n + j] = f(x);
    }
  return M.colPivHouseholderQr().solve(b);
}

}  // namespace

TEST_CASE("single-element clamped bar with tip traction reaches tL/(EA)") {
  for (int p = 1; p <= 3; ++p) {
    problem::Problem prob = bar_problem(1, p);
    prob.neumann = {{problem::BoundaryRef{1, -1},
                     [](const Vec2&) { return Eigen::Vector2d(5.0, 0.0); }}};
    const studies::Solved sol = studies::solve_problem(prob);
    const solution::FieldSampler u = sol.sampler();
    CHECK(std::abs(u.value(Vec2(1.0, 0.5))[0] - 0.5) <= 1e-10);
    CHECK(std::abs(u.value(Vec2(0.4, 0.5))[0] - 0.2) <= 1e-10);
  }
}

TEST_CASE("Nitsche rows make the assembled matrix non-symmetric") {
  problem::Problem prob = bar_problem(2, 2);
  const system::Discretization disc = system::discretize(prob);
  const system::Assembled sys = system::assemble(prob, disc);
  const Eigen::MatrixXd A(sys.A);
  CHECK((A - A.transpose()).norm() > 1e-8 * A.norm());
}

TEST_CASE("two-phase bar with identical materials matches the single bar") {
  problem::Problem single = bar_problem(4, 2);
  single.neumann = {{problem::BoundaryRef{1, -1},
                     [](const Vec2&) { return Eigen::Vector2d(5.0, 0.0); }}};
  const studies::Solved s1 = studies::solve_problem(single);
  const solution::FieldSampler u1 = s1.sampler();

  problem::Problem split = single;
  split.levelsets = {std::make_shared<PlaneLevelSet>(Vec2(1, 0), 0.6)};
  split.phase_map = std::make_shared<PhaseMap>(1, std::vector<MaterialIndex>{1, 2});
  split.materials = std::make_shared<MaterialTable>(
      std::vector<Material>{{0, 0, 0}, {10.0, 0.0, 1.0}, {10.0, 0.0, 1.0}});
  const studies::Solved s2 = studies::solve_problem(split);
  const solution::FieldSampler u2 = s2.sampler();
  for (double x = 0.05; x < 1.0; x += 0.1)
    for (double y : {0.25, 0.75})
      CHECK((u1.value(Vec2(x, y)) - u2.value(Vec2(x, y))).norm() <= 1e-10);
}

TEST_CASE("constant body load reproduces the quadratic bar solution") {
  problem::Problem prob = bar_problem(4, 2);
  prob.body_load = [](const Vec2&, MaterialIndex) { return Eigen::Vector2d(1.0, 0.0); };
  const studies::Solved sol = studies::solve_problem(prob);
  const solution::FieldSampler u = sol.sampler();
  auto exact = [](double x) { return (2.0 * x - x * x) / 20.0; };
  for (double x = 0.0; x <= 1.0; x += 0.125)
    CHECK(std::abs(u.value(Vec2(x, 0.5))[0] - exact(x)) <= 1e-9);
}

TEST_CASE("ghost penalty vanishes on global polynomials of degree <= p") {
  for (int p = 1; p <= 3; ++p) {
    problem::Problem with = cut_heat_problem(p, 1e-2);
    problem::Problem without = cut_heat_problem(p, 0.0);
    const system::Discretization disc = system::discretize(with);
    const Eigen::MatrixXd Ag = Eigen::MatrixXd(system::assemble(with, disc).A) -
                               Eigen::MatrixXd(system::assemble(without, disc).A);
    REQUIRE(Ag.norm() > 0.0);
    auto poly = [p](const Vec2& x) {
      double v = 1.0 + 0.5 * x.x() - 0.25 * x.y();
      if (p >= 2) v += 0.3 * x.x() * x.y() - 0.2 * x.y() * x.y();
      if (p >= 3) v += 0.1 * x.x() * x.x() * x.y();
      return v;
    };
    const Eigen::VectorXd ck = fit_spline(disc.basis, poly);
    // Every enrichment level of basis k carries the same coefficient, so the
    // enriched field is the global polynomial on the whole domain.
    Eigen::VectorXd c = Eigen::VectorXd::Zero(disc.enr.num_dofs());
    for (int k = 0; k < disc.basis.num_basis(); ++k)
      for (int l = 0; l < disc.enr.num_levels(k); ++l)
        if (disc.enr.dof(k, l, 0) >= 0) c[disc.enr.dof(k, l, 0)] = ck[k];
    const double resid = (Ag * c).lpNorm<Eigen::Infinity>();
    CHECK(resid <= 1e-12 * std::max(1.0, Ag.norm() * c.norm()));
  }
}

TEST_CASE("smooth splines: normal-derivative jumps below order p vanish") {
  for (int p = 2; p <= 3; ++p) {
    const splines::TensorBasis basis = splines::TensorBasis::uniform(p, 4, 3, Vec2(0, 0), Vec2(2, 1.5));
    // Vertical facet between elements (1,1) and (2,1) at x = 1. Functions
    // supported on one side only extend by zero on the other side.
    double max_p_jump = 0.0;
    for (double y = 0.51; y < 0.99; y += 0.12) {
      const Vec2 x(1.0, y);
      const splines::TensorEval evl = basis.eval_on_element(1, 1, x, p);
      const splines::TensorEval evr = basis.eval_on_element(2, 1, x, p);
      std::map<int, std::array<double, 4>> dl, dr;
      for (int j = 0; j < evl.count; ++j)
        for (int k = 0; k <= p; ++k) dl[evl.ids[j]][k] = evl.d[k][0][j];
      for (int j = 0; j < evr.count; ++j)
        for (int k = 0; k <= p; ++k) dr[evr.ids[j]][k] = evr.d[k][0][j];
      std::set<int> ids;
      for (const auto& [id, v] : dl) ids.insert(id);
      for (const auto& [id, v] : dr) ids.insert(id);
      for (int id : ids) {
        const auto l = dl.count(id) ? dl[id] : std::array<double, 4>{};
        const auto r = dr.count(id) ? dr[id] : std::array<double, 4>{};
        for (int k = 1; k < p; ++k) CHECK(std::abs(l[k] - r[k]) <= 1e-10);
        max_p_jump = std::max(max_p_jump, std::abs(l[p] - r[p]));
      }
    }
    CHECK(max_p_jump > 1e-6);  // only the p-th contribution survives
  }
}

TEST_CASE("bulk plus ghost operator is symmetric positive semi-definite") {
  problem::Problem prob = cut_heat_problem(2, 1e-3);  // no boundary conditions
  const system::Discretization disc = system::discretize(prob);
  const system::Assembled sys = system::assemble(prob, disc);
  const Eigen::MatrixXd A(sys.A);
  CHECK((A - A.transpose()).norm() <= 1e-12 * A.norm());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
  CHECK(es.eigenvalues().minCoeff() >= -1e-10 * A.norm());
}
