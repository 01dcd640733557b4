#include "xiga/verification.hpp"

#include <cmath>

namespace xiga::verification {

namespace {

template <typename ValueFn, typename GradFn>
ErrorNorms integrate_errors(const solution::FieldSampler& u, int order, ValueFn&& ref_value,
                            GradFn&& ref_grad) {
  const auto& mesh = u.disc().mesh;
  double num_l2 = 0, den_l2 = 0, num_h1 = 0, den_h1 = 0;
  for (const auto& cell : mesh.cells) {
    if (cell.material == 0) continue;
    for (const auto& qp : cutmesh::quadrature_for_cell_order(cell, order)) {
      const Eigen::Vector2d uh = u.value_on(cell.element, cell.component, qp.x);
      const Eigen::Matrix2d gh = u.gradient_on(cell.element, cell.component, qp.x);
      const Eigen::Vector2d ue = ref_value(qp.x);
      const Eigen::Matrix2d ge = ref_grad(qp.x);
      num_l2 += qp.w * (uh - ue).squaredNorm();
      den_l2 += qp.w * ue.squaredNorm();
      num_h1 += qp.w * (gh - ge).squaredNorm();
      den_h1 += qp.w * ge.squaredNorm();
    }
  }
  ErrorNorms out;
  out.l2 = den_l2 > 0 ? std::sqrt(num_l2 / den_l2) : std::sqrt(num_l2);
  out.h1 = den_h1 > 0 ? std::sqrt(num_h1 / den_h1) : std::sqrt(num_h1);
  return out;
}

}  // namespace

ErrorNorms errors_vs_exact(const solution::FieldSampler& u, const ExactFn& exact,
                           const ExactGradFn& exact_grad, int order) {
  return integrate_errors(u, order, exact, exact_grad);
}

ErrorNorms errors_vs_reference(const solution::FieldSampler& u,
                               const solution::FieldSampler& ref, int order) {
  return integrate_errors(
      u, order,
      [&](const Vec2& x) {
        const auto [e, c] = ref.locate(x);
        return ref.value_on(e, c, x);
      },
      [&](const Vec2& x) {
        const auto [e, c] = ref.locate(x);
        return ref.gradient_on(e, c, x);
      });
}

double material_volume(const cutmesh::CutMesh& mesh, MaterialIndex m) {
  double v = 0;
  for (const auto& cell : mesh.cells)
    if (cell.material == m) v += cell.area;
  return v;
}

double geometric_error(const cutmesh::CutMesh& mesh, MaterialIndex m, double exact_volume) {
  return (material_volume(mesh, m) - exact_volume) / exact_volume;
}

double convergence_rate(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2)
    throw ArgumentError("convergence_rate: need matching lists with at least two entries");
  const int n = static_cast<int>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    if (!(h[i] > 0.0) || !(err[i] > 0.0))
      throw ArgumentError("convergence_rate: mesh sizes and errors must be positive");
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ExactField bar_solution(BarLoad load, double magnitude, double E, double A, double L,
                        const Vec2& anchor, double angle_rad) {
  const double EA = E * A;
  std::function<double(double)> u0, du0;
  switch (load) {
    case BarLoad::Traction:
      u0 = [=](double x) { return magnitude * x / EA; };
      du0 = [=](double) { return magnitude / EA; };
      break;
    case BarLoad::ConstantBody:
      u0 = [=](double x) { return magnitude * (2 * L * x - x * x) / (2 * EA); };
      du0 = [=](double x) { return magnitude * (L - x) / EA; };
      break;
    case BarLoad::LinearBody:
      u0 = [=](double x) { return magnitude * (3 * L * L * x - x * x * x) / (6 * EA); };
      du0 = [=](double x) { return magnitude * (L * L - x * x) / (2 * EA); };
      break;
    case BarLoad::QuadraticBody:
      u0 = [=](double x) {
        return magnitude * (4 * L * L * L * x - x * x * x * x) / (12 * EA);
      };
      du0 = [=](double x) { return magnitude * (L * L * L - x * x * x) / (3 * EA); };
      break;
  }
  const Vec2 e0(std::cos(angle_rad), std::sin(angle_rad));
  ExactField f;
  f.value = [=](const Vec2& x) -> Eigen::Vector2d { return u0((x - anchor).dot(e0)) * e0; };
  f.gradient = [=](const Vec2& x) -> Eigen::Matrix2d {
    // du_i/dx_j = u0'(x0) e0_i e0_j
    return du0((x - anchor).dot(e0)) * (e0 * e0.transpose());
  };
  return f;
}

ExactField cylinder_solution(double a, double k_in, double k_out, double q, double theta0) {
  const double theta_a = theta0 - q * a * a / (4 * k_in);
  ExactField f;
  f.value = [=](const Vec2& x) -> Eigen::Vector2d {
    const double r = x.norm();
    const double th = r <= a ? theta0 - q * r * r / (4 * k_in)
                             : theta_a - q * a * a / (2 * k_out) * std::log(r / a);
    return {th, 0.0};
  };
  f.gradient = [=](const Vec2& x) -> Eigen::Matrix2d {
    const double r2 = x.squaredNorm();
    Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
    if (r2 <= a * a)
      g.row(0) = -q / (2 * k_in) * x.transpose();
    else
      g.row(0) = -q * a * a / (2 * k_out) * x.transpose() / r2;
    return g;
  };
  return f;
}

}  // namespace xiga::verification
