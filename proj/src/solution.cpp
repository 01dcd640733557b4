#include "xiga/solution.hpp"

namespace xiga::solution {

FieldSampler::FieldSampler(const system::Discretization& disc, Eigen::VectorXd coeffs)
    : disc_(&disc), u_(std::move(coeffs)) {
  if (u_.size() != disc.enr.num_dofs())
    throw ArgumentError("FieldSampler: coefficient vector size does not match the dof count");
}

std::pair<int, int> FieldSampler::locate(const Vec2& x) const {
  const int c = disc_->mesh.locate_cell(x);
  if (c < 0 || disc_->mesh.cells[c].material == 0)
    throw DomainError("FieldSampler: point outside the material domain");
  return {disc_->mesh.cells[c].element, disc_->mesh.cells[c].component};
}

Eigen::Vector2d FieldSampler::value(const Vec2& x) const {
  const auto [e, comp] = locate(x);
  return value_on(e, comp, x);
}

Eigen::Vector2d FieldSampler::value_on(int e, int comp, const Vec2& x) const {
  const int ex = e % disc_->mesh.bg.nx, ey = e / disc_->mesh.bg.nx;
  const auto ev = disc_->basis.eval_on_element(ex, ey, x, 0);
  Eigen::Vector2d out = Eigen::Vector2d::Zero();
  for (int j = 0; j < ev.count; ++j)
    for (int f = 0; f < disc_->num_fields; ++f) {
      const int dof = disc_->enr.dof_on(ev.ids[j], e, comp, f);
      if (dof >= 0) out(f) += u_(dof) * ev.value(j);
    }
  return out;
}

Eigen::Matrix2d FieldSampler::gradient_on(int e, int comp, const Vec2& x) const {
  const int ex = e % disc_->mesh.bg.nx, ey = e / disc_->mesh.bg.nx;
  const auto ev = disc_->basis.eval_on_element(ex, ey, x, 1);
  Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
  for (int j = 0; j < ev.count; ++j)
    for (int f = 0; f < disc_->num_fields; ++f) {
      const int dof = disc_->enr.dof_on(ev.ids[j], e, comp, f);
      if (dof >= 0) out.row(f) += u_(dof) * ev.gradient(j).transpose();
    }
  return out;
}

}  // namespace xiga::solution
