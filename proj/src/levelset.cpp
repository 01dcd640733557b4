#include "xiga/levelset.hpp"

#include <cmath>
#include <functional>

namespace xiga::geometry {

BoxLevelSet::BoxLevelSet(const Vec2& center, const Vec2& halfwidth, double angle_rad)
    : c_(center), hw_(halfwidth), cs_(std::cos(angle_rad)), sn_(std::sin(angle_rad)) {}

double BoxLevelSet::value(const Vec2& x) const {
  const Vec2 r = x - c_;
  const Vec2 local(cs_ * r.x() + sn_ * r.y(), -sn_ * r.x() + cs_ * r.y());
  const Vec2 q(std::abs(local.x()) - hw_.x(), std::abs(local.y()) - hw_.y());
  const Vec2 qp(std::max(q.x(), 0.0), std::max(q.y(), 0.0));
  return qp.norm() + std::min(std::max(q.x(), q.y()), 0.0);
}

LevelSetField::LevelSetField(std::shared_ptr<const splines::TensorBasis> basis,
                             std::vector<double> coefficients)
    : basis_(std::move(basis)), coeffs_(std::move(coefficients)) {
  if (static_cast<int>(coeffs_.size()) != basis_->num_basis())
    throw ArgumentError("LevelSetField: coefficient count must equal basis count");
}

LevelSetField LevelSetField::sample(std::shared_ptr<const splines::TensorBasis> basis,
                                    const std::function<double(const Vec2&)>& f) {
  const int p = basis->degree();
  auto greville = [&](const splines::KnotVector& kv, int i) {
    const auto& U = kv.knots();
    double s = 0.0;
    for (int j = 1; j <= p; ++j) s += U[i + j];
    return s / p;
  };
  std::vector<double> coeffs(basis->num_basis());
  for (int iy = 0; iy < basis->num_basis(1); ++iy)
    for (int ix = 0; ix < basis->num_basis(0); ++ix)
      coeffs[basis->global_index(ix, iy)] =
          f(Vec2(greville(basis->kv(0), ix), greville(basis->kv(1), iy)));
  return LevelSetField(std::move(basis), std::move(coeffs));
}

double LevelSetField::value(const Vec2& x) const {
  const splines::TensorEval ev = basis_->eval(x, 0);
  double v = 0.0;
  for (int j = 0; j < ev.count; ++j) v += ev.value(j) * coeffs_[ev.ids[j]];
  return v;
}

PhaseResult phase_index(const std::vector<double>& values, double iso, double eps) {
  PhaseResult r;
  for (size_t j = 0; j < values.size(); ++j) {
    if (std::abs(values[j] - iso) <= eps)
      r.on_interface_mask |= (1u << j);
    else if (values[j] > iso)
      r.index |= (1 << j);
  }
  return r;
}

PhaseMap::PhaseMap(int num_levelsets, std::vector<MaterialIndex> map)
    : n_(num_levelsets), map_(std::move(map)) {
  if (n_ < 1) throw ArgumentError("PhaseMap: need at least one level set");
  if (static_cast<int>(map_.size()) != (1 << n_))
    throw ConfigError("PhaseMap: material map must have an entry per phase index (2^n)");
}

MaterialIndex PhaseMap::material_of(int phase) const {
  if (phase < 0 || phase >= num_phases())
    throw ConfigError("PhaseMap: phase index " + std::to_string(phase) + " out of range");
  const MaterialIndex m = map_[phase];
  if (m < 0)
    throw ConfigError("PhaseMap: no material assigned to phase " + std::to_string(phase));
  return m;
}

MaterialTable::MaterialTable(std::vector<Material> materials)
    : materials_(std::move(materials)) {
  if (materials_.empty()) throw ConfigError("MaterialTable: empty table");
  for (size_t i = 1; i < materials_.size(); ++i) {
    const Material& m = materials_[i];
    if (!(m.E > 0.0) || !(m.kappa > 0.0) || m.nu < 0.0 || m.nu >= 0.5)
      throw ConfigError("MaterialTable: invalid properties for material " + std::to_string(i));
  }
}

const Material& MaterialTable::at(MaterialIndex m) const {
  if (m < 0 || m >= size())
    throw ConfigError("MaterialTable: material index " + std::to_string(m) + " undefined");
  return materials_[m];
}

}  // namespace xiga::geometry
