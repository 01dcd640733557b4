#pragma once

#include <memory>
#include <vector>

#include "xiga/spline.hpp"
#include "xiga/types.hpp"

namespace xiga::geometry {

/// Implicit geometry: the iso-level `iso` of value() separates two regions.
class LevelSet {
 public:
  virtual ~LevelSet() = default;
  virtual double value(const Vec2& x) const = 0;
  double iso = 0.0;
};

/// phi = n.x - offset (n need not be unit length).
class PlaneLevelSet : public LevelSet {
 public:
  PlaneLevelSet(const Vec2& normal, double offset) : n_(normal), c_(offset) {}
  double value(const Vec2& x) const override { return n_.dot(x) - c_; }

 private:
  Vec2 n_;
  double c_;
};

/// Signed distance to a circle, negative inside.
class CircleLevelSet : public LevelSet {
 public:
  CircleLevelSet(const Vec2& center, double radius) : c_(center), r_(radius) {}
  double value(const Vec2& x) const override { return (x - c_).norm() - r_; }

 private:
  Vec2 c_;
  double r_;
};

/// phi = |n.x - c| - w: negative inside a slab of half-width w.
class SlabLevelSet : public LevelSet {
 public:
  SlabLevelSet(const Vec2& normal, double center, double halfwidth)
      : n_(normal), c_(center), w_(halfwidth) {}
  double value(const Vec2& x) const override { return std::abs(n_.dot(x) - c_) - w_; }

 private:
  Vec2 n_;
  double c_, w_;
};

/// Signed distance to a rotated rectangle, negative inside.
class BoxLevelSet : public LevelSet {
 public:
  BoxLevelSet(const Vec2& center, const Vec2& halfwidth, double angle_rad);
  double value(const Vec2& x) const override;

 private:
  Vec2 c_, hw_;
  double cs_, sn_;
};

/// Level set discretized as a spline combination of coefficients.
class LevelSetField : public LevelSet {
 public:
  LevelSetField(std::shared_ptr<const splines::TensorBasis> basis,
                std::vector<double> coefficients);

  /// Coefficient grid obtained by sampling f at the Greville abscissae, so
  /// that linear fields are reproduced exactly for any degree.
  static LevelSetField sample(std::shared_ptr<const splines::TensorBasis> basis,
                              const std::function<double(const Vec2&)>& f);

  double value(const Vec2& x) const override;
  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  std::shared_ptr<const splines::TensorBasis> basis_;
  std::vector<double> coeffs_;
};

/// Per-component on-interface marker plus the phase index of Eq.-style
/// binary sign encoding.
struct PhaseResult {
  int index = 0;
  unsigned on_interface_mask = 0;  // bit j set: |phi_j - iso| <= eps
  bool on_interface() const { return on_interface_mask != 0; }
};

/// f_j = 0 if phi_j < iso, 1 if phi_j > iso; P = sum_j 2^(j-1) f_j.
PhaseResult phase_index(const std::vector<double>& values, double iso, double eps);

/// Shift a raw level-set value to iso = 0 and perturb values within eps of
/// the interface to +eps (deterministic removal of zero-measure cuts).
inline double snap_shift(double value, double iso, double eps) {
  const double s = value - iso;
  return std::abs(s) <= eps ? eps : s;
}

/// Map from phase index (2^n entries) to material index; 0 is void, a
/// negative entry marks an unassigned phase.
class PhaseMap {
 public:
  PhaseMap(int num_levelsets, std::vector<MaterialIndex> map);
  int num_levelsets() const { return n_; }
  int num_phases() const { return 1 << n_; }
  MaterialIndex material_of(int phase) const;

 private:
  int n_;
  std::vector<MaterialIndex> map_;
};

class MaterialTable {
 public:
  /// materials[0] is the void placeholder; properties of non-void entries
  /// are validated (E > 0, kappa > 0, 0 <= nu < 0.5).
  explicit MaterialTable(std::vector<Material> materials);
  const Material& at(MaterialIndex m) const;
  int size() const { return static_cast<int>(materials_.size()); }

 private:
  std::vector<Material> materials_;
};

}  // namespace xiga::geometry
