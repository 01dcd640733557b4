#pragma once

#include <vector>

#include "xiga/cutmesh.hpp"
#include "xiga/spline.hpp"
#include "xiga/types.hpp"

namespace xiga::enrichment {

/// Generalized Heaviside enrichment: every background function B_k is split
/// into one copy per connected material subregion of its support, and each
/// copy carries `num_fields` solution components. Subregions whose area is
/// below 1e-12 * h^2 are dropped from the system (and recorded).
class Enrichment {
 public:
  Enrichment(const splines::TensorBasis& basis, const cutmesh::CutMesh& mesh, int num_fields);

  int num_fields() const { return nf_; }
  int num_basis() const { return static_cast<int>(levels_.size()); }
  /// Number of (basis, subregion) pairs kept in the system.
  int num_pairs() const { return num_pairs_; }
  int num_dofs() const { return num_pairs_ * nf_; }
  int num_dropped() const { return dropped_; }

  /// Enrichment levels L_k of basis k (dropped levels included).
  int num_levels(int k) const { return static_cast<int>(levels_[k].size()); }
  double level_area(int k, int l) const { return levels_[k][l].area; }
  MaterialIndex level_material(int k, int l) const { return levels_[k][l].material; }
  bool level_dropped(int k, int l) const { return levels_[k][l].pair < 0; }

  /// Global dof of (basis k, level l, field f); -1 when the level is dropped.
  int dof(int k, int l, int f) const {
    const int p = levels_[k][l].pair;
    return p < 0 ? -1 : p * nf_ + f;
  }

  /// Enrichment level of basis k active on component `comp` of element e;
  /// -1 when k is not supported on e or the element has no such component.
  int level_on(int k, int e, int comp) const;

  /// Dof of basis k, field f on (element e, component comp); -1 if dropped.
  int dof_on(int k, int e, int comp, int f) const {
    const int l = level_on(k, e, comp);
    return l < 0 ? -1 : dof(k, l, f);
  }

  const std::vector<int>& support_elements(int k) const { return support_[k]; }

 private:
  struct Level {
    double area = 0.0;
    MaterialIndex material = 0;
    int pair = -1;
  };

  int degree_ = 1;
  int nbx_ = 0, nelx_ = 0;
  int nf_ = 1;
  int num_pairs_ = 0;
  int dropped_ = 0;
  int slots_ = 0;  // (p+1)^2 supported functions per element
  std::vector<std::vector<Level>> levels_;  // per basis
  std::vector<std::vector<int>> support_;   // elements per basis
  std::vector<std::vector<int>> elem_levels_;  // per element: [slot * ncomps + comp]
  std::vector<int> first_bx_, first_by_;       // first supported basis per element/dir
};

}  // namespace xiga::enrichment
