#include "xiga/enrichment.hpp"

#include <algorithm>

namespace xiga::enrichment {

Enrichment::Enrichment(const splines::TensorBasis& basis, const cutmesh::CutMesh& mesh,
                       int num_fields)
    : degree_(basis.degree()), nbx_(basis.num_basis(0)), nelx_(basis.num_elements(0)),
      nf_(num_fields) {
  if (num_fields < 1 || num_fields > 2) throw ArgumentError("Enrichment: num_fields must be 1 or 2");
  if (basis.num_elements(0) != mesh.bg.nx || basis.num_elements(1) != mesh.bg.ny)
    throw ArgumentError("Enrichment: basis and cut mesh element grids differ");
  const int p = basis.degree();
  slots_ = (p + 1) * (p + 1);
  const int nbx = basis.num_basis(0), nby = basis.num_basis(1);
  const int nelx = mesh.bg.nx, nely = mesh.bg.ny;
  const double area_floor = 1e-12 * mesh.bg.hx() * mesh.bg.hy();

  first_bx_.resize(nelx);
  first_by_.resize(nely);
  std::vector<std::vector<int>> sup_x(nbx), sup_y(nby);
  for (int e = 0; e < nelx; ++e) {
    first_bx_[e] = basis.kv(0).first_basis(basis.kv(0).span_of_element(e));
    for (int i = 0; i <= p; ++i) sup_x[first_bx_[e] + i].push_back(e);
  }
  for (int e = 0; e < nely; ++e) {
    first_by_[e] = basis.kv(1).first_basis(basis.kv(1).span_of_element(e));
    for (int i = 0; i <= p; ++i) sup_y[first_by_[e] + i].push_back(e);
  }

  levels_.resize(basis.num_basis());
  support_.resize(basis.num_basis());
  elem_levels_.resize(mesh.bg.num_elements());
  for (int e = 0; e < mesh.bg.num_elements(); ++e)
    elem_levels_[e].assign(slots_ * mesh.elems[e].comps.size(), -1);

  for (int iy = 0; iy < nby; ++iy)
    for (int ix = 0; ix < nbx; ++ix) {
      const int k = basis.global_index(ix, iy);
      std::vector<int>& elems = support_[k];
      for (int ey : sup_y[iy])
        for (int ex : sup_x[ix]) elems.push_back(mesh.bg.index(ex, ey));
      std::sort(elems.begin(), elems.end());

      const std::vector<int> labels = cutmesh::label_components(mesh, elems);
      auto& lv = levels_[k];
      int node = 0;
      for (int e : elems) {
        const auto& comps = mesh.elems[e].comps;
        const int ncomp = static_cast<int>(comps.size());
        const int ex = e % nelx, ey = e / nelx;
        const int slot = (ix - first_bx_[ex]) + (p + 1) * (iy - first_by_[ey]);
        for (int c = 0; c < ncomp; ++c, ++node) {
          const int l = labels[node];
          if (l >= static_cast<int>(lv.size())) lv.resize(l + 1);
          lv[l].area += comps[c].area;
          lv[l].material = comps[c].material;
          elem_levels_[e][slot * ncomp + c] = l;
        }
      }
      for (Level& level : lv) {
        if (level.area < area_floor) {
          ++dropped_;
          level.pair = -1;
        } else {
          level.pair = num_pairs_++;
        }
      }
    }
}

int Enrichment::level_on(int k, int e, int comp) const {
  const int p = degree_;
  const int ix = k % nbx_, iy = k / nbx_;
  const int ex = e % nelx_, ey = e / nelx_;
  const int sx = ix - first_bx_[ex], sy = iy - first_by_[ey];
  if (sx < 0 || sx > p || sy < 0 || sy > p) return -1;
  const int slot = sx + (p + 1) * sy;
  const auto& el = elem_levels_[e];
  if (el.empty()) return -1;
  const int ncomp = static_cast<int>(el.size()) / slots_;
  if (comp < 0 || comp >= ncomp) return -1;
  return el[slot * ncomp + comp];
}

}  // namespace xiga::enrichment
