#pragma once

#include <array>
#include <memory>
#include <tuple>
#include <vector>

#include "xiga/levelset.hpp"
#include "xiga/quadrature.hpp"
#include "xiga/types.hpp"

namespace xiga::cutmesh {

/// Structured grid of background elements (the tensor of knot spans).
struct BackgroundMesh {
  Vec2 lo, hi;
  int nx = 1, ny = 1;

  double hx() const { return (hi.x() - lo.x()) / nx; }
  double hy() const { return (hi.y() - lo.y()) / ny; }
  double h() const { return std::min(hx(), hy()); }
  int num_elements() const { return nx * ny; }
  int index(int ex, int ey) const { return ex + nx * ey; }
  Vec2 elem_lo(int ex, int ey) const { return lo + Vec2(ex * hx(), ey * hy()); }
  Vec2 elem_hi(int ex, int ey) const { return lo + Vec2((ex + 1) * hx(), (ey + 1) * hy()); }
  int num_interior_facets() const { return (nx - 1) * ny + nx * (ny - 1); }

  /// Element containing x (clamped to the grid); throws outside the box.
  int element_at(const Vec2& x) const;
};

/// Single-phase triangle or axis-aligned quad produced by subdivision.
struct IntegrationCell {
  std::array<Vec2, 4> v{};
  int nv = 0;  // 3 or 4 (quad vertices in CCW order)
  std::array<int, 4> edge_lsf{-1, -1, -1, -1};  // level set that created edge i
  int element = 0;
  int phase = 0;
  MaterialIndex material = 0;
  int component = -1;  // connected component within the parent element
  double area = 0.0;

  Vec2 centroid() const;
};

/// Oriented piece of a material interface inside one background element;
/// the normal points from the lower material index into the higher.
struct InterfaceSegment {
  Vec2 a, b;
  Vec2 normal;
  int element = 0;
  int cell_i = -1, cell_j = -1;  // cells on the lower/higher material side
  MaterialIndex mat_i = 0, mat_j = 0;
  double length = 0.0;
  int lsf = -1;
};

/// Piece of the domain boundary: either on the background box (side >= 0)
/// or on a level-set contour separating material from void.
struct BoundarySegment {
  Vec2 a, b;
  Vec2 normal;  // outward from the material
  int element = 0;
  int cell = -1;
  MaterialIndex material = 0;
  double length = 0.0;
  int lsf = -1;
  int side = -1;  // 0 xmin, 1 xmax, 2 ymin, 3 ymax
};

struct Interval {
  double a = 0.0, b = 0.0;
  double length() const { return b - a; }
};

/// Connected single-material subdomain of one background element.
struct Component {
  MaterialIndex material = 0;
  double area = 0.0;
  // Covered intervals of the four element faces (0 x-lo, 1 x-hi, 2 y-lo, 3 y-hi).
  std::array<std::vector<Interval>, 4> face_trace;
};

struct ElementData {
  bool in_domain = false;        // has a non-void cell
  bool intersected = false;      // phase changes within the element
  bool cut_by_interface = false; // touches a material interface or immersed boundary
  int phase = -1;                // phase index when not intersected
  int cell_begin = 0, cell_end = 0;
  std::vector<Component> comps;
  std::vector<std::pair<MaterialIndex, double>> material_area;
  std::vector<std::tuple<MaterialIndex, MaterialIndex, double>> interface_length;
};

/// Matched pair of same-material subdomains across a ghost facet.
struct GhostPair {
  int comp_plus = -1, comp_minus = -1;
  MaterialIndex material = 0;
  std::vector<Interval> overlap;  // along the facet tangent coordinate
};

struct GhostFacet {
  int axis = 0;  // facet normal direction (0: x, 1: y)
  int elem_plus = -1, elem_minus = -1;  // plus side has the smaller coordinate
  double coord = 0.0;
  Interval extent;
  std::vector<GhostPair> pairs;
};

/// Same-material adjacency between components of neighboring elements.
struct CompEdge {
  int elem_a = -1, comp_a = -1, elem_b = -1, comp_b = -1;
  double overlap_len = 0.0;
};

struct CutMesh {
  BackgroundMesh bg;
  int num_levelsets = 0;
  int refinement_level = 0;
  std::vector<IntegrationCell> cells;  // grouped by element
  std::vector<ElementData> elems;
  std::vector<InterfaceSegment> interfaces;
  std::vector<BoundarySegment> boundaries;
  std::vector<GhostFacet> ghost_facets;
  std::vector<CompEdge> comp_edges;
  int dropped_cells = 0;

  double material_area_in_element(int e, MaterialIndex m) const;
  double interface_length_in_element(int e, MaterialIndex mi, MaterialIndex mj) const;

  /// Integration cell containing x (tolerant point-in-cell test; prefers
  /// non-void cells). Returns -1 when nothing matches.
  int locate_cell(const Vec2& x) const;
};

/// Builds the conforming integration mesh: snapped nodal sampling of the
/// level sets on a 2^level x 2^level refined grid per element, quadtree
/// merging of uniform regions, primary (4-triangle) and secondary
/// (per-level-set marching) subdivision, component labeling, interface and
/// ghost facet extraction.
CutMesh build_cut_mesh(const BackgroundMesh& bg,
                       const std::vector<std::shared_ptr<const geometry::LevelSet>>& levelsets,
                       const geometry::PhaseMap& phase_map, int refinement_level = 0);

/// Assembly quadrature: 7/12/25-point triangle rules and (p+1)^2 tensor
/// Gauss on quads for p = 1/2/3.
std::vector<quadrature::QuadPoint2D> quadrature_for_cell(const IntegrationCell& cell, int p);

/// Quadrature of arbitrary order for error integration: (order+1)^2 Gauss on
/// quads, Duffy rule exact to total degree 2*order on triangles.
std::vector<quadrature::QuadPoint2D> quadrature_for_cell_order(const IntegrationCell& cell,
                                                               int order);

/// Labels edge-connected same-material components over a scope of elements.
/// Nodes are enumerated as (element, component) in scope order; the result
/// maps each node to its label (labels are dense, starting at 0).
std::vector<int> label_components(const CutMesh& mesh, const std::vector<int>& elements);

}  // namespace xiga::cutmesh
