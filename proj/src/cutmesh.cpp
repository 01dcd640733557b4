#include "xiga/cutmesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <numeric>

namespace xiga::cutmesh {

namespace {

constexpr int kMaxLsf = 8;
using LsfVals = std::array<double, kMaxLsf>;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool lex_less(const Vec2& a, const Vec2& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  return a.y() < b.y();
}

std::uint64_t bits_of(double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof(u));
  return u;
}

/// Triangle carrying per-vertex level-set values, per-edge creator tags
/// (edge i runs v[i] -> v[(i+1)%3]) and the accumulated phase bits.
struct Tri {
  std::array<Vec2, 3> v;
  std::array<LsfVals, 3> f;
  std::array<int, 3> tag{-1, -1, -1};
  int phase = 0;
};

/// Intersection of edge (u,w) with the zero contour of level set l. The
/// endpoints are put in lexicographic order before interpolating so both
/// triangles sharing the edge compute bitwise-identical results.
void crossing(const Vec2& u, const LsfVals& fu, const Vec2& w, const LsfVals& fw, int l, int nlsf,
              double eps, Vec2& p, LsfVals& fp) {
  const Vec2* a = &u;
  const Vec2* b = &w;
  const LsfVals* fa = &fu;
  const LsfVals* fb = &fw;
  if (lex_less(w, u)) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  const double t = (*fa)[l] / ((*fa)[l] - (*fb)[l]);
  p = *a + t * (*b - *a);
  for (int m = 0; m < nlsf; ++m)
    fp[m] = m == l ? 0.0 : geometry::snap_shift((*fa)[m] + t * ((*fb)[m] - (*fa)[m]), 0.0, eps);
}

/// One marching pass: split each triangle along the zero contour of level
/// set l and record the sign of l in the phase bits.
void cut_by_levelset(std::vector<Tri>& tris, int l, int nlsf, double eps) {
  std::vector<Tri> out;
  out.reserve(tris.size() * 2);
  for (const Tri& t : tris) {
    std::array<bool, 3> pos;
    int npos = 0;
    for (int i = 0; i < 3; ++i) {
      pos[i] = t.f[i][l] > 0.0;
      npos += pos[i];
    }
    if (npos == 0 || npos == 3) {
      Tri kept = t;
      if (npos == 3) kept.phase |= 1 << l;
      out.push_back(kept);
      continue;
    }
    // a = the lone vertex on its side; crossings lie on edges (a,b) and (c,a).
    const bool lone_positive = npos == 1;
    int a = 0;
    for (int i = 0; i < 3; ++i)
      if (pos[i] == lone_positive) a = i;
    const int b = (a + 1) % 3;
    const int c = (a + 2) % 3;
    Vec2 q1, q2;
    LsfVals fq1, fq2;
    crossing(t.v[a], t.f[a], t.v[b], t.f[b], l, nlsf, eps, q1, fq1);
    crossing(t.v[c], t.f[c], t.v[a], t.f[a], l, nlsf, eps, q2, fq2);
    const int bit_a = lone_positive ? (1 << l) : 0;
    const int bit_bc = lone_positive ? 0 : (1 << l);

    Tri t1;  // (a, q1, q2): the lone-vertex corner
    t1.v = {t.v[a], q1, q2};
    t1.f = {t.f[a], fq1, fq2};
    t1.tag = {t.tag[a], l, t.tag[c]};
    t1.phase = t.phase | bit_a;
    out.push_back(t1);

    Tri t2;  // (q1, b, c): quad half along edge b
    t2.v = {q1, t.v[b], t.v[c]};
    t2.f = {fq1, t.f[b], t.f[c]};
    t2.tag = {t.tag[a], t.tag[b], -1};
    t2.phase = t.phase | bit_bc;
    out.push_back(t2);

    Tri t3;  // (q1, c, q2): quad half along the chord
    t3.v = {q1, t.v[c], q2};
    t3.f = {fq1, t.f[c], fq2};
    t3.tag = {-1, t.tag[c], l};
    t3.phase = t.phase | bit_bc;
    out.push_back(t3);
  }
  tris.swap(out);
}

struct LineItem {
  int cell;  // global cell index
  double t0, t1;
  int tag;
  bool plus_side;  // cell lies on the greater-coordinate side of the line
};

struct EdgeKey {
  std::array<std::uint64_t, 4> k;
  bool operator<(const EdgeKey& o) const { return k < o.k; }
};

EdgeKey make_edge_key(const Vec2& p, const Vec2& q) {
  const Vec2* a = &p;
  const Vec2* b = &q;
  if (lex_less(q, p)) std::swap(a, b);
  return {{bits_of(a->x()), bits_of(a->y()), bits_of(b->x()), bits_of(b->y())}};
}

struct HashItem {
  int cell;
  Vec2 p, q;
  int tag;
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(int i, int j) { parent[find(i)] = find(j); }
};

void add_pair_sorted(std::vector<Interval>& merged, double a, double b) {
  merged.push_back({a, b});
}

std::vector<Interval> merge_intervals(std::vector<Interval> iv, double tol) {
  std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.a < b.a; });
  std::vector<Interval> out;
  for (const Interval& i : iv) {
    if (!out.empty() && i.a <= out.back().b + tol)
      out.back().b = std::max(out.back().b, i.b);
    else
      out.push_back(i);
  }
  return out;
}

std::vector<Interval> intersect_intervals(const std::vector<Interval>& a,
                                          const std::vector<Interval>& b, double tol) {
  std::vector<Interval> out;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    const double s0 = std::max(a[ia].a, b[ib].a);
    const double s1 = std::min(a[ia].b, b[ib].b);
    if (s1 - s0 > tol) out.push_back({s0, s1});
    if (a[ia].b < b[ib].b)
      ++ia;
    else
      ++ib;
  }
  return out;
}

struct Builder {
  const BackgroundMesh& bg;
  const std::vector<std::shared_ptr<const geometry::LevelSet>>& lsfs;
  const geometry::PhaseMap& pm;
  int level;
  int nlsf;
  int n;  // fine cells per element edge
  double fx, fy;
  double eps;     // snap perturbation
  double tol;     // interval-overlap tolerance
  double amin;    // cell-area floor
  CutMesh m;

  // Face-line buckets keyed by (axis, global line index); built while
  // elements are processed, resolved afterwards for cross-element coupling.
  std::map<std::pair<int, int>, std::vector<LineItem>> face_buckets;
  std::map<std::array<int, 4>, double> comp_edge_len;

  Builder(const BackgroundMesh& bg_, const std::vector<std::shared_ptr<const geometry::LevelSet>>& lsfs_,
          const geometry::PhaseMap& pm_, int level_)
      : bg(bg_), lsfs(lsfs_), pm(pm_), level(level_) {
    nlsf = static_cast<int>(lsfs.size());
    if (nlsf < 1 || nlsf > kMaxLsf) throw ArgumentError("build_cut_mesh: need 1..8 level sets");
    if (pm.num_levelsets() != nlsf)
      throw ArgumentError("build_cut_mesh: phase map size does not match level-set count");
    if (level < 0 || level > 12) throw ArgumentError("build_cut_mesh: refinement level out of range");
    if (bg.nx < 1 || bg.ny < 1 || !(bg.hi.x() > bg.lo.x()) || !(bg.hi.y() > bg.lo.y()))
      throw ArgumentError("build_cut_mesh: invalid background mesh");
    n = 1 << level;
    fx = (bg.hi.x() - bg.lo.x()) / (bg.nx * n);
    fy = (bg.hi.y() - bg.lo.y()) / (bg.ny * n);
    eps = 1e-8 * bg.h();
    tol = 1e-12 * bg.h();
    amin = 1e-12 * bg.hx() * bg.hy();
    m.bg = bg;
    m.num_levelsets = nlsf;
    m.refinement_level = level;
    m.elems.resize(bg.num_elements());
  }

  // Fine-grid coordinates from the global index so that shared facet points
  // are bitwise identical between neighboring elements.
  double coord_x(int gx) const { return std::min(bg.lo.x() + gx * fx, bg.hi.x()); }
  double coord_y(int gy) const { return std::min(bg.lo.y() + gy * fy, bg.hi.y()); }

  double sample(int l, const Vec2& p) const {
    return geometry::snap_shift(lsfs[l]->value(p), lsfs[l]->iso, eps);
  }

  int boundary_lsf_tag(int tag_a, int tag_b, const Vec2& mid) const {
    if (tag_a >= 0) return tag_a;
    if (tag_b >= 0) return tag_b;
    int best = 0;
    double bestv = std::numeric_limits<double>::max();
    for (int l = 0; l < nlsf; ++l) {
      const double d = std::abs(lsfs[l]->value(mid) - lsfs[l]->iso);
      if (d < bestv) {
        bestv = d;
        best = l;
      }
    }
    return best;
  }

  void add_interface_length(int element, MaterialIndex mi, MaterialIndex mj, double len) {
    auto& list = m.elems[element].interface_length;
    for (auto& [a, b, l] : list) {
      if (a == mi && b == mj) {
        l += len;
        return;
      }
    }
    list.emplace_back(mi, mj, len);
  }

  void mark_cut(int element) { m.elems[element].cut_by_interface = true; }

  /// Emits an interface or immersed-boundary segment for two touching cells
  /// of different materials. `toward_b` is a unit vector pointing from cell
  /// ca's side into cell cb's side.
  void emit_segment(int ca, int cb, const Vec2& a, const Vec2& b, const Vec2& toward_b, int tag_a,
                    int tag_b) {
    const IntegrationCell& A = m.cells[ca];
    const IntegrationCell& B = m.cells[cb];
    const double len = (b - a).norm();
    if (len <= tol) return;
    if (A.material != 0 && B.material != 0) {
      InterfaceSegment s;
      const bool a_is_low = A.material < B.material;
      s.cell_i = a_is_low ? ca : cb;
      s.cell_j = a_is_low ? cb : ca;
      s.mat_i = std::min(A.material, B.material);
      s.mat_j = std::max(A.material, B.material);
      s.normal = a_is_low ? toward_b : Vec2(-toward_b);
      s.a = a;
      s.b = b;
      s.length = len;
      s.element = m.cells[s.cell_i].element;
      s.lsf = boundary_lsf_tag(tag_a, tag_b, 0.5 * (a + b));
      m.interfaces.push_back(s);
      add_interface_length(s.element, s.mat_i, s.mat_j, len);
      mark_cut(A.element);
      mark_cut(B.element);
    } else if (A.material != 0 || B.material != 0) {
      BoundarySegment s;
      const bool a_is_mat = A.material != 0;
      s.cell = a_is_mat ? ca : cb;
      s.material = a_is_mat ? A.material : B.material;
      s.normal = a_is_mat ? toward_b : Vec2(-toward_b);
      s.a = a;
      s.b = b;
      s.length = len;
      s.element = m.cells[s.cell].element;
      s.lsf = boundary_lsf_tag(tag_a, tag_b, 0.5 * (a + b));
      m.boundaries.push_back(s);
      mark_cut(A.element);
      mark_cut(B.element);
    }
  }

  void build_element(int ex, int ey) {
    const int e = bg.index(ex, ey);
    ElementData& ed = m.elems[e];
    ed.cell_begin = static_cast<int>(m.cells.size());

    const int nn = n + 1;
    std::vector<double> cx(nn), cy(nn);
    for (int i = 0; i < nn; ++i) cx[i] = coord_x(ex * n + i);
    for (int j = 0; j < nn; ++j) cy[j] = coord_y(ey * n + j);

    std::vector<LsfVals> vals(nn * nn);
    std::vector<int> mask(nn * nn, 0);
    for (int j = 0; j < nn; ++j)
      for (int i = 0; i < nn; ++i) {
        const Vec2 p(cx[i], cy[j]);
        LsfVals& f = vals[j * nn + i];
        int mk = 0;
        for (int l = 0; l < nlsf; ++l) {
          f[l] = sample(l, p);
          if (f[l] > 0.0) mk |= 1 << l;
        }
        mask[j * nn + i] = mk;
      }

    // uni[k]: phase of each 2^k x 2^k block if sign-uniform, else -1.
    std::vector<std::vector<int>> uni(level + 1);
    uni[0].resize(n * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int a = mask[j * nn + i];
        const bool u = a == mask[j * nn + i + 1] && a == mask[(j + 1) * nn + i] &&
                       a == mask[(j + 1) * nn + i + 1];
        uni[0][j * n + i] = u ? a : -1;
      }
    for (int k = 1; k <= level; ++k) {
      const int nk = n >> k;
      uni[k].resize(nk * nk);
      for (int j = 0; j < nk; ++j)
        for (int i = 0; i < nk; ++i) {
          const int nk1 = n >> (k - 1);
          const int a = uni[k - 1][(2 * j) * nk1 + 2 * i];
          const bool u = a >= 0 && a == uni[k - 1][(2 * j) * nk1 + 2 * i + 1] &&
                         a == uni[k - 1][(2 * j + 1) * nk1 + 2 * i] &&
                         a == uni[k - 1][(2 * j + 1) * nk1 + 2 * i + 1];
          uni[k][j * nk + i] = u ? a : -1;
        }
    }

    ed.intersected = uni[level][0] < 0;
    if (!ed.intersected) ed.phase = uni[level][0];

    emit_block(e, level, 0, 0, cx, cy, vals, uni);

    ed.cell_end = static_cast<int>(m.cells.size());

    // --- adjacency within the element -------------------------------------
    const int ncell = ed.cell_end - ed.cell_begin;
    UnionFind uf(ncell);
    std::map<std::pair<int, int>, std::vector<LineItem>> lines;  // (axis, local index)
    std::map<EdgeKey, std::vector<HashItem>> hashed;
    // (global cell, face, t0, t1): cell edges lying on the element faces.
    std::vector<std::tuple<int, int, double, double>> face_edges;

    for (int c = ed.cell_begin; c < ed.cell_end; ++c) {
      const IntegrationCell& cell = m.cells[c];
      const Vec2 cen = cell.centroid();
      for (int i = 0; i < cell.nv; ++i) {
        const Vec2& p = cell.v[i];
        const Vec2& q = cell.v[(i + 1) % cell.nv];
        const int tag = cell.edge_lsf[i];
        int axis = -1, li = -1;
        if (p.x() == q.x()) {
          auto it = std::lower_bound(cx.begin(), cx.end(), p.x());
          if (it != cx.end() && *it == p.x()) {
            axis = 0;
            li = static_cast<int>(it - cx.begin());
          }
        } else if (p.y() == q.y()) {
          auto it = std::lower_bound(cy.begin(), cy.end(), p.y());
          if (it != cy.end() && *it == p.y()) {
            axis = 1;
            li = static_cast<int>(it - cy.begin());
          }
        }
        if (axis < 0) {
          if ((q - p).norm() > tol) hashed[make_edge_key(p, q)].push_back({c, p, q, tag});
          continue;
        }
        const double coord = axis == 0 ? p.x() : p.y();
        double t0 = axis == 0 ? p.y() : p.x();
        double t1 = axis == 0 ? q.y() : q.x();
        if (t0 > t1) std::swap(t0, t1);
        const bool plus = (axis == 0 ? cen.x() : cen.y()) > coord;
        if (li == 0 || li == n) {
          const int face = axis == 0 ? (li == 0 ? 0 : 1) : (li == 0 ? 2 : 3);
          face_edges.emplace_back(c, face, t0, t1);
          const int gl = (axis == 0 ? ex : ey) * n + li;
          face_buckets[{axis, gl}].push_back({c, t0, t1, tag, plus});
        } else {
          lines[{axis, li}].push_back({c, t0, t1, tag, plus});
        }
      }
    }

    auto handle_pair = [&](const LineItem& lo_side, const LineItem& hi_side, int axis, double coord,
                           double s0, double s1) {
      const IntegrationCell& A = m.cells[lo_side.cell];
      const IntegrationCell& B = m.cells[hi_side.cell];
      if (A.material == B.material) {
        if (A.material != 0) uf.unite(lo_side.cell - ed.cell_begin, hi_side.cell - ed.cell_begin);
        return;
      }
      const Vec2 a = axis == 0 ? Vec2(coord, s0) : Vec2(s0, coord);
      const Vec2 b = axis == 0 ? Vec2(coord, s1) : Vec2(s1, coord);
      const Vec2 toward_hi = axis == 0 ? Vec2(1, 0) : Vec2(0, 1);
      emit_segment(lo_side.cell, hi_side.cell, a, b, toward_hi, lo_side.tag, hi_side.tag);
    };

    for (auto& [key, items] : lines) {
      std::vector<LineItem> minus, plus;
      for (const LineItem& it : items) (it.plus_side ? plus : minus).push_back(it);
      auto by_t0 = [](const LineItem& a, const LineItem& b) { return a.t0 < b.t0; };
      std::sort(minus.begin(), minus.end(), by_t0);
      std::sort(plus.begin(), plus.end(), by_t0);
      const double coord = key.first == 0 ? cx[key.second] : cy[key.second];
      std::size_t ia = 0, ib = 0;
      while (ia < minus.size() && ib < plus.size()) {
        const double s0 = std::max(minus[ia].t0, plus[ib].t0);
        const double s1 = std::min(minus[ia].t1, plus[ib].t1);
        if (s1 - s0 > tol) handle_pair(minus[ia], plus[ib], key.first, coord, s0, s1);
        if (minus[ia].t1 < plus[ib].t1)
          ++ia;
        else
          ++ib;
      }
    }

    for (auto& [key, items] : hashed) {
      // Degenerate sliver cells can add extra copies of an edge to a bucket;
      // same-material adjacency must still be united pairwise.
      for (std::size_t i = 0; i < items.size(); ++i)
        for (std::size_t j = i + 1; j < items.size(); ++j) {
          if (items[i].cell == items[j].cell) continue;
          const IntegrationCell& A = m.cells[items[i].cell];
          const IntegrationCell& B = m.cells[items[j].cell];
          if (A.material != 0 && A.material == B.material)
            uf.unite(items[i].cell - ed.cell_begin, items[j].cell - ed.cell_begin);
        }
      if (items.size() != 2 || items[0].cell == items[1].cell) continue;
      const IntegrationCell& A = m.cells[items[0].cell];
      const IntegrationCell& B = m.cells[items[1].cell];
      if (A.material == B.material) continue;
      const Vec2& p = items[0].p;
      const Vec2& q = items[0].q;
      Vec2 nrm(-(q - p).y(), (q - p).x());
      nrm.normalize();
      const Vec2 mid = 0.5 * (p + q);
      if (nrm.dot(B.centroid() - mid) < 0.0) nrm = -nrm;
      emit_segment(items[0].cell, items[1].cell, p, q, nrm, items[0].tag, items[1].tag);
    }

    // Edges produced by different marching paths can differ below the snap
    // scale, in which case exact hashing misses the adjacency. A tolerant
    // pass unites same-material cells across nearly coincident edges.
    {
      struct OEdge {
        int cell;
        Vec2 p, q;
        double mx;
      };
      std::vector<OEdge> oe;
      for (const auto& [key, items] : hashed)
        for (const auto& it : items) oe.push_back({it.cell, it.p, it.q, 0.5 * (it.p.x() + it.q.x())});
      std::sort(oe.begin(), oe.end(), [](const OEdge& a, const OEdge& b) { return a.mx < b.mx; });
      const double mtol = 4.0 * eps;
      auto near = [&](const Vec2& a, const Vec2& b) { return (a - b).norm() <= mtol; };
      for (std::size_t i = 0; i < oe.size(); ++i)
        for (std::size_t j = i + 1; j < oe.size() && oe[j].mx - oe[i].mx <= mtol; ++j) {
          if (oe[i].cell == oe[j].cell) continue;
          const IntegrationCell& A = m.cells[oe[i].cell];
          const IntegrationCell& B = m.cells[oe[j].cell];
          if (A.material == 0 || A.material != B.material) continue;
          if ((near(oe[i].p, oe[j].p) && near(oe[i].q, oe[j].q)) ||
              (near(oe[i].p, oe[j].q) && near(oe[i].q, oe[j].p)))
            uf.unite(oe[i].cell - ed.cell_begin, oe[j].cell - ed.cell_begin);
        }
    }

    // --- components --------------------------------------------------------
    std::map<int, int> root_to_comp;
    for (int lc = 0; lc < ncell; ++lc) {
      IntegrationCell& cell = m.cells[ed.cell_begin + lc];
      if (cell.material == 0) continue;
      const int r = uf.find(lc);
      auto it = root_to_comp.find(r);
      if (it == root_to_comp.end()) {
        it = root_to_comp.emplace(r, static_cast<int>(ed.comps.size())).first;
        ed.comps.push_back({cell.material, 0.0, {}});
      }
      cell.component = it->second;
      ed.comps[it->second].area += cell.area;
      ed.in_domain = true;
    }
    for (int lc = 0; lc < ncell; ++lc) {
      const IntegrationCell& cell = m.cells[ed.cell_begin + lc];
      if (cell.material == 0) continue;
      bool found = false;
      for (auto& [mat, area] : ed.material_area)
        if (mat == cell.material) {
          area += cell.area;
          found = true;
        }
      if (!found) ed.material_area.emplace_back(cell.material, cell.area);
    }

    for (const auto& [c, face, t0, t1] : face_edges) {
      const IntegrationCell& cell = m.cells[c];
      if (cell.component < 0) continue;
      add_pair_sorted(ed.comps[cell.component].face_trace[face], t0, t1);
    }
    for (Component& comp : ed.comps)
      for (auto& trace : comp.face_trace) trace = merge_intervals(std::move(trace), tol);
  }

  void emit_block(int e, int k, int i, int j, const std::vector<double>& cx,
                  const std::vector<double>& cy, const std::vector<LsfVals>& vals,
                  const std::vector<std::vector<int>>& uni) {
    const int nk = n >> k;
    const int u = uni[k][j * nk + i];
    if (u >= 0) {
      IntegrationCell cell;
      cell.nv = 4;
      const int i0 = i << k, j0 = j << k, s = 1 << k;
      cell.v = {Vec2(cx[i0], cy[j0]), Vec2(cx[i0 + s], cy[j0]), Vec2(cx[i0 + s], cy[j0 + s]),
                Vec2(cx[i0], cy[j0 + s])};
      cell.element = e;
      cell.phase = u;
      cell.material = pm.material_of(u);
      cell.area = (cx[i0 + s] - cx[i0]) * (cy[j0 + s] - cy[j0]);
      m.cells.push_back(cell);
      return;
    }
    if (k > 0) {
      emit_block(e, k - 1, 2 * i, 2 * j, cx, cy, vals, uni);
      emit_block(e, k - 1, 2 * i + 1, 2 * j, cx, cy, vals, uni);
      emit_block(e, k - 1, 2 * i, 2 * j + 1, cx, cy, vals, uni);
      emit_block(e, k - 1, 2 * i + 1, 2 * j + 1, cx, cy, vals, uni);
      return;
    }
    triangulate_cell(e, i, j, cx, cy, vals);
  }

  void triangulate_cell(int e, int i, int j, const std::vector<double>& cx,
                        const std::vector<double>& cy, const std::vector<LsfVals>& vals) {
    const int nn = n + 1;
    const std::array<Vec2, 4> corner = {Vec2(cx[i], cy[j]), Vec2(cx[i + 1], cy[j]),
                                        Vec2(cx[i + 1], cy[j + 1]), Vec2(cx[i], cy[j + 1])};
    const std::array<LsfVals, 4> cf = {vals[j * nn + i], vals[j * nn + i + 1],
                                       vals[(j + 1) * nn + i + 1], vals[(j + 1) * nn + i]};
    const Vec2 cen(0.5 * (cx[i] + cx[i + 1]), 0.5 * (cy[j] + cy[j + 1]));
    LsfVals fc{};
    for (int l = 0; l < nlsf; ++l) fc[l] = sample(l, cen);

    std::vector<Tri> tris;
    tris.reserve(4);
    for (int q = 0; q < 4; ++q) {
      Tri t;
      t.v = {corner[q], corner[(q + 1) % 4], cen};
      t.f = {cf[q], cf[(q + 1) % 4], fc};
      tris.push_back(t);
    }
    for (int l = 0; l < nlsf; ++l) cut_by_levelset(tris, l, nlsf, eps);

    // Interpolated crossing points can drift off the sub-grid lines by
    // round-off. Snapping them back keeps face edges exactly axis-aligned so
    // the face buckets see them; genuine sliver contours sit at the level-set
    // snap distance eps, far outside this tolerance.
    auto snap_coord = [this](double v, const std::vector<double>& c) {
      auto it = std::lower_bound(c.begin(), c.end(), v);
      if (it != c.end() && *it - v <= tol) return *it;
      if (it != c.begin() && v - *(it - 1) <= tol) return *(it - 1);
      return v;
    };
    for (Tri& t : tris)
      for (Vec2& v : t.v) v = Vec2(snap_coord(v.x(), cx), snap_coord(v.y(), cy));

    for (const Tri& t : tris) {
      const double area = 0.5 * cross2(t.v[1] - t.v[0], t.v[2] - t.v[0]);
      if (area < amin) {
        ++m.dropped_cells;
        continue;
      }
      IntegrationCell cell;
      cell.nv = 3;
      cell.v = {t.v[0], t.v[1], t.v[2], Vec2::Zero()};
      cell.edge_lsf = {t.tag[0], t.tag[1], t.tag[2], -1};
      cell.element = e;
      cell.phase = t.phase;
      cell.material = pm.material_of(t.phase);
      cell.area = area;
      m.cells.push_back(cell);
    }
  }

  void resolve_face_buckets() {
    for (auto& [key, items] : face_buckets) {
      const auto [axis, gl] = key;
      const int gmax = (axis == 0 ? bg.nx : bg.ny) * n;
      const double coord = axis == 0 ? coord_x(gl) : coord_y(gl);
      if (gl == 0 || gl == gmax) {
        // Domain box boundary: every material edge is a boundary segment.
        const int side = axis == 0 ? (gl == 0 ? 0 : 1) : (gl == 0 ? 2 : 3);
        Vec2 nrm = axis == 0 ? Vec2(gl == 0 ? -1 : 1, 0) : Vec2(0, gl == 0 ? -1 : 1);
        for (const LineItem& it : items) {
          const IntegrationCell& cell = m.cells[it.cell];
          if (cell.material == 0 || it.t1 - it.t0 <= tol) continue;
          BoundarySegment s;
          s.a = axis == 0 ? Vec2(coord, it.t0) : Vec2(it.t0, coord);
          s.b = axis == 0 ? Vec2(coord, it.t1) : Vec2(it.t1, coord);
          s.normal = nrm;
          s.element = cell.element;
          s.cell = it.cell;
          s.material = cell.material;
          s.length = it.t1 - it.t0;
          s.side = side;
          m.boundaries.push_back(s);
        }
        continue;
      }
      // Side assignment from the owning element (cells never straddle the line).
      std::vector<LineItem> minus, plus;
      for (const LineItem& it : items) {
        const IntegrationCell& cell = m.cells[it.cell];
        const int ec = axis == 0 ? cell.element % bg.nx : cell.element / bg.nx;
        const int lower_elem = gl / n - 1;
        (ec == lower_elem ? minus : plus).push_back(it);
      }
      auto by_t0 = [](const LineItem& a, const LineItem& b) { return a.t0 < b.t0; };
      std::sort(minus.begin(), minus.end(), by_t0);
      std::sort(plus.begin(), plus.end(), by_t0);
      std::size_t ia = 0, ib = 0;
      while (ia < minus.size() && ib < plus.size()) {
        const double s0 = std::max(minus[ia].t0, plus[ib].t0);
        const double s1 = std::min(minus[ia].t1, plus[ib].t1);
        if (s1 - s0 > tol) {
          const IntegrationCell& A = m.cells[minus[ia].cell];
          const IntegrationCell& B = m.cells[plus[ib].cell];
          if (A.material == B.material) {
            if (A.material != 0) {
              std::array<int, 4> ck = {A.element, A.component, B.element, B.component};
              comp_edge_len[ck] += s1 - s0;
            }
          } else {
            const Vec2 a = axis == 0 ? Vec2(coord, s0) : Vec2(s0, coord);
            const Vec2 b = axis == 0 ? Vec2(coord, s1) : Vec2(s1, coord);
            const Vec2 toward_hi = axis == 0 ? Vec2(1, 0) : Vec2(0, 1);
            emit_segment(minus[ia].cell, plus[ib].cell, a, b, toward_hi, minus[ia].tag,
                         plus[ib].tag);
          }
        }
        if (minus[ia].t1 < plus[ib].t1)
          ++ia;
        else
          ++ib;
      }
    }
    for (const auto& [key, len] : comp_edge_len) {
      if (len <= tol) continue;
      m.comp_edges.push_back({key[0], key[1], key[2], key[3], len});
    }
  }

  void build_ghost_facets() {
    auto facet = [&](int ea, int eb, int axis, double coord, double t0, double t1, int face_a,
                     int face_b) {
      const ElementData& A = m.elems[ea];
      const ElementData& B = m.elems[eb];
      if (!A.in_domain || !B.in_domain) return;
      if (!A.cut_by_interface && !B.cut_by_interface) return;
      GhostFacet g;
      g.axis = axis;
      g.elem_plus = ea;  // smaller coordinate side
      g.elem_minus = eb;
      g.coord = coord;
      g.extent = {t0, t1};
      for (int ca = 0; ca < static_cast<int>(A.comps.size()); ++ca) {
        if (A.comps[ca].material == 0) continue;
        for (int cb = 0; cb < static_cast<int>(B.comps.size()); ++cb) {
          if (B.comps[cb].material != A.comps[ca].material) continue;
          auto ov = intersect_intervals(A.comps[ca].face_trace[face_a],
                                        B.comps[cb].face_trace[face_b], tol);
          double len = 0;
          for (const Interval& iv : ov) len += iv.length();
          if (len > tol) g.pairs.push_back({ca, cb, A.comps[ca].material, std::move(ov)});
        }
      }
      m.ghost_facets.push_back(std::move(g));
    };

    for (int ey = 0; ey < bg.ny; ++ey)
      for (int ex = 0; ex + 1 < bg.nx; ++ex)
        facet(bg.index(ex, ey), bg.index(ex + 1, ey), 0, coord_x((ex + 1) * n), coord_y(ey * n),
              coord_y((ey + 1) * n), 1, 0);
    for (int ey = 0; ey + 1 < bg.ny; ++ey)
      for (int ex = 0; ex < bg.nx; ++ex)
        facet(bg.index(ex, ey), bg.index(ex, ey + 1), 1, coord_y((ey + 1) * n), coord_x(ex * n),
              coord_x((ex + 1) * n), 3, 2);
  }

  CutMesh run() {
    for (int ey = 0; ey < bg.ny; ++ey)
      for (int ex = 0; ex < bg.nx; ++ex) build_element(ex, ey);
    resolve_face_buckets();
    build_ghost_facets();
    return std::move(m);
  }
};

}  // namespace

int BackgroundMesh::element_at(const Vec2& x) const {
  const double tx = 1e-9 * hx(), ty = 1e-9 * hy();
  if (x.x() < lo.x() - tx || x.x() > hi.x() + tx || x.y() < lo.y() - ty || x.y() > hi.y() + ty)
    throw DomainError("element_at: point outside the background mesh");
  int ex = static_cast<int>(std::floor((x.x() - lo.x()) / hx()));
  int ey = static_cast<int>(std::floor((x.y() - lo.y()) / hy()));
  ex = std::clamp(ex, 0, nx - 1);
  ey = std::clamp(ey, 0, ny - 1);
  return index(ex, ey);
}

Vec2 IntegrationCell::centroid() const {
  Vec2 c = Vec2::Zero();
  for (int i = 0; i < nv; ++i) c += v[i];
  return c / nv;
}

double CutMesh::material_area_in_element(int e, MaterialIndex mat) const {
  for (const auto& [mm, a] : elems[e].material_area)
    if (mm == mat) return a;
  return 0.0;
}

double CutMesh::interface_length_in_element(int e, MaterialIndex mi, MaterialIndex mj) const {
  if (mi > mj) std::swap(mi, mj);
  for (const auto& [a, b, l] : elems[e].interface_length)
    if (a == mi && b == mj) return l;
  return 0.0;
}

int CutMesh::locate_cell(const Vec2& x) const {
  Vec2 p = x;
  p.x() = std::clamp(p.x(), bg.lo.x(), bg.hi.x());
  p.y() = std::clamp(p.y(), bg.lo.y(), bg.hi.y());
  // Dropped degenerate cells leave holes of the snap scale (1e-8 h) in the
  // tiling, so a fallback at that scale backs up the strict tolerance.
  const double tol = 1e-9 * bg.h();
  const double ftol = 4e-8 * bg.h();
  const int e = bg.element_at(p);
  const int ex = e % bg.nx, ey = e / bg.nx;
  std::array<int, 3> exs{ex, -1, -1}, eys{ey, -1, -1};
  const Vec2 lo = bg.elem_lo(ex, ey), hi = bg.elem_hi(ex, ey);
  if (ex > 0 && p.x() - lo.x() <= ftol) exs[1] = ex - 1;
  if (ex + 1 < bg.nx && hi.x() - p.x() <= ftol) exs[1] = ex + 1;
  if (ey > 0 && p.y() - lo.y() <= ftol) eys[1] = ey - 1;
  if (ey + 1 < bg.ny && hi.y() - p.y() <= ftol) eys[1] = ey + 1;

  int best = -1, best_nonvoid = -1;
  double score = -std::numeric_limits<double>::max();
  double score_nonvoid = -std::numeric_limits<double>::max();
  for (int cx : exs)
    for (int cy : eys) {
      if (cx < 0 || cy < 0) continue;
      const int el = bg.index(cx, cy);
      for (int c = elems[el].cell_begin; c < elems[el].cell_end; ++c) {
        const IntegrationCell& cell = cells[c];
        double s;
        if (cell.nv == 4) {
          s = std::min(std::min(p.x() - cell.v[0].x(), cell.v[2].x() - p.x()),
                       std::min(p.y() - cell.v[0].y(), cell.v[2].y() - p.y()));
        } else {
          s = std::numeric_limits<double>::max();
          for (int i = 0; i < 3; ++i) {
            const Vec2 d = cell.v[(i + 1) % 3] - cell.v[i];
            s = std::min(s, cross2(d, p - cell.v[i]) / d.norm());
          }
        }
        if (s > score) {
          score = s;
          best = c;
        }
        if (cell.material != 0 && s > score_nonvoid) {
          score_nonvoid = s;
          best_nonvoid = c;
        }
      }
    }
  if (best_nonvoid >= 0 && score_nonvoid > -tol) return best_nonvoid;
  if (best >= 0 && score > -tol) return best;
  if (best_nonvoid >= 0 && score_nonvoid > -ftol) return best_nonvoid;
  if (best >= 0 && score > -ftol) return best;
  return -1;
}

CutMesh build_cut_mesh(const BackgroundMesh& bg,
                       const std::vector<std::shared_ptr<const geometry::LevelSet>>& levelsets,
                       const geometry::PhaseMap& phase_map, int refinement_level) {
  Builder b(bg, levelsets, phase_map, refinement_level);
  return b.run();
}

std::vector<quadrature::QuadPoint2D> quadrature_for_cell(const IntegrationCell& cell, int p) {
  if (p < 1 || p > 3) throw ArgumentError("quadrature_for_cell: degree must be 1, 2 or 3");
  if (cell.nv == 4) return quadrature::quad_rule(p + 1, cell.v[0], cell.v[2]);
  const int npts = p == 1 ? 7 : (p == 2 ? 12 : 25);
  return quadrature::triangle_rule(npts, cell.v[0], cell.v[1], cell.v[2]);
}

std::vector<quadrature::QuadPoint2D> quadrature_for_cell_order(const IntegrationCell& cell,
                                                               int order) {
  if (order < 1 || order > 30) throw ArgumentError("quadrature_for_cell_order: bad order");
  if (cell.nv == 4) return quadrature::quad_rule(order + 1, cell.v[0], cell.v[2]);
  return quadrature::triangle_duffy(order + 1, cell.v[0], cell.v[1], cell.v[2]);
}

std::vector<int> label_components(const CutMesh& mesh, const std::vector<int>& elements) {
  std::map<std::pair<int, int>, int> node_of;
  int nnodes = 0;
  for (int e : elements)
    for (int c = 0; c < static_cast<int>(mesh.elems[e].comps.size()); ++c)
      node_of[{e, c}] = nnodes++;
  UnionFind uf(nnodes);
  for (const CompEdge& ce : mesh.comp_edges) {
    auto a = node_of.find({ce.elem_a, ce.comp_a});
    auto b = node_of.find({ce.elem_b, ce.comp_b});
    if (a != node_of.end() && b != node_of.end()) uf.unite(a->second, b->second);
  }
  std::vector<int> labels(nnodes, -1);
  std::map<int, int> root_to_label;
  int next = 0;
  for (int e : elements)
    for (int c = 0; c < static_cast<int>(mesh.elems[e].comps.size()); ++c) {
      const int node = node_of[{e, c}];
      const int r = uf.find(node);
      auto it = root_to_label.find(r);
      if (it == root_to_label.end()) it = root_to_label.emplace(r, next++).first;
      labels[node] = it->second;
    }
  return labels;
}

}  // namespace cutmesh
