#include <Eigen/Dense>
#include <map>

#include "xiga/system.hpp"

namespace xiga::system {

namespace {

using problem::Problem;

Eigen::Matrix3d voigt_D(const Material& m) {
  const double Et = m.E / ((1.0 + m.nu) * (1.0 - 2.0 * m.nu));
  Eigen::Matrix3d D;
  D << 1.0 - m.nu, m.nu, 0.0,  //
      m.nu, 1.0 - m.nu, 0.0,   //
      0.0, 0.0, 0.5 * (1.0 - 2.0 * m.nu);
  return Et * D;
}

Eigen::Vector3d strain_col(const Vec2& g, int f) {
  return f == 0 ? Eigen::Vector3d(g.x(), 0.0, g.y()) : Eigen::Vector3d(0.0, g.y(), g.x());
}

/// Dense accumulator over the (few) global dofs touched by one element,
/// segment or facet; flushed into the global triplet list.
struct LocalBlock {
  std::vector<int> dofs;
  std::map<int, int> index;
  Eigen::MatrixXd K;
  Eigen::VectorXd F;

  int local(int gdof) {
    auto it = index.find(gdof);
    if (it != index.end()) return it->second;
    const int li = static_cast<int>(dofs.size());
    index.emplace(gdof, li);
    dofs.push_back(gdof);
    if (li >= K.rows()) {
      const int cap = std::max(16, 2 * li);
      Eigen::MatrixXd K2 = Eigen::MatrixXd::Zero(cap, cap);
      K2.topLeftCorner(K.rows(), K.cols()) = K;
      K = std::move(K2);
      Eigen::VectorXd F2 = Eigen::VectorXd::Zero(cap);
      F2.head(F.size()) = F;
      F = std::move(F2);
    }
    return li;
  }

  void flush(std::vector<Eigen::Triplet<double>>& trips, Eigen::VectorXd& rhs) {
    const int n = static_cast<int>(dofs.size());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j)
        if (K(i, j) != 0.0) trips.emplace_back(dofs[i], dofs[j], K(i, j));
      if (F(i) != 0.0) rhs(dofs[i]) += F(i);
    }
    dofs.clear();
    index.clear();
    K.setZero();
    F.setZero();
  }
};

/// One enriched test/trial function at a point: value, gradient and the
/// co-normal flux it generates (traction sigma(phi e_f) n, or kappa grad n).
struct DofEval {
  int dof;
  int f;
  double B;
  Vec2 g;
};

class Assembler {
 public:
  Assembler(const Problem& prob, const Discretization& disc)
      : prob_(prob), disc_(disc), nf_(prob.num_fields()), p_(prob.degree) {
    h_ = std::min(prob.bg.hx(), prob.bg.hy());
    rhs_ = Eigen::VectorXd::Zero(disc.enr.num_dofs());
  }

  Assembled run() {
    volume_terms();
    boundary_terms();
    interface_terms();
    ghost_terms();
    Assembled out;
    out.A = from_triplets_deterministic(disc_.enr.num_dofs(), disc_.enr.num_dofs(),
                                        std::move(trips_));
    out.rhs = std::move(rhs_);
    return out;
  }

 private:
  const Problem& prob_;
  const Discretization& disc_;
  int nf_, p_;
  double h_;
  std::vector<Eigen::Triplet<double>> trips_;
  Eigen::VectorXd rhs_;
  LocalBlock blk_;

  std::pair<int, int> elem_xy(int e) const { return {e % prob_.bg.nx, e / prob_.bg.nx}; }

  /// Enriched dofs active at a point of (element, component).
  std::vector<DofEval> collect(const splines::TensorEval& ev, int e, int comp) const {
    std::vector<DofEval> out;
    out.reserve(ev.count * nf_);
    for (int j = 0; j < ev.count; ++j)
      for (int f = 0; f < nf_; ++f) {
        const int dof = disc_.enr.dof_on(ev.ids[j], e, comp, f);
        if (dof >= 0) out.push_back({dof, f, ev.value(j), ev.gradient(j)});
      }
    return out;
  }

  /// Co-normal flux vector of one dof: component c of sigma(phi_i e_fi) n for
  /// elasticity; for heat the single component kappa grad(phi_i) . n.
  Eigen::Vector2d flux_of(const DofEval& d, const Material& mat, const Vec2& n) const {
    if (prob_.physics == Physics::Heat)
      return Eigen::Vector2d(mat.kappa * d.g.dot(n), 0.0);
    const Eigen::Vector3d s = voigt_D(mat) * strain_col(d.g, d.f);
    return Eigen::Vector2d(s(0) * n.x() + s(2) * n.y(), s(2) * n.x() + s(1) * n.y());
  }

  void volume_terms() {
    const auto& mesh = disc_.mesh;
    for (int e = 0; e < mesh.bg.num_elements(); ++e) {
      const auto [ex, ey] = elem_xy(e);
      for (int c = mesh.elems[e].cell_begin; c < mesh.elems[e].cell_end; ++c) {
        const auto& cell = mesh.cells[c];
        if (cell.material == 0) continue;
        const Material& mat = prob_.materials->at(cell.material);
        const Eigen::Matrix3d D = voigt_D(mat);
        for (const auto& qp : cutmesh::quadrature_for_cell(cell, p_)) {
          const auto ev = disc_.basis.eval_on_element(ex, ey, qp.x, 1);
          const auto dofs = collect(ev, e, cell.component);
          if (prob_.physics == Physics::Heat) {
            for (const DofEval& a : dofs)
              for (const DofEval& b : dofs)
                blk_.K(blk_.local(a.dof), blk_.local(b.dof)) +=
                    qp.w * mat.kappa * a.g.dot(b.g);
          } else {
            std::vector<Eigen::Vector3d> Bc(dofs.size());
            for (std::size_t i = 0; i < dofs.size(); ++i) Bc[i] = strain_col(dofs[i].g, dofs[i].f);
            for (std::size_t i = 0; i < dofs.size(); ++i) {
              const Eigen::Vector3d DBi = D * Bc[i];
              for (std::size_t j = 0; j < dofs.size(); ++j)
                blk_.K(blk_.local(dofs[i].dof), blk_.local(dofs[j].dof)) +=
                    qp.w * DBi.dot(Bc[j]);
            }
          }
          if (prob_.body_load) {
            const Eigen::Vector2d bl = prob_.body_load(qp.x, cell.material);
            for (const DofEval& a : dofs) blk_.F(blk_.local(a.dof)) += qp.w * a.B * bl(a.f);
          }
        }
      }
      blk_.flush(trips_, rhs_);
    }
  }

  template <typename Fn>
  void segment_quadrature(const Vec2& a, const Vec2& b, Fn&& fn) const {
    // Traces of bi-degree-p functions along oblique segments have degree 2p,
    // so products in the Nitsche terms reach degree 4p; 2p+1 points are exact.
    const double len = (b - a).norm();
    for (const auto& q : quadrature::gauss_legendre(2 * p_ + 1, 0.0, 1.0))
      fn(Vec2(a + q.x * (b - a)), q.w * len);
  }

  static bool matches(const problem::BoundaryRef& w, const cutmesh::BoundarySegment& s) {
    if (w.side >= 0) return s.side == w.side;
    return s.side < 0 && s.lsf == w.lsf;
  }

  void boundary_terms() {
    for (const auto& seg : disc_.mesh.boundaries) {
      const auto& cell = disc_.mesh.cells[seg.cell];
      const auto [ex, ey] = elem_xy(seg.element);
      const Material& mat = prob_.materials->at(seg.material);
      const double stiff = prob_.physics == Physics::Heat ? mat.kappa : mat.E;

      for (const auto& bc : prob_.neumann) {
        if (!matches(bc.where, seg)) continue;
        segment_quadrature(seg.a, seg.b, [&](const Vec2& x, double w) {
          const auto ev = disc_.basis.eval_on_element(ex, ey, x, 0);
          const Eigen::Vector2d t = bc.traction(x);
          for (const DofEval& a : collect(ev, seg.element, cell.component))
            blk_.F(blk_.local(a.dof)) += w * a.B * t(a.f);
        });
        blk_.flush(trips_, rhs_);
      }

      for (const auto& bc : prob_.dirichlet) {
        if (!matches(bc.where, seg)) continue;
        const double gamma = prob_.gamma_N * stiff / h_;
        segment_quadrature(seg.a, seg.b, [&](const Vec2& x, double w) {
          const auto ev = disc_.basis.eval_on_element(ex, ey, x, 1);
          const auto dofs = collect(ev, seg.element, cell.component);
          const Eigen::Vector2d g = bc.value(x);
          std::vector<Eigen::Vector2d> T(dofs.size());
          for (std::size_t i = 0; i < dofs.size(); ++i) T[i] = flux_of(dofs[i], mat, seg.normal);
          for (std::size_t i = 0; i < dofs.size(); ++i) {
            const int li = blk_.local(dofs[i].dof);
            for (std::size_t j = 0; j < dofs.size(); ++j) {
              const int lj = blk_.local(dofs[j].dof);
              double k = -dofs[i].B * T[j](dofs[i].f) + T[i](dofs[j].f) * dofs[j].B;
              if (dofs[i].f == dofs[j].f) k += gamma * dofs[i].B * dofs[j].B;
              blk_.K(li, lj) += w * k;
            }
            double r = gamma * dofs[i].B * g(dofs[i].f);
            for (int f = 0; f < nf_; ++f) r += T[i](f) * g(f);
            blk_.F(li) += w * r;
          }
        });
        blk_.flush(trips_, rhs_);
      }
    }
  }

  void interface_terms() {
    for (const auto& seg : disc_.mesh.interfaces) {
      const auto& ci = disc_.mesh.cells[seg.cell_i];
      const auto& cj = disc_.mesh.cells[seg.cell_j];
      const Material& mi = prob_.materials->at(seg.mat_i);
      const Material& mj = prob_.materials->at(seg.mat_j);
      const double si = prob_.physics == Physics::Heat ? mi.kappa : mi.E;
      const double sj = prob_.physics == Physics::Heat ? mj.kappa : mj.E;
      const double ai = disc_.mesh.material_area_in_element(seg.element, seg.mat_i) / si;
      const double aj = disc_.mesh.material_area_in_element(seg.element, seg.mat_j) / sj;
      const double wI = ai / (ai + aj);
      const double wJ = aj / (ai + aj);
      const double gamma =
          2.0 * si * disc_.mesh.interface_length_in_element(seg.element, seg.mat_i, seg.mat_j) /
          (ai + aj);
      const auto [exi, eyi] = elem_xy(ci.element);
      const auto [exj, eyj] = elem_xy(cj.element);

      segment_quadrature(seg.a, seg.b, [&](const Vec2& x, double w) {
        const auto evi = disc_.basis.eval_on_element(exi, eyi, x, 1);
        const auto evj = disc_.basis.eval_on_element(exj, eyj, x, 1);
        auto dofs = collect(evi, ci.element, ci.component);
        const std::size_t ni = dofs.size();
        {
          const auto dj = collect(evj, cj.element, cj.component);
          dofs.insert(dofs.end(), dj.begin(), dj.end());
        }
        std::vector<double> sign(dofs.size()), wgt(dofs.size());
        std::vector<Eigen::Vector2d> T(dofs.size());
        for (std::size_t i = 0; i < dofs.size(); ++i) {
          const bool on_i = i < ni;
          sign[i] = on_i ? 1.0 : -1.0;
          wgt[i] = on_i ? wI : wJ;
          T[i] = flux_of(dofs[i], on_i ? mi : mj, seg.normal);
        }
        for (std::size_t i = 0; i < dofs.size(); ++i) {
          const int li = blk_.local(dofs[i].dof);
          for (std::size_t j = 0; j < dofs.size(); ++j) {
            const int lj = blk_.local(dofs[j].dof);
            double k = -sign[i] * dofs[i].B * wgt[j] * T[j](dofs[i].f) +
                       wgt[i] * T[i](dofs[j].f) * sign[j] * dofs[j].B;
            if (dofs[i].f == dofs[j].f)
              k += gamma * sign[i] * sign[j] * dofs[i].B * dofs[j].B;
            blk_.K(li, lj) += w * k;
          }
        }
      });
      blk_.flush(trips_, rhs_);
    }
  }

  void ghost_terms() {
    if (prob_.gamma_G == 0.0) return;
    for (const auto& facet : disc_.mesh.ghost_facets) {
      const auto [exp_, eyp] = elem_xy(facet.elem_plus);
      const auto [exm, eym] = elem_xy(facet.elem_minus);
      const double hn = facet.axis == 0 ? prob_.bg.hx() : prob_.bg.hy();
      for (const auto& pair : facet.pairs) {
        for (const auto& iv : pair.overlap) {
          for (const auto& q : quadrature::gauss_legendre(p_ + 1, iv.a, iv.b)) {
            const Vec2 x = facet.axis == 0 ? Vec2(facet.coord, q.x) : Vec2(q.x, facet.coord);
            const auto evp = disc_.basis.eval_on_element(exp_, eyp, x, p_);
            const auto evm = disc_.basis.eval_on_element(exm, eym, x, p_);
            for (int k = 1; k <= p_; ++k) {
              // gamma_G carries the material scale: it is chosen as a multiple
              // of E (elasticity) or kappa (heat) of the stabilized material.
              const double coef = prob_.gamma_G * std::pow(hn, 2 * (k - 1) + 1) * q.w;
              // signed k-th normal derivative of every active dof
              std::vector<std::pair<int, double>> jump;
              auto push = [&](const splines::TensorEval& ev, int e, int comp, double sgn) {
                for (int j = 0; j < ev.count; ++j) {
                  const double dv =
                      facet.axis == 0 ? ev.d[k][0][j] : ev.d[0][k][j];
                  for (int f = 0; f < nf_; ++f) {
                    const int dof = disc_.enr.dof_on(ev.ids[j], e, comp, f);
                    if (dof >= 0) jump.emplace_back(dof * 2 + f, sgn * dv);
                  }
                }
              };
              jump.reserve(2 * evp.count * nf_);
              push(evp, facet.elem_plus, pair.comp_plus, 1.0);
              push(evm, facet.elem_minus, pair.comp_minus, -1.0);
              for (const auto& [ka, va] : jump) {
                const int li = blk_.local(ka / 2);
                for (const auto& [kb, vb] : jump) {
                  if ((ka & 1) != (kb & 1)) continue;
                  blk_.K(li, blk_.local(kb / 2)) += coef * va * vb;
                }
              }
            }
          }
        }
      }
      blk_.flush(trips_, rhs_);
    }
  }
};

}  // namespace

Assembled assemble(const problem::Problem& prob, const Discretization& disc) {
  Assembler a(prob, disc);
  return a.run();
}

}  // namespace xiga::system
