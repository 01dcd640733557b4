#include "xiga/studies.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "xiga/verification.hpp"

namespace xiga::studies {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

using geometry::LevelSet;
using geometry::MaterialTable;
using geometry::PhaseMap;
using geometry::PlaneLevelSet;
using problem::Problem;
using verification::BarLoad;
using verification::ExactField;

std::shared_ptr<const LevelSet> plane(const Vec2& n, double c) {
  return std::make_shared<PlaneLevelSet>(n, c);
}

RunRecord record_for(const std::string& study, const Problem& prob, const Solved& s) {
  RunRecord r;
  r.study = study;
  r.p = prob.degree;
  r.h = prob.bg.h();
  r.gamma_N = prob.gamma_N;
  r.gamma_G = prob.gamma_G;
  r.dofs = s.disc->enr.num_dofs();
  r.residual = s.residual;
  return r;
}

// ------------------------------------------------------------------ sliver
constexpr double kBarE = 10.0;
constexpr double kTraction = 5.0;
constexpr double kBodyB0 = 2.0;

double load_magnitude(BarLoad load) { return load == BarLoad::Traction ? kTraction : kBodyB0; }

// Axial load per unit length at local coordinate x0 (zero for Traction).
double body_intensity(BarLoad load, double x0) {
  switch (load) {
    case BarLoad::Traction: return 0.0;
    case BarLoad::ConstantBody: return kBodyB0;
    case BarLoad::LinearBody: return kBodyB0 * x0;
    case BarLoad::QuadraticBody: return kBodyB0 * x0 * x0;
  }
  return 0.0;
}

problem::FieldFn zero_field() {
  return [](const Vec2&) { return Eigen::Vector2d::Zero().eval(); };
}

// Axial bar body load mapped into the plane: per-area force f(x0)/A e0.
problem::BodyFn bar_body(BarLoad load, double A, const Vec2& anchor, double angle_rad) {
  const Vec2 e0(std::cos(angle_rad), std::sin(angle_rad));
  return [=](const Vec2& x, MaterialIndex m) -> Eigen::Vector2d {
    if (m == 0) return Eigen::Vector2d::Zero();
    return body_intensity(load, (x - anchor).dot(e0)) / A * e0;
  };
}

// ----------------------------------------------------------- rotated bar
constexpr double kBarLen = 1.0;
constexpr double kBarWidth = 0.5;
constexpr double kBarArea = 0.25;
const Vec2 kBarAnchor(0.51, 0.37);

// ---------------------------------------------------------------- junction
const Vec2 kJunctionAnchor(0.015, 0.015);
const Vec2 kJunctionCenter(0.515, 0.265);

/// T-junction branch: zero line y = c for x > s only.
class TBranchLevelSet : public LevelSet {
 public:
  TBranchLevelSet(double split_x, double branch_y) : s_(split_x), c_(branch_y) {}
  double value(const Vec2& x) const override { return std::max(x.y() - c_, s_ - x.x()); }

 private:
  double s_, c_;
};

// --------------------------------------------------------------- inclusion
constexpr double kInclRadius = 0.5;
constexpr double kInclKIn = 1.0;
constexpr double kInclKOut = 0.125;
constexpr double kInclSource = 1.0;
constexpr double kInclTheta0 = 0.375;

std::shared_ptr<const MaterialTable> heat_materials(const std::vector<double>& kappas) {
  std::vector<Material> mats{{}};
  for (double k : kappas) mats.push_back({1.0, 0.0, k});
  return std::make_shared<MaterialTable>(std::move(mats));
}

std::shared_ptr<const MaterialTable> bar_materials() {
  return std::make_shared<MaterialTable>(std::vector<Material>{{}, {kBarE, 0.0, 1.0}});
}

}  // namespace

Solved solve_problem(const Problem& prob) {
  Solved s;
  s.disc = std::make_shared<system::Discretization>(system::discretize(prob));
  const system::Assembled sys = system::assemble(prob, *s.disc);
  s.u = system::solve(sys, &s.residual);
  return s;
}

// ======================================================= sliver bar study

Problem sliver_problem(BarLoad load, double delta, int p, double gamma_G) {
  Problem prob;
  prob.physics = Physics::Elasticity;
  prob.bg = {Vec2(0, 0), Vec2(4, 1), 4, 1};
  prob.degree = p;
  prob.levelsets = {plane(Vec2(1, 0), 3.0 + delta)};
  prob.phase_map = std::make_shared<PhaseMap>(1, std::vector<MaterialIndex>{1, 0});
  prob.materials = bar_materials();
  prob.gamma_N = 100.0;
  prob.gamma_G = gamma_G;
  prob.dirichlet = {{problem::BoundaryRef{0, -1}, zero_field()}};
  if (load == BarLoad::Traction)
    prob.neumann = {{problem::BoundaryRef{-1, 0},
                     [](const Vec2&) { return Eigen::Vector2d(kTraction, 0.0); }}};
  else
    prob.body_load = bar_body(load, 1.0, Vec2(0, 0), 0.0);
  return prob;
}

ExactField sliver_exact(BarLoad load, double delta) {
  return verification::bar_solution(load, load_magnitude(load), kBarE, 1.0, 3.0 + delta,
                                    Vec2(0, 0), 0.0);
}

RunRecord sliver_case(BarLoad load, double delta, int p, double gamma_G, bool with_cond) {
  const Problem prob = sliver_problem(load, delta, p, gamma_G);
  const Solved s = solve_problem(prob);
  RunRecord r = record_for("sliver", prob, s);
  const char* names[] = {"traction", "const-body", "linear-body", "quadratic-body"};
  r.params = {{"load", names[static_cast<int>(load)]}, {"delta", num(delta)}};
  const ExactField ex = sliver_exact(load, delta);
  const auto sampler = s.sampler();
  const auto err = verification::errors_vs_exact(sampler, ex.value, ex.gradient, p + 2);
  r.l2 = err.l2;
  r.h1 = err.h1;
  if (with_cond) {
    const system::Assembled sys = system::assemble(prob, *s.disc);
    r.cond = system::condition_number_frobenius(sys.A);
  }
  return r;
}

// ===================================================== rotated bar study

Problem rotated_bar_problem(double angle_deg, double h, int p, double gamma_G) {
  const double a = angle_deg * std::numbers::pi / 180.0;
  const Vec2 e0(std::cos(a), std::sin(a)), e1(-std::sin(a), std::cos(a));
  Problem prob;
  prob.physics = Physics::Elasticity;
  const int n = static_cast<int>(std::lround(2.0 / h));
  prob.bg = {Vec2(0, 0), Vec2(2, 2), n, n};
  prob.degree = p;
  // Four half planes bounding the bar: x0 in (0, L), y0 in (0, l).
  prob.levelsets = {plane(-e0, -kBarAnchor.dot(e0)),
                    plane(e0, kBarAnchor.dot(e0) + kBarLen),
                    plane(-e1, -kBarAnchor.dot(e1)),
                    plane(e1, kBarAnchor.dot(e1) + kBarWidth)};
  std::vector<MaterialIndex> map(16, 0);
  map[0] = 1;
  prob.phase_map = std::make_shared<PhaseMap>(4, std::move(map));
  prob.materials = bar_materials();
  prob.gamma_N = 100.0;
  prob.gamma_G = gamma_G;
  prob.dirichlet = {{problem::BoundaryRef{-1, 0}, zero_field()}};
  prob.body_load = bar_body(BarLoad::QuadraticBody, kBarArea, kBarAnchor, a);
  return prob;
}

ExactField rotated_bar_exact(double angle_deg) {
  return verification::bar_solution(BarLoad::QuadraticBody, kBodyB0, kBarE, kBarArea, kBarLen,
                                    kBarAnchor, angle_deg * std::numbers::pi / 180.0);
}

RunRecord rotated_bar_case(double angle_deg, double h, int p, double gamma_G) {
  const Problem prob = rotated_bar_problem(angle_deg, h, p, gamma_G);
  const Solved s = solve_problem(prob);
  RunRecord r = record_for("rotated-bar", prob, s);
  r.h = h;
  r.params = {{"angle", num(angle_deg)}};
  const ExactField ex = rotated_bar_exact(angle_deg);
  const auto sampler = s.sampler();
  const auto err = verification::errors_vs_exact(sampler, ex.value, ex.gradient, p + 2);
  r.l2 = err.l2;
  r.h1 = err.h1;
  return r;
}

// ======================================================== junction study

Problem junction_problem(int config, double h, int p) {
  if (config < 0 || config > 4) throw ArgumentError("junction: config must be in 0..4");
  Problem prob;
  prob.physics = Physics::Elasticity;
  const int nx = static_cast<int>(std::lround(2.0 / h));
  const int ny = static_cast<int>(std::lround(1.5 / h));
  prob.bg = {Vec2(-0.5, -0.5), Vec2(1.5, 1.0), nx, ny};
  prob.degree = p;
  const Vec2 c = kJunctionCenter;
  prob.levelsets = {plane(Vec2(-1, 0), -kJunctionAnchor.x()),
                    plane(Vec2(1, 0), kJunctionAnchor.x() + kBarLen),
                    plane(Vec2(0, -1), -kJunctionAnchor.y()),
                    plane(Vec2(0, 1), kJunctionAnchor.y() + kBarWidth)};
  switch (config) {
    case 0:
      break;
    case 1:
      prob.levelsets.push_back(plane(Vec2(1, 0), c.x()));
      break;
    case 2:
      prob.levelsets.push_back(plane(Vec2(1, 0), c.x()));
      prob.levelsets.push_back(std::make_shared<TBranchLevelSet>(c.x(), c.y()));
      break;
    case 3:
      prob.levelsets.push_back(plane(Vec2(1, 0), c.x()));
      prob.levelsets.push_back(plane(Vec2(0, 1), c.y()));
      break;
    case 4: {
      const double s = std::numbers::sqrt2 / 2;
      prob.levelsets.push_back(plane(Vec2(s, s), Vec2(s, s).dot(c)));
      prob.levelsets.push_back(plane(Vec2(-s, s), Vec2(-s, s).dot(c)));
      break;
    }
  }
  const int nlsf = static_cast<int>(prob.levelsets.size());
  std::vector<MaterialIndex> map(1 << nlsf, 0);
  // Every phase inside the four bar faces is the bar material.
  for (int ph = 0; ph < (1 << nlsf); ++ph)
    if ((ph & 0xf) == 0) map[ph] = 1;
  prob.phase_map = std::make_shared<PhaseMap>(nlsf, std::move(map));
  prob.materials = bar_materials();
  prob.gamma_N = 100.0;
  prob.gamma_G = 1e-3;
  prob.dirichlet = {{problem::BoundaryRef{-1, 0}, zero_field()}};
  prob.body_load = bar_body(BarLoad::QuadraticBody, kBarArea, kJunctionAnchor, 0.0);
  return prob;
}

RunRecord junction_case(int config, double h, int p) {
  const Problem prob = junction_problem(config, h, p);
  const Solved s = solve_problem(prob);
  RunRecord r = record_for("junction", prob, s);
  r.h = h;
  r.params = {{"config", std::to_string(config)}};
  const ExactField ex = verification::bar_solution(BarLoad::QuadraticBody, kBodyB0, kBarE,
                                                   kBarArea, kBarLen, kJunctionAnchor, 0.0);
  const auto sampler = s.sampler();
  const auto err = verification::errors_vs_exact(sampler, ex.value, ex.gradient, p + 2);
  r.l2 = err.l2;
  r.h1 = err.h1;
  return r;
}

// ======================================================= inclusion study

Problem inclusion_problem(double h, double h_int, int p) {
  Problem prob;
  prob.physics = Physics::Heat;
  const int n = static_cast<int>(std::lround(2.0 / h));
  prob.bg = {Vec2(-1, -1), Vec2(1, 1), n, n};
  prob.degree = p;
  prob.refinement = std::max(0, static_cast<int>(std::lround(std::log2(h / h_int))));
  prob.levelsets = {std::make_shared<geometry::CircleLevelSet>(Vec2(0, 0), kInclRadius)};
  prob.phase_map = std::make_shared<PhaseMap>(1, std::vector<MaterialIndex>{1, 2});
  prob.materials = heat_materials({kInclKIn, kInclKOut});
  prob.gamma_N = 100.0;
  prob.gamma_G = 1e-3;
  const ExactField ex =
      verification::cylinder_solution(kInclRadius, kInclKIn, kInclKOut, kInclSource, kInclTheta0);
  for (int side = 0; side < 4; ++side)
    prob.dirichlet.push_back({problem::BoundaryRef{side, -1}, ex.value});
  prob.body_load = [](const Vec2&, MaterialIndex m) -> Eigen::Vector2d {
    return {m == 1 ? kInclSource : 0.0, 0.0};
  };
  return prob;
}

RunRecord inclusion_case(double h, double h_int, int p) {
  const Problem prob = inclusion_problem(h, h_int, p);
  const Solved s = solve_problem(prob);
  RunRecord r = record_for("inclusion", prob, s);
  r.h = h;
  r.h_int = h_int;
  const ExactField ex =
      verification::cylinder_solution(kInclRadius, kInclKIn, kInclKOut, kInclSource, kInclTheta0);
  const auto sampler = s.sampler();
  const auto err = verification::errors_vs_exact(sampler, ex.value, ex.gradient, p + 2);
  r.l2 = err.l2;
  r.h1 = err.h1;
  r.e_geo = verification::geometric_error(s.disc->mesh, 1,
                                          std::numbers::pi * kInclRadius * kInclRadius);
  return r;
}

// ================================================== multi-material study

Problem multimaterial_problem(const std::string& preset, double h, int p) {
  Problem prob;
  prob.physics = Physics::Heat;
  const int n = static_cast<int>(std::lround(2.0 / h));
  prob.bg = {Vec2(-1, -1), Vec2(1, 1), n, n};
  prob.degree = p;
  prob.levelsets = {plane(Vec2(1, 0), 0.0), plane(Vec2(0, 1), 0.0),
                    std::make_shared<geometry::SlabLevelSet>(Vec2(1, 0), 0.0, 0.25),
                    std::make_shared<geometry::SlabLevelSet>(Vec2(0, 1), 0.0, 0.25)};
  // Phase bits: f0 = x > 0, f1 = y > 0, f2 = |x| > 1/4, f3 = |y| > 1/4.
  std::vector<MaterialIndex> map(16, -1);
  std::vector<double> kappas;
  if (preset == "single") {
    std::fill(map.begin(), map.end(), 1);
    kappas = {1.0};
  } else if (preset == "five") {
    kappas = {1.0, 0.125, 0.25, 0.375, 0.5};
    for (int ph = 0; ph < 16; ++ph) {
      const int q = ph & 3;
      map[ph] = (ph & 0xc) == 0 ? 1 : 2 + q;
    }
  } else if (preset == "thirteen") {
    kappas = {1.0};
    for (int q = 0; q < 4; ++q)
      for (int t = 0; t < 3; ++t) kappas.push_back(0.125 * (q + 1));
    for (int ph = 0; ph < 16; ++ph) {
      const int q = ph & 3;
      switch (ph & 0xc) {
        case 0x0: map[ph] = 1; break;            // inclusion
        case 0x4: map[ph] = 2 + 3 * q + 0; break; // |x| > 1/4 only
        case 0x8: map[ph] = 2 + 3 * q + 1; break; // |y| > 1/4 only
        case 0xc: map[ph] = 2 + 3 * q + 2; break; // corner block
      }
    }
  } else {
    throw ArgumentError("multimaterial: unknown preset '" + preset + "'");
  }
  prob.phase_map = std::make_shared<PhaseMap>(4, std::move(map));
  prob.materials = heat_materials(kappas);
  prob.gamma_N = 50.0;
  prob.gamma_G = 1e-3;
  for (int side = 0; side < 4; ++side)
    prob.dirichlet.push_back({problem::BoundaryRef{side, -1}, zero_field()});
  prob.body_load = [](const Vec2& x, MaterialIndex) -> Eigen::Vector2d {
    return {std::sin(2 * std::numbers::pi * x.x()) * std::sin(2 * std::numbers::pi * x.y()), 0.0};
  };
  return prob;
}

Solved multimaterial_reference(const std::string& preset, int p, const std::string& cache_dir) {
  const double href = 0.015625;
  const Problem prob = multimaterial_problem(preset, href, p);
  Solved s;
  s.disc = std::make_shared<system::Discretization>(system::discretize(prob));

  const std::filesystem::path path =
      std::filesystem::path(cache_dir) / ("mm_ref_" + preset + "_p" + std::to_string(p) + ".dat");
  const int n = s.disc->enr.num_dofs();
  if (std::ifstream in(path); in) {
    int stored = 0;
    if (in >> stored; stored == n) {
      Eigen::VectorXd u(n);
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) ok = static_cast<bool>(in >> u[i]);
      if (ok) {
        s.u = std::move(u);
        return s;
      }
    }
  }
  const system::Assembled sys = system::assemble(prob, *s.disc);
  s.u = system::solve(sys, &s.residual);
  if (!cache_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    std::ofstream out(path);
    out.precision(17);
    out << n << "\n";
    for (int i = 0; i < n; ++i) out << s.u[i] << "\n";
  }
  return s;
}

RunRecord multimaterial_case(const std::string& preset, double h, int p, const Solved& ref) {
  const Problem prob = multimaterial_problem(preset, h, p);
  const Solved s = solve_problem(prob);
  RunRecord r = record_for("multimaterial", prob, s);
  r.h = h;
  r.params = {{"preset", preset}};
  const auto sampler = s.sampler();
  const auto ref_sampler = ref.sampler();
  const auto err = verification::errors_vs_reference(sampler, ref_sampler, p + 2);
  r.l2 = err.l2;
  r.h1 = err.h1;
  return r;
}

// ============================================================== drivers

namespace {

std::vector<int> or_default(std::vector<int> v, std::vector<int> def) {
  return v.empty() ? def : v;
}
std::vector<double> or_default(std::vector<double> v, std::vector<double> def) {
  return v.empty() ? def : v;
}

std::vector<RunRecord> run_sliver(const StudyOptions& opt) {
  const auto deltas = {0.001, 0.002, 0.0035, 0.005, 0.007, 0.01, 0.015, 0.025, 0.04,
                       0.06,  0.08,  0.1,    0.15,  0.25,  0.4,  0.6,   0.8,  0.9};
  const auto gammas =
      or_default(opt.gamma_gs, {0.0, 1e-9, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0});
  const auto ps = or_default(opt.ps, {1, 2, 3});
  std::vector<RunRecord> rows;
  for (double delta : deltas)
    for (double g : gammas)
      for (int p : ps) rows.push_back(sliver_case(BarLoad::Traction, delta, p, g, true));
  return rows;
}

std::vector<RunRecord> run_rotated_bar(const StudyOptions& opt) {
  const auto hs = or_default(opt.hs, {0.5, 0.25, 0.125, 0.0625});
  const auto ps = or_default(opt.ps, {1, 2, 3});
  const auto gammas = or_default(opt.gamma_gs, {1e-3});
  std::vector<RunRecord> rows;
  for (int p : ps)
    for (double h : hs)
      for (double g : gammas)
        for (int angle = 10; angle <= 80; angle += 10)
          rows.push_back(rotated_bar_case(angle, h, p, g));
  return rows;
}

std::vector<RunRecord> run_junction(const StudyOptions& opt) {
  const auto hs = or_default(opt.hs, {0.5, 0.25, 0.125, 0.0625, 0.03125});
  const auto ps = or_default(opt.ps, {1, 2, 3});
  std::vector<RunRecord> rows;
  for (int config = 1; config <= 4; ++config)
    for (double h : hs)
      for (int p : ps) rows.push_back(junction_case(config, h, p));
  return rows;
}

std::vector<RunRecord> run_inclusion(const StudyOptions& opt) {
  const auto hs = or_default(opt.hs, {0.5, 0.25, 0.125, 0.0625, 0.03125});
  const auto ps = or_default(opt.ps, {1, 2, 3});
  const std::vector<double> h_ints = {3.125e-2, 7.8125e-3, 1.953125e-3};
  std::vector<RunRecord> rows;
  for (double h_int : h_ints)
    for (double h : hs)
      for (int p : ps) rows.push_back(inclusion_case(h, h_int, p));
  return rows;
}

std::vector<RunRecord> run_multimaterial(const StudyOptions& opt) {
  const auto hs = or_default(opt.hs, {0.5, 0.25, 0.125, 0.0625, 0.03125});
  const auto ps = or_default(opt.ps, {1, 2, 3});
  std::vector<RunRecord> rows;
  for (const std::string preset : {"single", "five", "thirteen"})
    for (int p : ps) {
      const Solved ref = multimaterial_reference(preset, p, opt.cache_dir);
      for (double h : hs) rows.push_back(multimaterial_case(preset, h, p, ref));
    }
  return rows;
}

}  // namespace

std::vector<std::string> study_ids() {
  return {"sliver", "rotated-bar", "junction", "inclusion", "multimaterial"};
}

std::vector<RunRecord> run_study(const std::string& id, const StudyOptions& opt) {
  if (id == "sliver") return run_sliver(opt);
  if (id == "rotated-bar") return run_rotated_bar(opt);
  if (id == "junction") return run_junction(opt);
  if (id == "inclusion") return run_inclusion(opt);
  if (id == "multimaterial") return run_multimaterial(opt);
  std::string ids;
  for (const auto& s : study_ids()) ids += (ids.empty() ? "" : ", ") + s;
  throw ArgumentError("unknown study '" + id + "'; valid ids: " + ids);
}

std::string csv_table(const std::vector<RunRecord>& rows) {
  std::ostringstream os;
  os << "study,p,h,h_int,gamma_N,gamma_G";
  if (!rows.empty())
    for (const auto& [k, v] : rows.front().params) os << "," << k;
  os << ",dofs,L2,H1,e_geo,cond\n";
  for (const RunRecord& r : rows) {
    os << r.study << "," << r.p << "," << num(r.h) << "," << num(r.h_int) << ","
       << num(r.gamma_N) << "," << num(r.gamma_G);
    for (const auto& [k, v] : r.params) os << "," << v;
    os << "," << r.dofs << "," << num(r.l2) << "," << num(r.h1) << "," << num(r.e_geo) << ","
       << num(r.cond) << "\n";
  }
  return os.str();
}

void write_csv(const std::string& path, const std::vector<RunRecord>& rows) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path);
  out << csv_table(rows);
}

std::string rates_summary(const std::vector<RunRecord>& rows) {
  // Group rows by everything except h; fit slopes where several h appear.
  std::map<std::string, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : rows) {
    std::string key = r.study + " p=" + std::to_string(r.p);
    if (!std::isnan(r.h_int)) key += " h_int=" + num(r.h_int);
    key += " gamma_G=" + num(r.gamma_G);
    for (const auto& [k, v] : r.params)
      if (k != "angle") key += " " + k + "=" + v;
    groups[key].push_back(&r);
  }
  std::ostringstream os;
  os << "group,l2_rate,h1_rate\n";
  for (const auto& [key, group] : groups) {
    // Average duplicate h entries (e.g. the angle sweep) before fitting.
    struct Acc {
      double l2 = 0, h1 = 0;
      int count = 0;
    };
    std::map<double, Acc> by_h;
    for (const RunRecord* r : group) {
      Acc& acc = by_h[r->h];
      acc.l2 += r->l2;
      acc.h1 += r->h1;
      ++acc.count;
    }
    if (by_h.size() < 2) continue;
    std::vector<double> hs, l2s, h1s;
    for (const auto& [h, acc] : by_h) {
      hs.push_back(h);
      l2s.push_back(acc.l2 / acc.count);
      h1s.push_back(acc.h1 / acc.count);
    }
    os << key << "," << num(verification::convergence_rate(hs, l2s)) << ","
       << num(verification::convergence_rate(hs, h1s)) << "\n";
  }
  return os.str();
}

}  // namespace xiga::studies
