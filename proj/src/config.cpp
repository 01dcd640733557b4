#include "xiga/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace xiga::config {

namespace {

using nlohmann::json;
using verification::BarLoad;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ConfigError(origin + ": " + what);
}

/// Line/column of a byte offset, for anchoring parse errors.
std::pair<int, int> line_of(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

const json& get(const json& j, const char* key, const std::string& origin) {
  auto it = j.find(key);
  if (it == j.end()) fail(origin, std::string("missing key '") + key + "'");
  return *it;
}

Vec2 vec2(const json& j, const char* key, const std::string& origin) {
  const json& v = get(j, key, origin);
  if (!v.is_array() || v.size() != 2)
    fail(origin, std::string("'") + key + "' must be an array of two numbers");
  return {v[0].get<double>(), v[1].get<double>()};
}

Eigen::Vector2d field_constant(const json& v, int nf, const std::string& origin) {
  if (!v.is_array() || static_cast<int>(v.size()) != nf)
    fail(origin, "constant field value must be an array of " + std::to_string(nf) + " numbers");
  Eigen::Vector2d out = Eigen::Vector2d::Zero();
  for (int f = 0; f < nf; ++f) out[f] = v[f].get<double>();
  return out;
}

std::shared_ptr<const geometry::LevelSet> parse_levelset(const json& j,
                                                         const problem::Problem& prob,
                                                         const std::string& origin) {
  const std::string type = get(j, "type", origin).get<std::string>();
  std::shared_ptr<geometry::LevelSet> ls;
  if (type == "plane") {
    ls = std::make_shared<geometry::PlaneLevelSet>(vec2(j, "normal", origin),
                                                   get(j, "offset", origin).get<double>());
  } else if (type == "circle") {
    ls = std::make_shared<geometry::CircleLevelSet>(vec2(j, "center", origin),
                                                    get(j, "radius", origin).get<double>());
  } else if (type == "slab") {
    ls = std::make_shared<geometry::SlabLevelSet>(vec2(j, "normal", origin),
                                                  get(j, "center", origin).get<double>(),
                                                  get(j, "halfwidth", origin).get<double>());
  } else if (type == "box") {
    ls = std::make_shared<geometry::BoxLevelSet>(
        vec2(j, "center", origin), vec2(j, "halfwidth", origin),
        j.value("angle_deg", 0.0) * std::numbers::pi / 180.0);
  } else if (type == "field") {
    const json& c = get(j, "coefficients", origin);
    const json& el = get(j, "elements", origin);
    if (!el.is_array() || el.size() != 2) fail(origin, "'elements' must be [nx, ny]");
    auto basis = std::make_shared<splines::TensorBasis>(splines::TensorBasis::uniform(
        j.value("degree", 1), el[0].get<int>(), el[1].get<int>(), prob.bg.lo, prob.bg.hi));
    std::vector<double> coeffs;
    for (const json& v : c) coeffs.push_back(v.get<double>());
    ls = std::make_shared<geometry::LevelSetField>(std::move(basis), std::move(coeffs));
  } else {
    fail(origin, "unknown level-set type '" + type + "'");
  }
  ls->iso = j.value("iso", 0.0);
  return ls;
}

std::shared_ptr<const geometry::PhaseMap> parse_phases(const json& j, int num_levelsets,
                                                       int num_materials,
                                                       const std::string& origin) {
  const int n = 1 << num_levelsets;
  std::vector<MaterialIndex> map;
  if (j.is_array()) {
    if (static_cast<int>(j.size()) != n)
      fail(origin, "'phases' array must have " + std::to_string(n) + " entries");
    for (const json& v : j) map.push_back(v.get<int>());
  } else if (j.is_object()) {
    map.assign(n, j.value("default", 0));
    for (const auto& [key, val] : get(j, "map", origin).items()) {
      const int phase = std::stoi(key);
      if (phase < 0 || phase >= n) fail(origin, "phase index " + key + " out of range");
      map[phase] = val.get<int>();
    }
  } else {
    fail(origin, "'phases' must be an array or {default, map}");
  }
  for (int ph = 0; ph < n; ++ph)
    if (map[ph] < 0 || map[ph] >= num_materials)
      fail(origin, "phase " + std::to_string(ph) + " references undefined material " +
                       std::to_string(map[ph]));
  return std::make_shared<geometry::PhaseMap>(num_levelsets, std::move(map));
}

problem::BoundaryRef parse_where(const json& j, int num_levelsets, const std::string& origin) {
  problem::BoundaryRef ref;
  const bool has_side = j.contains("side"), has_lsf = j.contains("lsf");
  if (has_side == has_lsf)
    fail(origin, "boundary condition needs exactly one of 'side' or 'lsf'");
  if (has_side) {
    ref.side = j["side"].get<int>();
    if (ref.side < 0 || ref.side > 3) fail(origin, "'side' must be in 0..3");
  } else {
    ref.lsf = j["lsf"].get<int>();
    if (ref.lsf < 0 || ref.lsf >= num_levelsets) fail(origin, "'lsf' out of range");
  }
  return ref;
}

verification::ExactField parse_reference(const json& j, const std::string& origin) {
  const std::string type = get(j, "type", origin).get<std::string>();
  if (type == "bar") {
    const std::string load = get(j, "load", origin).get<std::string>();
    BarLoad bl;
    if (load == "traction")
      bl = BarLoad::Traction;
    else if (load == "constant-body")
      bl = BarLoad::ConstantBody;
    else if (load == "linear-body")
      bl = BarLoad::LinearBody;
    else if (load == "quadratic-body")
      bl = BarLoad::QuadraticBody;
    else
      fail(origin, "unknown bar load '" + load + "'");
    return verification::bar_solution(
        bl, get(j, "magnitude", origin).get<double>(), get(j, "E", origin).get<double>(),
        get(j, "A", origin).get<double>(), get(j, "L", origin).get<double>(),
        j.contains("anchor") ? vec2(j, "anchor", origin) : Vec2(0, 0),
        j.value("angle_deg", 0.0) * std::numbers::pi / 180.0);
  }
  if (type == "cylinder") {
    return verification::cylinder_solution(
        get(j, "radius", origin).get<double>(), get(j, "k_in", origin).get<double>(),
        get(j, "k_out", origin).get<double>(), get(j, "source", origin).get<double>(),
        get(j, "theta0", origin).get<double>());
  }
  fail(origin, "unknown reference type '" + type + "'");
}

problem::BodyFn parse_body_load(const json& j, const RunConfig& cfg, int nf,
                                const std::string& origin) {
  const std::string type = get(j, "type", origin).get<std::string>();
  if (type == "constant") {
    const Eigen::Vector2d b = field_constant(get(j, "value", origin), nf, origin);
    return [b](const Vec2&, MaterialIndex) { return b; };
  }
  if (type == "per-material") {
    std::vector<Eigen::Vector2d> values(cfg.problem.materials->size(),
                                        Eigen::Vector2d::Zero());
    for (const auto& [key, val] : get(j, "values", origin).items()) {
      const int m = std::stoi(key);
      if (m <= 0 || m >= cfg.problem.materials->size())
        fail(origin, "body load names undefined material " + key);
      values[m] = field_constant(val, nf, origin);
    }
    return [values](const Vec2&, MaterialIndex m) { return values[m]; };
  }
  if (type == "axial") {
    // Per-area force f(x0)/A e0 of the 1D bar loads.
    const double b0 = get(j, "b0", origin).get<double>();
    const double A = get(j, "A", origin).get<double>();
    const int power = get(j, "power", origin).get<int>();  // f = b0 x0^power
    if (power < 0 || power > 2) fail(origin, "'power' must be 0, 1 or 2");
    const Vec2 anchor = j.contains("anchor") ? vec2(j, "anchor", origin) : Vec2(0, 0);
    const double a = j.value("angle_deg", 0.0) * std::numbers::pi / 180.0;
    const Vec2 e0(std::cos(a), std::sin(a));
    return [=](const Vec2& x, MaterialIndex m) -> Eigen::Vector2d {
      if (m == 0) return Eigen::Vector2d::Zero();
      return b0 * std::pow((x - anchor).dot(e0), power) / A * e0;
    };
  }
  if (type == "sine-product") {
    const double amp = j.value("amplitude", 1.0);
    return [amp](const Vec2& x, MaterialIndex) -> Eigen::Vector2d {
      return {amp * std::sin(2 * std::numbers::pi * x.x()) *
                  std::sin(2 * std::numbers::pi * x.y()),
              0.0};
    };
  }
  fail(origin, "unknown body load type '" + type + "'");
}

problem::FieldFn parse_value(const json& j, const RunConfig& cfg, int nf,
                             const std::string& origin) {
  if (j.is_string() && j.get<std::string>() == "reference") {
    if (!cfg.has_reference) fail(origin, "value 'reference' needs a configured reference");
    return cfg.reference.value;
  }
  const Eigen::Vector2d v = field_constant(j, nf, origin);
  return [v](const Vec2&) { return v; };
}

}  // namespace

RunConfig parse(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_of(text, e.byte);
    fail(origin + ":" + std::to_string(line) + ":" + std::to_string(col), e.what());
  }

  RunConfig cfg;
  cfg.name = j.value("name", "run");
  problem::Problem& prob = cfg.problem;

  const std::string physics = get(j, "physics", origin).get<std::string>();
  if (physics == "heat")
    prob.physics = Physics::Heat;
  else if (physics == "elasticity")
    prob.physics = Physics::Elasticity;
  else
    fail(origin, "unknown physics '" + physics + "'");
  const int nf = prob.num_fields();

  const json& dom = get(j, "domain", origin);
  prob.bg.lo = vec2(dom, "lo", origin);
  prob.bg.hi = vec2(dom, "hi", origin);
  const json& el = get(dom, "elements", origin);
  if (!el.is_array() || el.size() != 2) fail(origin, "'domain.elements' must be [nx, ny]");
  prob.bg.nx = el[0].get<int>();
  prob.bg.ny = el[1].get<int>();
  if (prob.bg.nx < 1 || prob.bg.ny < 1) fail(origin, "element counts must be >= 1");
  if (!(prob.bg.lo.x() < prob.bg.hi.x() && prob.bg.lo.y() < prob.bg.hi.y()))
    fail(origin, "'domain.lo' must be below 'domain.hi'");

  prob.degree = j.value("degree", 1);
  if (prob.degree < 1 || prob.degree > 3) fail(origin, "'degree' must be 1, 2 or 3");
  prob.refinement = j.value("refinement", 0);
  if (prob.refinement < 0) fail(origin, "'refinement' must be >= 0");
  prob.gamma_N = j.value("gamma_N", 100.0);
  prob.gamma_G = j.value("gamma_G", 0.0);

  std::vector<Material> mats{{}};
  for (const json& m : get(j, "materials", origin))
    mats.push_back({m.value("E", 1.0), m.value("nu", 0.0), m.value("kappa", 1.0)});
  prob.materials = std::make_shared<geometry::MaterialTable>(std::move(mats));

  if (j.contains("levelsets"))
    for (const json& ls : j["levelsets"])
      prob.levelsets.push_back(parse_levelset(ls, prob, origin));
  prob.phase_map =
      parse_phases(get(j, "phases", origin), static_cast<int>(prob.levelsets.size()),
                   prob.materials->size(), origin);

  if (j.contains("reference")) {
    cfg.reference = parse_reference(j["reference"], origin);
    cfg.has_reference = true;
  }

  const int nlsf = static_cast<int>(prob.levelsets.size());
  if (j.contains("dirichlet"))
    for (const json& bc : j["dirichlet"])
      prob.dirichlet.push_back({parse_where(bc, nlsf, origin),
                                parse_value(get(bc, "value", origin), cfg, nf, origin)});
  if (j.contains("neumann"))
    for (const json& bc : j["neumann"])
      prob.neumann.push_back({parse_where(bc, nlsf, origin),
                              parse_value(get(bc, "value", origin), cfg, nf, origin)});
  if (j.contains("body_load")) prob.body_load = parse_body_load(j["body_load"], cfg, nf, origin);

  if (j.contains("outputs")) {
    const json& o = j["outputs"];
    cfg.outputs.field_vtk = o.value("field_vtk", true);
    cfg.outputs.mesh_vtk = o.value("mesh_vtk", false);
    cfg.outputs.matrix = o.value("matrix", false);
    cfg.outputs.level_histogram = o.value("level_histogram", false);
  }
  return cfg;
}

RunConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

}  // namespace xiga::config
