#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "xiga/cutmesh.hpp"
#include "xiga/levelset.hpp"
#include "xiga/types.hpp"

namespace xiga::problem {

/// Field-valued data; heat conduction uses component 0 only.
using FieldFn = std::function<Eigen::Vector2d(const Vec2&)>;
using BodyFn = std::function<Eigen::Vector2d(const Vec2&, MaterialIndex)>;

/// Boundary selector: a box side (0 xmin, 1 xmax, 2 ymin, 3 ymax) or an
/// immersed boundary generated by one level set.
struct BoundaryRef {
  int side = -1;
  int lsf = -1;
};

struct DirichletBC {
  BoundaryRef where;
  FieldFn value;
};

struct NeumannBC {
  BoundaryRef where;
  FieldFn traction;  // traction vector / inward heat flux
};

struct Problem {
  Physics physics = Physics::Heat;
  cutmesh::BackgroundMesh bg;
  int degree = 1;
  int refinement = 0;  // integration-grid levels per element
  std::vector<std::shared_ptr<const geometry::LevelSet>> levelsets;
  std::shared_ptr<const geometry::PhaseMap> phase_map;
  std::shared_ptr<const geometry::MaterialTable> materials;
  double gamma_N = 100.0;  // Nitsche penalty multiple of E/h (kappa/h)
  double gamma_G = 0.0;    // ghost penalty multiple of E (kappa)
  std::vector<DirichletBC> dirichlet;
  std::vector<NeumannBC> neumann;
  BodyFn body_load;  // may be empty

  int num_fields() const { return field_components(physics); }
};

}  // namespace xiga::problem
