#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace xiga {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Material index 0 is reserved for void.
using MaterialIndex = int;

struct Material {
  double E = 0.0;      // Young's modulus
  double nu = 0.0;     // Poisson ratio
  double kappa = 0.0;  // thermal conductivity
};

enum class Physics { Heat, Elasticity };

inline int field_components(Physics ph) { return ph == Physics::Heat ? 1 : 2; }

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace xiga
