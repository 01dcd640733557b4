#pragma once

#include <string>

#include "xiga/problem.hpp"
#include "xiga/verification.hpp"

namespace xiga::config {

/// Output toggles of a single run.
struct OutputSelection {
  bool field_vtk = true;       // solution sampled on the integration cells
  bool mesh_vtk = false;       // integration cells + interface polylines
  bool matrix = false;         // Matrix Market dump of the system matrix
  bool level_histogram = false;  // per-basis enrichment level counts
};

/// A fully parsed problem instance; `reference` is set when the
/// configuration names a closed-form solution to report errors against.
struct RunConfig {
  std::string name = "run";
  problem::Problem problem;
  bool has_reference = false;
  verification::ExactField reference;
  OutputSelection outputs;
};

/// Parses a JSON document (see docs/config.md for the schema). Parse errors
/// carry the line and column; semantic errors name the offending key.
RunConfig parse(const std::string& text, const std::string& origin);
RunConfig load(const std::string& path);

}  // namespace xiga::config
