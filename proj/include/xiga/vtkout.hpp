#pragma once

#include <string>

#include "xiga/cutmesh.hpp"
#include "xiga/enrichment.hpp"
#include "xiga/solution.hpp"

namespace xiga::vtkout {

/// Integration cells as a legacy-ASCII unstructured grid with material,
/// phase and element indices as cell data.
void write_cells(const std::string& path, const cutmesh::CutMesh& mesh);

/// Interface segments as legacy-ASCII polydata lines.
void write_interfaces(const std::string& path, const cutmesh::CutMesh& mesh);

/// Solution sampled at the vertices of the non-void integration cells.
void write_field(const std::string& path, const solution::FieldSampler& u);

/// Per-basis enrichment level counts as CSV (basis, levels, dropped).
void write_level_histogram(const std::string& path, const enrichment::Enrichment& enr);

}  // namespace xiga::vtkout
