#include "xiga/vtkout.hpp"

#include <fstream>

namespace xiga::vtkout {

namespace {

std::ofstream open(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path);
  out.precision(17);
  return out;
}

void header(std::ofstream& out, const char* title, const char* dataset) {
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET " << dataset << "\n";
}

/// Emit points and connectivity of all cells passing `keep`; points are
/// duplicated per cell so discontinuous fields stay sharp at interfaces.
template <typename Keep>
int write_cell_geometry(std::ofstream& out, const cutmesh::CutMesh& mesh, Keep keep) {
  int npts = 0, ncells = 0;
  for (const auto& cell : mesh.cells)
    if (keep(cell)) {
      npts += cell.nv;
      ++ncells;
    }
  out << "POINTS " << npts << " double\n";
  for (const auto& cell : mesh.cells)
    if (keep(cell))
      for (int i = 0; i < cell.nv; ++i)
        out << cell.v[i].x() << " " << cell.v[i].y() << " 0\n";
  out << "CELLS " << ncells << " " << ncells + npts << "\n";
  int base = 0;
  for (const auto& cell : mesh.cells)
    if (keep(cell)) {
      out << cell.nv;
      for (int i = 0; i < cell.nv; ++i) out << " " << base + i;
      out << "\n";
      base += cell.nv;
    }
  out << "CELL_TYPES " << ncells << "\n";
  for (const auto& cell : mesh.cells)
    if (keep(cell)) out << (cell.nv == 3 ? 5 : 9) << "\n";  // VTK_TRIANGLE / VTK_QUAD
  return ncells;
}

}  // namespace

void write_cells(const std::string& path, const cutmesh::CutMesh& mesh) {
  std::ofstream out = open(path);
  header(out, "integration cells", "UNSTRUCTURED_GRID");
  const int ncells =
      write_cell_geometry(out, mesh, [](const cutmesh::IntegrationCell&) { return true; });
  out << "CELL_DATA " << ncells << "\n";
  out << "SCALARS material int 1\nLOOKUP_TABLE default\n";
  for (const auto& cell : mesh.cells) out << cell.material << "\n";
  out << "SCALARS phase int 1\nLOOKUP_TABLE default\n";
  for (const auto& cell : mesh.cells) out << cell.phase << "\n";
  out << "SCALARS element int 1\nLOOKUP_TABLE default\n";
  for (const auto& cell : mesh.cells) out << cell.element << "\n";
}

void write_interfaces(const std::string& path, const cutmesh::CutMesh& mesh) {
  std::ofstream out = open(path);
  header(out, "interface segments", "POLYDATA");
  const int n = static_cast<int>(mesh.interfaces.size());
  out << "POINTS " << 2 * n << " double\n";
  for (const auto& seg : mesh.interfaces)
    out << seg.a.x() << " " << seg.a.y() << " 0\n" << seg.b.x() << " " << seg.b.y() << " 0\n";
  out << "LINES " << n << " " << 3 * n << "\n";
  for (int i = 0; i < n; ++i) out << "2 " << 2 * i << " " << 2 * i + 1 << "\n";
  out << "CELL_DATA " << n << "\n";
  out << "SCALARS material_pair int 2\nLOOKUP_TABLE default\n";
  for (const auto& seg : mesh.interfaces) out << seg.mat_i << " " << seg.mat_j << "\n";
}

void write_field(const std::string& path, const solution::FieldSampler& u) {
  const cutmesh::CutMesh& mesh = u.disc().mesh;
  const int nf = u.disc().num_fields;
  std::ofstream out = open(path);
  header(out, "solution field", "UNSTRUCTURED_GRID");
  const auto keep = [](const cutmesh::IntegrationCell& c) { return c.material != 0; };
  write_cell_geometry(out, mesh, keep);
  int npts = 0;
  for (const auto& cell : mesh.cells)
    if (keep(cell)) npts += cell.nv;
  out << "POINT_DATA " << npts << "\n";
  if (nf == 1)
    out << "SCALARS theta double 1\nLOOKUP_TABLE default\n";
  else
    out << "VECTORS u double\n";
  for (const auto& cell : mesh.cells) {
    if (!keep(cell)) continue;
    for (int i = 0; i < cell.nv; ++i) {
      const Eigen::Vector2d v = u.value_on(cell.element, cell.component, cell.v[i]);
      if (nf == 1)
        out << v[0] << "\n";
      else
        out << v[0] << " " << v[1] << " 0\n";
    }
  }
}

void write_level_histogram(const std::string& path, const enrichment::Enrichment& enr) {
  std::ofstream out = open(path);
  out << "basis,levels,dropped\n";
  for (int k = 0; k < enr.num_basis(); ++k) {
    int dropped = 0;
    for (int l = 0; l < enr.num_levels(k); ++l)
      if (enr.level_dropped(k, l)) ++dropped;
    out << k << "," << enr.num_levels(k) << "," << dropped << "\n";
  }
}

}  // namespace xiga::vtkout
