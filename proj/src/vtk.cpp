#include "lsfem/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lsfem {

namespace {

void write_header_and_grid(std::ofstream& out, const SimplicialMesh& mesh) {
  out << "# vtk DataFile Version 3.0\n";
  out << "lsfem export\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";

  char buf[64];
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Vec2& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.9g %.9g 0\n", v.x, v.y);
    out << buf;
  }

  const int nloc = mesh.vertices_per_element();
  out << "CELLS " << mesh.n_elements() << " " << mesh.n_elements() * (nloc + 1) << "\n";
  for (const auto& e : mesh.elements) {
    out << nloc;
    for (int i = 0; i < nloc; ++i) out << " " << e[i];
    out << "\n";
  }

  const int cell_type = mesh.dim == 1 ? 3 : 5;  // VTK_LINE / VTK_TRIANGLE
  out << "CELL_TYPES " << mesh.n_elements() << "\n";
  for (int e = 0; e < mesh.n_elements(); ++e) out << cell_type << "\n";
}

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk: cannot open " + path);
  return out;
}

}  // namespace

void write_vtk(const MeshPtr& mesh, const std::string& path) {
  std::ofstream out = open_or_throw(path);
  write_header_and_grid(out, *mesh);
  if (!out.good()) throw std::runtime_error("write_vtk: write failed for " + path);
}

void write_vtk(const FeFunction& u, const std::string& field_name, const std::string& path) {
  FeFunction viz = u;
  if (u.space->degree != 1) {
    const MeshPtr fine = refine_uniform(u.space->mesh);
    viz = prolongate(u, build_space(fine, 1, {}));
  }
  const SimplicialMesh& mesh = *viz.space->mesh;

  std::ofstream out = open_or_throw(path);
  write_header_and_grid(out, mesh);

  out << "POINT_DATA " << mesh.n_vertices() << "\n";
  out << "SCALARS " << field_name << " double 1\n";
  out << "LOOKUP_TABLE default\n";
  char buf[32];
  for (int d = 0; d < mesh.n_vertices(); ++d) {
    std::snprintf(buf, sizeof(buf), "%.9g\n", viz.coefficients[d]);
    out << buf;
  }
  if (!out.good()) throw std::runtime_error("write_vtk: write failed for " + path);
}

}  // namespace lsfem
