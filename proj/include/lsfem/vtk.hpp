#pragma once

#include <string>

#include "lsfem/mesh.hpp"
#include "lsfem/space.hpp"

namespace lsfem {

/// Legacy ASCII unstructured-grid export (POINTS / CELLS / CELL_TYPES).
void write_vtk(const MeshPtr& mesh, const std::string& path);

/// Mesh plus one scalar POINT_DATA field. Degree-2 functions are resampled
/// on a once-refined visualization mesh so every dof becomes a vertex.
void write_vtk(const FeFunction& u, const std::string& field_name, const std::string& path);

}  // namespace lsfem
