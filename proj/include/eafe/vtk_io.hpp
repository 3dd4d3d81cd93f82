#ifndef EAFE_VTK_IO_HPP
#define EAFE_VTK_IO_HPP

#include "eafe/mesh.hpp"
#include "eafe/types.hpp"

#include <iosfwd>
#include <string>

namespace eafe {

/// Legacy ASCII unstructured-grid writer (DataFile version 3.0) with one
/// point-data scalar named "u". 2D points are padded with z = 0; cell types
/// are 5 (triangle) and 10 (tetrahedron). Output is deterministic.
void write_vtk(const SimplicialMesh& mesh, const VectorX& u, std::ostream& out,
               const std::string& title = "eafe solution");
void write_vtk(const SimplicialMesh& mesh, const VectorX& u, const std::string& path,
               const std::string& title = "eafe solution");

}  // namespace eafe

#endif
