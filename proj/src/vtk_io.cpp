#include "eafe/vtk_io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

namespace eafe {

namespace {

std::string fmt(Real x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_vtk(const SimplicialMesh& mesh, const VectorX& u, std::ostream& out,
               const std::string& title) {
  if (u.size() != mesh.num_vertices()) throw Error("write_vtk: field length mismatch");

  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    out << fmt(mesh.vertices(v, 0)) << ' ' << fmt(mesh.vertices(v, 1)) << ' '
        << (mesh.dim == 3 ? fmt(mesh.vertices(v, 2)) : "0") << '\n';
  }
  const int nv_cell = mesh.dim + 1;
  out << "CELLS " << mesh.num_cells() << ' ' << mesh.num_cells() * (nv_cell + 1) << '\n';
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    out << nv_cell;
    for (int k = 0; k < nv_cell; ++k) out << ' ' << mesh.cells(c, k);
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  const int cell_type = mesh.dim == 2 ? 5 : 10;
  for (Index c = 0; c < mesh.num_cells(); ++c) out << cell_type << '\n';
  out << "POINT_DATA " << mesh.num_vertices() << "\nSCALARS u double 1\nLOOKUP_TABLE default\n";
  for (Index v = 0; v < mesh.num_vertices(); ++v) out << fmt(u(v)) << '\n';
}

void write_vtk(const SimplicialMesh& mesh, const VectorX& u, const std::string& path,
               const std::string& title) {
  std::ofstream out(path);
  if (!out) throw Error("write_vtk: cannot open '" + path + "' for writing");
  write_vtk(mesh, u, out, title);
}

}  // namespace eafe
