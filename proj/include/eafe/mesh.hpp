#ifndef EAFE_MESH_HPP
#define EAFE_MESH_HPP

#include "eafe/types.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace eafe {

enum class BoundaryTag { Dirichlet, NeumannIn, NeumannOut };

std::string to_string(BoundaryTag tag);
BoundaryTag boundary_tag_from_string(const std::string& word);

struct BoundaryFace {
  std::array<Index, 3> v{{-1, -1, -1}};  // dim entries used, sorted ascending
  BoundaryTag tag = BoundaryTag::Dirichlet;
};

/// Conforming simplicial mesh: triangles (dim = 2) or tetrahedra (dim = 3).
///
/// Validated on construction via make_mesh / generate_structured / read_mesh:
/// indices in range, cells canonically oriented (positive signed measure,
/// vertex sets untouched), no degenerate cells, and boundary_faces covering
/// the topological boundary exactly once. Immutable afterwards; concurrent
/// reads are safe.
struct SimplicialMesh {
  int dim = 2;
  MatrixX vertices;                              // nv x dim
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> cells;  // nc x (dim+1)
  std::vector<BoundaryFace> boundary_faces;

  // Derived on construction.
  std::vector<Index> boundary_face_cell;  // owning cell of each boundary face
  Real bbox_diameter = 0.0;

  Index num_vertices() const { return static_cast<Index>(vertices.rows()); }
  Index num_cells() const { return static_cast<Index>(cells.rows()); }

  Point vertex(Index v) const {
    Point p(dim);
    for (int c = 0; c < dim; ++c) p(c) = vertices(v, c);
    return p;
  }

  /// Barycenter of a boundary face.
  Point face_barycenter(Index f) const;
  /// Unit outward normal of a boundary face (points away from the owning cell).
  Vector face_normal(Index f) const;
  /// Length (2D) or area (3D) of a boundary face.
  Real face_measure(Index f) const;
};

struct Box {
  Point lo, hi;
};

Box unit_box(int dim);

/// Validating constructor; throws MeshError on any invariant violation.
SimplicialMesh make_mesh(int dim, MatrixX vertices,
                         Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> cells,
                         const std::vector<BoundaryFace>& boundary_faces);

/// Structured mesh of a box: n x n squares split in two triangles each
/// (dim = 2), or n x n x n cubes split in six tetrahedra each (dim = 3).
/// All boundary faces tagged Dirichlet.
SimplicialMesh generate_structured(int dim, int n, const Box& domain);
SimplicialMesh generate_structured(int dim, int n);

/// Returns a copy with boundary tags replaced by rule(barycenter, outward unit
/// normal). Coverage is untouched, so the result needs no revalidation.
SimplicialMesh retag_boundary(
    const SimplicialMesh& mesh,
    const std::function<BoundaryTag(const Point&, const Vector&)>& rule);

/// Tags faces NeumannIn where b.n > 0 at the barycenter and NeumannOut
/// otherwise (b.n <= 0 counts as outflow).
SimplicialMesh retag_by_velocity(const SimplicialMesh& mesh,
                                 const std::function<Vector(const Point&)>& b);

/// Faces whose tag disagrees with the sign of b.n at the barycenter
/// (NeumannIn needs b.n > 0, NeumannOut needs b.n <= 0). Dirichlet faces
/// are never reported. Opt-in check; an empty result means consistent tags.
std::vector<Index> inconsistent_boundary_tags(
    const SimplicialMesh& mesh, const std::function<Vector(const Point&)>& b);

/// Per-element geometry: measure, barycentric coordinate gradients and the
/// local edge list (all vertex pairs i < j in local order, tau = q_i - q_j).
struct ElementGeometry {
  Index cell = -1;
  int dim = 2;
  std::array<Index, 4> vertex_ids{{-1, -1, -1, -1}};
  Real measure = 0.0;
  GradMatrix grad_lambda;  // dim x (dim+1), column k = grad of lambda_k
  GradMatrix corners;      // dim x (dim+1), column k = coordinates of q_k

  struct Edge {
    int i, j;    // local indices, i < j
    Vector tau;  // q_i - q_j
  };
  std::vector<Edge> edges;

  int num_local_vertices() const { return dim + 1; }
  Point corner_point(int k) const { return corners.col(k); }
};

/// Geometry from raw corner coordinates (dim+1 points of length dim).
/// Throws DegenerateElementError when the measure falls below
/// 1e-14 * scale^dim, with scale the bounding box diameter of the points
/// (or of the whole mesh for the mesh-level overload).
ElementGeometry element_geometry_from_points(int dim, const std::vector<Point>& corners,
                                             Real scale_hint = 0.0);
ElementGeometry element_geometry(const SimplicialMesh& mesh, Index cell);

/// Undirected edges of the mesh with element adjacency. Edges are stored as
/// (a, b) with a < b in global numbering and listed in lexicographic order;
/// the global orientation convention is tau = q_b - q_a and
/// delta(phi) = phi(b) - phi(a).
struct MeshEdge {
  Index a, b;
  std::vector<Index> cells;
};

std::vector<MeshEdge> edge_list(const SimplicialMesh& mesh);

/// Largest element diameter (the usual mesh parameter h).
Real max_element_diameter(const SimplicialMesh& mesh);

/// Text format, whitespace separated:
///   line 1: dim nv nc nbf
///   nv lines: dim vertex coordinates
///   nc lines: dim+1 one-based vertex indices
///   nbf lines: dim one-based vertex indices, then a tag word
///              (dirichlet | neumann_in | neumann_out)
/// Coordinates are written as shortest round-trip decimals, so
/// read(write(mesh)) reproduces the mesh exactly.
SimplicialMesh read_mesh(std::istream& in, const std::string& source_name = "<stream>");
SimplicialMesh read_mesh(const std::string& path);
void write_mesh(const SimplicialMesh& mesh, std::ostream& out);
void write_mesh(const SimplicialMesh& mesh, const std::string& path);

}  // namespace eafe

#endif
