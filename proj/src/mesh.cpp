#include "eafe/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace eafe {

namespace {

std::string format_real(Real x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

Real signed_measure(int dim, const GradMatrix& corners) {
  Matrix edges(dim, dim);
  for (int k = 0; k < dim; ++k) edges.col(k) = corners.col(k + 1) - corners.col(0);
  Real det = edges.determinant();
  Real fact = 1.0;
  for (int i = 2; i <= dim; ++i) fact *= i;
  return det / fact;
}

std::array<Index, 3> sorted_facet(std::vector<Index> v) {
  std::sort(v.begin(), v.end());
  std::array<Index, 3> out{{-1, -1, -1}};
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

// The dim facets-of-a-cell opposite each local vertex.
std::vector<std::array<Index, 3>> cell_facets(const SimplicialMesh& mesh, Index c) {
  std::vector<std::array<Index, 3>> facets;
  const int nv = mesh.dim + 1;
  for (int skip = 0; skip < nv; ++skip) {
    std::vector<Index> f;
    for (int k = 0; k < nv; ++k)
      if (k != skip) f.push_back(mesh.cells(c, k));
    facets.push_back(sorted_facet(std::move(f)));
  }
  return facets;
}

}  // namespace

std::string to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Dirichlet: return "dirichlet";
    case BoundaryTag::NeumannIn: return "neumann_in";
    case BoundaryTag::NeumannOut: return "neumann_out";
  }
  return "dirichlet";
}

BoundaryTag boundary_tag_from_string(const std::string& word) {
  if (word == "dirichlet") return BoundaryTag::Dirichlet;
  if (word == "neumann_in") return BoundaryTag::NeumannIn;
  if (word == "neumann_out") return BoundaryTag::NeumannOut;
  throw MeshError("unknown boundary tag '" + word + "'");
}

Box unit_box(int dim) {
  Box box;
  box.lo = Point::Zero(dim);
  box.hi = Point::Ones(dim);
  return box;
}

Point SimplicialMesh::face_barycenter(Index f) const {
  Point bc = Point::Zero(dim);
  for (int k = 0; k < dim; ++k) bc += vertex(boundary_faces[f].v[k]);
  return bc / dim;
}

Real SimplicialMesh::face_measure(Index f) const {
  const auto& face = boundary_faces[f];
  if (dim == 2) {
    return (vertex(face.v[1]) - vertex(face.v[0])).norm();
  }
  Eigen::Vector3d e1, e2;
  e1 = vertex(face.v[1]) - vertex(face.v[0]);
  e2 = vertex(face.v[2]) - vertex(face.v[0]);
  return 0.5 * e1.cross(e2).norm();
}

Vector SimplicialMesh::face_normal(Index f) const {
  const auto& face = boundary_faces[f];
  Vector n(dim);
  if (dim == 2) {
    const Vector t = vertex(face.v[1]) - vertex(face.v[0]);
    n(0) = t(1);
    n(1) = -t(0);
  } else {
    Eigen::Vector3d e1 = vertex(face.v[1]) - vertex(face.v[0]);
    Eigen::Vector3d e2 = vertex(face.v[2]) - vertex(face.v[0]);
    Eigen::Vector3d c = e1.cross(e2);
    for (int k = 0; k < 3; ++k) n(k) = c(k);
  }
  n.normalize();
  // Orient away from the vertex of the owning cell opposite to this face.
  const Index c = boundary_face_cell[f];
  Index opposite = -1;
  for (int k = 0; k <= dim; ++k) {
    const Index v = cells(c, k);
    if (v != face.v[0] && v != face.v[1] && (dim == 2 || v != face.v[2])) opposite = v;
  }
  const Point bc = face_barycenter(f);
  if (n.dot(bc - vertex(opposite)) < 0) n = -n;
  return n;
}

ElementGeometry element_geometry_from_points(int dim, const std::vector<Point>& corners,
                                             Real scale_hint) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("element geometry: dim must be 2 or 3");
  if (static_cast<int>(corners.size()) != dim + 1)
    throw std::invalid_argument("element geometry: need dim+1 corner points");

  ElementGeometry geom;
  geom.dim = dim;
  geom.corners.resize(dim, dim + 1);
  for (int k = 0; k <= dim; ++k) {
    geom.corners.col(k) = corners[k];
    geom.vertex_ids[static_cast<std::size_t>(k)] = k;  // local order stands in for global
  }

  Real scale = scale_hint;
  if (scale <= 0.0) {
    Point lo = corners[0], hi = corners[0];
    for (const auto& p : corners) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    scale = (hi - lo).norm();
  }

  const Real sm = signed_measure(dim, geom.corners);
  geom.measure = std::abs(sm);
  if (geom.measure <= 1e-14 * std::pow(scale, dim))
    throw DegenerateElementError("degenerate element: measure " +
                                 format_real(geom.measure) + " below threshold");

  // lambda_k(x) = a_k + g_k . x with [a; g] the inverse of the corner matrix
  // bordered by ones; columns of the inverse give the coefficients.
  MatrixX M(dim + 1, dim + 1);
  for (int k = 0; k <= dim; ++k) {
    M(k, 0) = 1.0;
    for (int c = 0; c < dim; ++c) M(k, c + 1) = geom.corners(c, k);
  }
  MatrixX coeffs = M.inverse();
  geom.grad_lambda.resize(dim, dim + 1);
  for (int k = 0; k <= dim; ++k)
    for (int c = 0; c < dim; ++c) geom.grad_lambda(c, k) = coeffs(c + 1, k);

  for (int i = 0; i <= dim; ++i)
    for (int j = i + 1; j <= dim; ++j)
      geom.edges.push_back({i, j, Vector(geom.corners.col(i) - geom.corners.col(j))});

  return geom;
}

ElementGeometry element_geometry(const SimplicialMesh& mesh, Index cell) {
  if (cell < 0 || cell >= mesh.num_cells()) throw MeshError("element_geometry: cell index out of range");
  std::vector<Point> corners;
  for (int k = 0; k <= mesh.dim; ++k) corners.push_back(mesh.vertex(mesh.cells(cell, k)));
  ElementGeometry geom = element_geometry_from_points(mesh.dim, corners, mesh.bbox_diameter);
  geom.cell = cell;
  for (int k = 0; k <= mesh.dim; ++k) geom.vertex_ids[k] = mesh.cells(cell, k);
  return geom;
}

SimplicialMesh make_mesh(int dim, MatrixX vertices,
                         Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> cells,
                         const std::vector<BoundaryFace>& boundary_faces) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("make_mesh: dim must be 2 or 3");
  if (vertices.cols() != dim) throw MeshError("make_mesh: vertex array has wrong dimension");
  if (cells.cols() != dim + 1) throw MeshError("make_mesh: cell array has wrong arity");

  SimplicialMesh mesh;
  mesh.dim = dim;
  mesh.vertices = std::move(vertices);
  mesh.cells = std::move(cells);

  const Index nv = mesh.num_vertices();
  for (Index c = 0; c < mesh.num_cells(); ++c)
    for (int k = 0; k <= dim; ++k) {
      const Index v = mesh.cells(c, k);
      if (v < 0 || v >= nv) throw MeshError("make_mesh: cell vertex index out of range");
    }
  for (const auto& f : boundary_faces)
    for (int k = 0; k < dim; ++k)
      if (f.v[k] < 0 || f.v[k] >= nv)
        throw MeshError("make_mesh: boundary face vertex index out of range");

  Point lo = mesh.vertex(0), hi = mesh.vertex(0);
  for (Index v = 1; v < nv; ++v) {
    lo = lo.cwiseMin(mesh.vertex(v));
    hi = hi.cwiseMax(mesh.vertex(v));
  }
  mesh.bbox_diameter = (hi - lo).norm();

  // Canonical orientation: sort vertex indices, then restore positive signed
  // measure by one swap. The vertex set of each cell is unchanged.
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    std::array<Index, 4> ids{{-1, -1, -1, -1}};
    for (int k = 0; k <= dim; ++k) ids[k] = mesh.cells(c, k);
    std::sort(ids.begin(), ids.begin() + dim + 1);
    GradMatrix corners(dim, dim + 1);
    for (int k = 0; k <= dim; ++k) corners.col(k) = mesh.vertex(ids[k]);
    if (signed_measure(dim, corners) < 0) std::swap(ids[dim - 1], ids[dim]);
    for (int k = 0; k <= dim; ++k) mesh.cells(c, k) = ids[k];
  }

  // Degeneracy check (throws DegenerateElementError).
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    std::vector<Point> corners;
    for (int k = 0; k <= dim; ++k) corners.push_back(mesh.vertex(mesh.cells(c, k)));
    try {
      element_geometry_from_points(dim, corners, mesh.bbox_diameter);
    } catch (const DegenerateElementError& e) {
      throw DegenerateElementError("cell " + std::to_string(c) + ": " + e.what());
    }
  }

  // Facet incidence: interior facets in exactly two cells, boundary facets in
  // one, and boundary_faces must list the count-one set exactly once each.
  std::map<std::array<Index, 3>, std::pair<int, Index>> incidence;  // facet -> (count, a cell)
  for (Index c = 0; c < mesh.num_cells(); ++c)
    for (const auto& f : cell_facets(mesh, c)) {
      auto& entry = incidence[f];
      entry.first += 1;
      entry.second = c;
      if (entry.first > 2)
        throw MeshError("make_mesh: facet shared by more than two cells");
    }

  std::map<std::array<Index, 3>, std::pair<BoundaryTag, int>> declared;  // facet -> (tag, count)
  for (const auto& f : boundary_faces) {
    std::vector<Index> ids(f.v.begin(), f.v.begin() + dim);
    auto key = sorted_facet(ids);
    auto [it, inserted] = declared.emplace(key, std::make_pair(f.tag, 1));
    if (!inserted) throw MeshError("make_mesh: boundary face listed twice");
  }

  for (const auto& [facet, entry] : incidence) {
    const bool on_hull = entry.first == 1;
    const bool tagged = declared.count(facet) > 0;
    if (on_hull && !tagged) throw MeshError("make_mesh: boundary not covered");
    if (!on_hull && tagged) throw MeshError("make_mesh: interior facet tagged as boundary");
  }

  // Store boundary faces sorted (deterministic), with owning cells.
  for (const auto& [facet, tag_count] : declared) {
    BoundaryFace face;
    face.v = facet;
    face.tag = tag_count.first;
    mesh.boundary_faces.push_back(face);
    mesh.boundary_face_cell.push_back(incidence.at(facet).second);
  }
  return mesh;
}

SimplicialMesh generate_structured(int dim, int n) { return generate_structured(dim, n, unit_box(dim)); }

SimplicialMesh generate_structured(int dim, int n, const Box& domain) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("generate_structured: dim must be 2 or 3");
  if (n < 1) throw std::invalid_argument("generate_structured: n must be >= 1");
  for (int c = 0; c < dim; ++c)
    if (!(domain.hi(c) > domain.lo(c)))
      throw std::invalid_argument("generate_structured: box sides must be positive");

  const Index m = n + 1;
  const Eigen::Index mw = m;  // widened so the count products cannot overflow
  const Eigen::Index nw = n;
  MatrixX vertices;
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> cells;

  if (dim == 2) {
    vertices.resize(mw * mw, 2);
    auto vid = [m](Index i, Index j) { return i + m * j; };
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i < m; ++i) {
        vertices(vid(i, j), 0) = domain.lo(0) + (domain.hi(0) - domain.lo(0)) * Real(i) / n;
        vertices(vid(i, j), 1) = domain.lo(1) + (domain.hi(1) - domain.lo(1)) * Real(j) / n;
      }
    cells.resize(2 * nw * nw, 3);
    Index c = 0;
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const Index v00 = vid(i, j), v10 = vid(i + 1, j);
        const Index v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
        cells(c, 0) = v00; cells(c, 1) = v10; cells(c, 2) = v11; ++c;
        cells(c, 0) = v00; cells(c, 1) = v11; cells(c, 2) = v01; ++c;
      }
  } else {
    vertices.resize(mw * mw * mw, 3);
    auto vid = [m](Index i, Index j, Index k) { return i + m * (j + m * k); };
    for (Index k = 0; k < m; ++k)
      for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < m; ++i) {
          const Index v = vid(i, j, k);
          vertices(v, 0) = domain.lo(0) + (domain.hi(0) - domain.lo(0)) * Real(i) / n;
          vertices(v, 1) = domain.lo(1) + (domain.hi(1) - domain.lo(1)) * Real(j) / n;
          vertices(v, 2) = domain.lo(2) + (domain.hi(2) - domain.lo(2)) * Real(k) / n;
        }
    // Kuhn split: each cube into six tetrahedra along monotone lattice paths
    // from the low corner to the high corner, one per axis permutation.
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    cells.resize(6 * nw * nw * nw, 4);
    Index c = 0;
    for (Index k = 0; k < n; ++k)
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
          for (const auto& p : perms) {
            Index steps[3] = {0, 0, 0};
            cells(c, 0) = vid(i, j, k);
            for (int s = 0; s < 3; ++s) {
              steps[p[s]] = 1;
              cells(c, s + 1) = vid(i + steps[0], j + steps[1], k + steps[2]);
            }
            ++c;
          }
  }

  // Derive the hull and tag it Dirichlet.
  SimplicialMesh tmp;
  tmp.dim = dim;
  tmp.vertices = vertices;
  tmp.cells = cells;
  std::map<std::array<Index, 3>, int> counts;
  for (Index c = 0; c < tmp.num_cells(); ++c)
    for (const auto& f : cell_facets(tmp, c)) counts[f] += 1;
  std::vector<BoundaryFace> faces;
  for (const auto& [facet, count] : counts)
    if (count == 1) faces.push_back(BoundaryFace{facet, BoundaryTag::Dirichlet});

  return make_mesh(dim, std::move(vertices), std::move(cells), faces);
}

SimplicialMesh retag_boundary(
    const SimplicialMesh& mesh,
    const std::function<BoundaryTag(const Point&, const Vector&)>& rule) {
  SimplicialMesh out = mesh;
  for (Index f = 0; f < static_cast<Index>(out.boundary_faces.size()); ++f)
    out.boundary_faces[f].tag = rule(mesh.face_barycenter(f), mesh.face_normal(f));
  return out;
}

SimplicialMesh retag_by_velocity(const SimplicialMesh& mesh,
                                 const std::function<Vector(const Point&)>& b) {
  return retag_boundary(mesh, [&b](const Point& bc, const Vector& n) {
    return b(bc).dot(n) > 0 ? BoundaryTag::NeumannIn : BoundaryTag::NeumannOut;
  });
}

std::vector<Index> inconsistent_boundary_tags(
    const SimplicialMesh& mesh, const std::function<Vector(const Point&)>& b) {
  std::vector<Index> bad;
  for (Index f = 0; f < static_cast<Index>(mesh.boundary_faces.size()); ++f) {
    const BoundaryTag tag = mesh.boundary_faces[f].tag;
    if (tag == BoundaryTag::Dirichlet) continue;
    const Real bn = b(mesh.face_barycenter(f)).dot(mesh.face_normal(f));
    if (tag == BoundaryTag::NeumannIn && !(bn > 0)) bad.push_back(f);
    if (tag == BoundaryTag::NeumannOut && !(bn <= 0)) bad.push_back(f);
  }
  return bad;
}

std::vector<MeshEdge> edge_list(const SimplicialMesh& mesh) {
  std::map<std::pair<Index, Index>, std::vector<Index>> edges;
  for (Index c = 0; c < mesh.num_cells(); ++c)
    for (int i = 0; i <= mesh.dim; ++i)
      for (int j = i + 1; j <= mesh.dim; ++j) {
        Index a = mesh.cells(c, i), b = mesh.cells(c, j);
        if (a > b) std::swap(a, b);
        edges[{a, b}].push_back(c);
      }
  std::vector<MeshEdge> out;
  out.reserve(edges.size());
  for (auto& [key, cells] : edges) out.push_back(MeshEdge{key.first, key.second, std::move(cells)});
  return out;
}

Real max_element_diameter(const SimplicialMesh& mesh) {
  Real h = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c)
    for (int i = 0; i <= mesh.dim; ++i)
      for (int j = i + 1; j <= mesh.dim; ++j)
        h = std::max(h, (mesh.vertex(mesh.cells(c, i)) - mesh.vertex(mesh.cells(c, j))).norm());
  return h;
}

namespace {

class LineReader {
public:
  LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  std::istringstream next_line() {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return std::istringstream(line);
    }
    fail("unexpected end of file");
    return std::istringstream();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(name_ + ":" + std::to_string(lineno_) + ": " + msg, lineno_);
  }

  std::size_t lineno() const { return lineno_; }

private:
  std::istream& in_;
  std::string name_;
  std::size_t lineno_ = 0;
};

}  // namespace

SimplicialMesh read_mesh(std::istream& in, const std::string& source_name) {
  LineReader reader(in, source_name);

  auto header = reader.next_line();
  long dim = 0, nv = 0, nc = 0, nbf = 0;
  if (!(header >> dim >> nv >> nc >> nbf)) reader.fail("malformed header, expected 'dim nv nc nbf'");
  if (dim != 2 && dim != 3) reader.fail("dim must be 2 or 3");
  if (nv <= 0 || nc <= 0 || nbf <= 0) reader.fail("counts must be positive");

  MatrixX vertices(nv, dim);
  for (long v = 0; v < nv; ++v) {
    auto line = reader.next_line();
    for (long c = 0; c < dim; ++c)
      if (!(line >> vertices(v, c))) reader.fail("expected " + std::to_string(dim) + " coordinates");
  }

  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> cells(nc, dim + 1);
  for (long c = 0; c < nc; ++c) {
    auto line = reader.next_line();
    for (long k = 0; k <= dim; ++k) {
      long v = 0;
      if (!(line >> v)) reader.fail("expected " + std::to_string(dim + 1) + " vertex indices");
      if (v < 1 || v > nv) reader.fail("vertex index " + std::to_string(v) + " out of range [1," + std::to_string(nv) + "]");
      cells(c, k) = static_cast<Index>(v - 1);
    }
  }

  std::vector<BoundaryFace> faces;
  for (long f = 0; f < nbf; ++f) {
    auto line = reader.next_line();
    BoundaryFace face;
    for (long k = 0; k < dim; ++k) {
      long v = 0;
      if (!(line >> v)) reader.fail("expected " + std::to_string(dim) + " vertex indices and a tag");
      if (v < 1 || v > nv) reader.fail("vertex index " + std::to_string(v) + " out of range [1," + std::to_string(nv) + "]");
      face.v[k] = static_cast<Index>(v - 1);
    }
    std::string word;
    if (!(line >> word)) reader.fail("missing boundary tag word");
    try {
      face.tag = boundary_tag_from_string(word);
    } catch (const MeshError& e) {
      reader.fail(e.what());
    }
    faces.push_back(face);
  }

  try {
    return make_mesh(static_cast<int>(dim), std::move(vertices), std::move(cells), faces);
  } catch (const MeshError& e) {
    throw MeshError(source_name + ": " + e.what());
  }
}

SimplicialMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");
  return read_mesh(in, path);
}

void write_mesh(const SimplicialMesh& mesh, std::ostream& out) {
  out << mesh.dim << ' ' << mesh.num_vertices() << ' ' << mesh.num_cells() << ' '
      << mesh.boundary_faces.size() << '\n';
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    for (int c = 0; c < mesh.dim; ++c) out << (c ? " " : "") << format_real(mesh.vertices(v, c));
    out << '\n';
  }
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    for (int k = 0; k <= mesh.dim; ++k) out << (k ? " " : "") << mesh.cells(c, k) + 1;
    out << '\n';
  }
  for (const auto& f : mesh.boundary_faces) {
    for (int k = 0; k < mesh.dim; ++k) out << f.v[k] + 1 << ' ';
    out << to_string(f.tag) << '\n';
  }
}

void write_mesh(const SimplicialMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot open '" + path + "' for writing");
  write_mesh(mesh, out);
}

}  // namespace eafe
