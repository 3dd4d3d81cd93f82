#include "eafe/assembly.hpp"

#include "eafe/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace eafe {

EdgeExponentials edge_exponential_data_constant(Real t) {
  EdgeExponentials e;
  e.dpsi = t;
  e.harm_gauged = bernoulli(t);
  e.coef_to = bernoulli(-t);
  e.coef_from = e.harm_gauged;
  return e;
}

EdgeExponentials edge_exponential_data(const Point& q_from, const Point& q_to,
                                       const VectorField& beta_field, int quad_points,
                                       Real gauge_shift) {
  const GaussRule& rule = gauss_legendre(quad_points);
  const Vector tau = q_to - q_from;

  // psi(s) = gauge + int_0^s beta(x(r)) . tau dr on the unit parameterization
  // x(s) = q_from + s tau; each target s integrated with the same rule
  // rescaled to [0, s].
  auto psi_at = [&](Real s) {
    Real acc = 0.0;
    for (int k = 0; k < quad_points; ++k) {
      const Real r = s * rule.points[static_cast<std::size_t>(k)];
      const Point x = q_from + r * tau;
      acc += s * rule.weights[static_cast<std::size_t>(k)] * beta_field(x).dot(tau);
    }
    return gauge_shift + acc;
  };

  std::vector<Real> psi(static_cast<std::size_t>(quad_points) + 2);
  psi[0] = gauge_shift;  // at q_from
  for (int k = 0; k < quad_points; ++k)
    psi[static_cast<std::size_t>(k) + 1] = psi_at(rule.points[static_cast<std::size_t>(k)]);
  psi.back() = psi_at(1.0);  // at q_to

  // Max-shifted exponentials keep everything in [0,1]; the shift cancels in
  // the invariant coefficient pair.
  const Real shift = *std::max_element(psi.begin(), psi.end());
  Real avg = 0.0;  // (1/|tau|) int_E e^{psi - shift} ds
  for (int k = 0; k < quad_points; ++k)
    avg += rule.weights[static_cast<std::size_t>(k)] * std::exp(psi[static_cast<std::size_t>(k) + 1] - shift);

  EdgeExponentials e;
  e.dpsi = psi.back() - psi.front();
  e.coef_from = std::exp(psi.front() - shift) / avg;
  e.coef_to = std::exp(psi.back() - shift) / avg;
  e.harm_gauged = e.coef_from;
  return e;
}

std::vector<Real> edge_weight_omega(const ElementGeometry& geom, const TensorField& D,
                                    int quad_degree, const ScalarField& alpha) {
  const int dim = geom.dim;
  const SimplexRule& rule = simplex_rule(dim, quad_degree);

  // Average D (or D/alpha, with the average of alpha factored back in) over
  // the element; constant coefficients make this exact with any rule.
  Matrix Dbar = Matrix::Zero(dim, dim);
  Real alpha_bar = 0.0;
  for (Index q = 0; q < rule.size(); ++q) {
    Point x = Point::Zero(dim);
    for (int k = 0; k <= dim; ++k) x += rule.barycentric(q, k) * geom.corners.col(k);
    const Real w = rule.weights[static_cast<std::size_t>(q)];
    if (alpha) {
      const Real a = alpha(x);
      if (!(a > 0)) throw CoefficientError("alpha scaling must be positive");
      Dbar += w * (D(x) / a);
      alpha_bar += w * a;
    } else {
      Dbar += w * D(x);
    }
  }
  if (!alpha) alpha_bar = 1.0;

  std::vector<Real> omega;
  omega.reserve(geom.edges.size());
  for (const auto& edge : geom.edges) {
    const Real val = geom.grad_lambda.col(edge.i).dot(Dbar * geom.grad_lambda.col(edge.j));
    omega.push_back(-geom.measure * alpha_bar * val);
  }
  return omega;
}

std::vector<EdgeData> element_edge_data(
    const ElementGeometry& geom, const CoefficientSet& coeffs, const SchemeOptions& scheme,
    const std::function<Real(Index, Index)>& edge_gauge_shift) {
  const std::vector<Real> omega = edge_weight_omega(geom, coeffs.D, scheme.omega_quad_degree,
                                                    coeffs.alpha);

  bool use_constant = coeffs.beta_constant();
  if (scheme.beta_mode == SchemeOptions::BetaMode::Quadrature) use_constant = false;
  if (scheme.beta_mode == SchemeOptions::BetaMode::Constant) use_constant = true;

  Vector beta_const;
  if (use_constant) beta_const = beta(coeffs, geom.corner_point(0));
  VectorField beta_field;
  if (!use_constant)
    beta_field = [&coeffs](const Point& x) { return beta(coeffs, x); };

  std::vector<EdgeData> out;
  out.reserve(geom.edges.size());
  for (std::size_t e = 0; e < geom.edges.size(); ++e) {
    const auto& edge = geom.edges[e];
    // Orient by ascending global id: i is the larger-numbered endpoint, the
    // gauge sits on the smaller-numbered one.
    int li = edge.i, lj = edge.j;
    if (geom.vertex_ids[static_cast<std::size_t>(li)] < geom.vertex_ids[static_cast<std::size_t>(lj)])
      std::swap(li, lj);

    EdgeData data;
    data.element = geom.cell;
    data.i = li;
    data.j = lj;
    data.omega = omega[e];

    const Point q_from = geom.corner_point(lj);
    const Point q_to = geom.corner_point(li);
    EdgeExponentials expo;
    if (use_constant) {
      expo = edge_exponential_data_constant(beta_const.dot(Vector(q_to - q_from)));
    } else {
      Real shift = 0.0;
      if (edge_gauge_shift) {
        const Index ga = geom.vertex_ids[static_cast<std::size_t>(lj)];
        const Index gb = geom.vertex_ids[static_cast<std::size_t>(li)];
        shift = edge_gauge_shift(std::min(ga, gb), std::max(ga, gb));
      }
      expo = edge_exponential_data(q_from, q_to, beta_field, scheme.edge_quad_points, shift);
    }
    data.dpsi = expo.dpsi;
    data.harm_gauged = expo.harm_gauged;
    data.coef_i = expo.coef_to;
    data.coef_j = expo.coef_from;
    out.push_back(data);
  }
  return out;
}

LocalMatrix local_eafe_matrix(const ElementGeometry& geom, const CoefficientSet& coeffs,
                              const SchemeOptions& scheme) {
  const int nv = geom.num_local_vertices();
  LocalMatrix A = LocalMatrix::Zero(nv, nv);
  for (const auto& e : element_edge_data(geom, coeffs, scheme)) {
    // omega * harm * delta(e^psi u) delta(v) for the edge (i, j):
    const Real w = e.omega;
    A(e.i, e.i) += w * e.coef_i;
    A(e.i, e.j) -= w * e.coef_j;
    A(e.j, e.i) -= w * e.coef_i;
    A(e.j, e.j) += w * e.coef_j;
  }
  return A;
}

CompressedMatrix SparseSystem::matrix() const {
  CompressedMatrix A(n, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return A;
}

std::pair<CompressedMatrix, VectorX> SparseSystem::eliminated() const {
  VectorX out_rhs = rhs;
  std::vector<Triplet> kept;
  kept.reserve(triplets.size() + static_cast<std::size_t>(n));
  for (const auto& t : triplets) {
    const bool row_d = dirichlet_mask[static_cast<std::size_t>(t.row())];
    const bool col_d = dirichlet_mask[static_cast<std::size_t>(t.col())];
    if (row_d) continue;
    if (col_d) {
      out_rhs(t.row()) -= t.value() * dirichlet_values(t.col());
      continue;
    }
    kept.push_back(t);
  }
  for (Index v = 0; v < n; ++v)
    if (dirichlet_mask[static_cast<std::size_t>(v)]) {
      kept.emplace_back(v, v, 1.0);
      out_rhs(v) = dirichlet_values(v);
    }
  CompressedMatrix A(n, n);
  A.setFromTriplets(kept.begin(), kept.end());
  A.makeCompressed();
  return {std::move(A), std::move(out_rhs)};
}

namespace {

void check_finite(Real value, const char* what, Index element) {
  if (!std::isfinite(value))
    throw CoefficientError(std::string(what) + " is not finite on element " +
                           std::to_string(element));
}

}  // namespace

SparseSystem assemble(const SimplicialMesh& mesh, const CoefficientSet& coeffs_in,
                      const AssemblyOptions& options) {
  if (coeffs_in.dim != mesh.dim)
    throw CoefficientError("coefficient dimension does not match the mesh");
  if (!coeffs_in.D || !coeffs_in.b)
    throw CoefficientError("coefficient set must define D and b");
  CoefficientSet coeffs = coeffs_in;
  const ScalarField zero = [](const Point&) { return 0.0; };
  if (!coeffs.gamma) coeffs.gamma = zero;
  if (!coeffs.f) coeffs.f = zero;
  if (!coeffs.g) coeffs.g = zero;

  SparseSystem sys;
  sys.n = mesh.num_vertices();
  sys.rhs = VectorX::Zero(sys.n);
  sys.dirichlet_mask.assign(static_cast<std::size_t>(sys.n), false);
  sys.dirichlet_values = VectorX::Zero(sys.n);

  const int dim = mesh.dim;
  const int nv_local = dim + 1;
  const SimplexRule& mass_rule = simplex_rule(dim, options.scheme.mass_quad_degree);

  for (Index c = 0; c < mesh.num_cells(); ++c) {
    try {
      const ElementGeometry geom = element_geometry(mesh, c);

      LocalMatrix A = LocalMatrix::Zero(nv_local, nv_local);
      for (const auto& e :
           element_edge_data(geom, coeffs, options.scheme, options.edge_gauge_shift)) {
        A(e.i, e.i) += e.omega * e.coef_i;
        A(e.i, e.j) -= e.omega * e.coef_j;
        A(e.j, e.i) -= e.omega * e.coef_i;
        A(e.j, e.j) += e.omega * e.coef_j;
      }

      // Reaction mass and source terms by simplex quadrature.
      VectorX F = VectorX::Zero(nv_local);
      for (Index q = 0; q < mass_rule.size(); ++q) {
        Point x = Point::Zero(dim);
        for (int k = 0; k < nv_local; ++k) x += mass_rule.barycentric(q, k) * geom.corners.col(k);
        const Real w = mass_rule.weights[static_cast<std::size_t>(q)] * geom.measure;
        const Real gamma_q = coeffs.gamma(x);
        const Real f_q = coeffs.f(x);
        check_finite(gamma_q, "gamma", c);
        check_finite(f_q, "f", c);
        for (int i = 0; i < nv_local; ++i) {
          F(i) += w * f_q * mass_rule.barycentric(q, i);
          if (gamma_q != 0.0)
            for (int j = 0; j < nv_local; ++j)
              A(i, j) += w * gamma_q * mass_rule.barycentric(q, i) * mass_rule.barycentric(q, j);
        }
      }

      for (int i = 0; i < nv_local; ++i) {
        const Index gi = geom.vertex_ids[static_cast<std::size_t>(i)];
        sys.rhs(gi) += F(i);
        for (int j = 0; j < nv_local; ++j)
          sys.triplets.emplace_back(gi, geom.vertex_ids[static_cast<std::size_t>(j)], A(i, j));
      }
    } catch (const Error& e) {
      throw CoefficientError("assembly failed on element " + std::to_string(c) + ": " + e.what());
    }
  }

  // Boundary terms: outflow contributes -int b.n u v to the matrix, inflow
  // contributes int g v to the right-hand side.
  const int nf = dim;  // vertices per face
  for (Index f = 0; f < static_cast<Index>(mesh.boundary_faces.size()); ++f) {
    const auto& face = mesh.boundary_faces[f];
    if (face.tag == BoundaryTag::Dirichlet) continue;
    try {
      const Real measure = mesh.face_measure(f);
      const Vector normal = mesh.face_normal(f);

      std::vector<Point> corners;
      for (int k = 0; k < nf; ++k) corners.push_back(mesh.vertex(face.v[k]));

      // Face quadrature of degree 2: Gauss on segments, midpoint rule on
      // triangles; lambda are the P1 basis values restricted to the face.
      std::vector<std::pair<std::vector<Real>, Real>> qpts;  // (bary on face, weight)
      if (dim == 2) {
        const GaussRule& rule = gauss_legendre(2);
        for (int k = 0; k < 2; ++k) {
          const Real s = rule.points[static_cast<std::size_t>(k)];
          qpts.push_back({{1.0 - s, s}, rule.weights[static_cast<std::size_t>(k)]});
        }
      } else {
        const SimplexRule& rule = simplex_rule(2, 2);
        for (Index q = 0; q < rule.size(); ++q)
          qpts.push_back({{rule.barycentric(q, 0), rule.barycentric(q, 1), rule.barycentric(q, 2)},
                          rule.weights[static_cast<std::size_t>(q)]});
      }

      for (const auto& [bary, w] : qpts) {
        Point x = Point::Zero(dim);
        for (int k = 0; k < nf; ++k) x += bary[static_cast<std::size_t>(k)] * corners[static_cast<std::size_t>(k)];
        if (face.tag == BoundaryTag::NeumannOut) {
          const Real bn = coeffs.b(x).dot(normal);
          for (int i = 0; i < nf; ++i)
            for (int j = 0; j < nf; ++j)
              sys.triplets.emplace_back(face.v[i], face.v[j],
                                        -w * measure * bn * bary[static_cast<std::size_t>(i)] *
                                            bary[static_cast<std::size_t>(j)]);
        } else {  // NeumannIn
          const Real g_q = coeffs.g(x);
          for (int i = 0; i < nf; ++i)
            sys.rhs(face.v[i]) += w * measure * g_q * bary[static_cast<std::size_t>(i)];
        }
      }
    } catch (const Error& e) {
      throw CoefficientError("assembly failed on boundary face " + std::to_string(f) + ": " +
                             e.what());
    }
  }

  // Dirichlet bookkeeping; the values are applied by eliminated().
  for (Index f = 0; f < static_cast<Index>(mesh.boundary_faces.size()); ++f) {
    const auto& face = mesh.boundary_faces[f];
    if (face.tag != BoundaryTag::Dirichlet) continue;
    for (int k = 0; k < nf; ++k) sys.dirichlet_mask[static_cast<std::size_t>(face.v[k])] = true;
  }
  for (Index v = 0; v < sys.n; ++v)
    if (sys.dirichlet_mask[static_cast<std::size_t>(v)] && options.dirichlet_values)
      sys.dirichlet_values(v) = options.dirichlet_values(v, mesh.vertex(v));

  return sys;
}

VectorX interpolate(const SimplicialMesh& mesh, const ScalarField& u) {
  VectorX out(mesh.num_vertices());
  for (Index v = 0; v < mesh.num_vertices(); ++v) out(v) = u(mesh.vertex(v));
  return out;
}

}  // namespace eafe
