#include "eafe/coeff.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

using namespace eafe;

namespace {

Point make_point(Real x, Real y) {
  Point p(2);
  p << x, y;
  return p;
}

}  // namespace

TEST_CASE("beta solves D beta = b") {
  SUBCASE("identity") {
    Vector b(2);
    b << 3.0, 4.0;
    const CoefficientSet c = make_constant_coefficients(Matrix::Identity(2, 2), b, 0.0, {});
    const Vector beta_x = beta(c, make_point(0.5, 0.5));
    CHECK(beta_x(0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(beta_x(1) == doctest::Approx(4.0).epsilon(1e-14));
  }
  SUBCASE("diagonal") {
    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = 2.0;
    D(1, 1) = 1.0;
    Vector b(2);
    b << 3.0, 4.0;
    const CoefficientSet c = make_constant_coefficients(D, b, 0.0, {});
    const Vector beta_x = beta(c, make_point(0.0, 0.0));
    CHECK(beta_x(0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(beta_x(1) == doctest::Approx(4.0).epsilon(1e-14));
  }
  SUBCASE("dispersion shortcut: beta = b / (k_d + k_t |b|)") {
    const DispersionParams params{0.0001, 21.0, 2.1};
    Vector b(2);
    b << 1.0, 0.0;
    const Matrix D = dispersion_tensor(params, b);
    const CoefficientSet c = make_constant_coefficients(D, b, 0.0, {});
    const Vector beta_x = beta(c, make_point(0.25, 0.75));
    CHECK(beta_x(0) == doctest::Approx(1.0 / 21.0001).epsilon(1e-13));
    CHECK(beta_x(1) == doctest::Approx(0.0));
  }
  SUBCASE("non-SPD D names the point") {
    CoefficientSet c;
    c.dim = 2;
    c.D = [](const Point&) {
      Matrix D(2, 2);
      D << 1.0, 2.0, 2.0, 1.0;  // indefinite
      return D;
    };
    c.b = [](const Point&) { return Vector(Vector::Ones(2)); };
    CHECK_THROWS_WITH_AS(beta(c, make_point(0.5, 0.25)), doctest::Contains("0.5"),
                         CoefficientError);
  }
}

TEST_CASE("dispersion tensor") {
  SUBCASE("pure diffusion when k_t = k_l = 0") {
    Vector b(2);
    b << 0.3, -0.2;
    const Matrix D = dispersion_tensor({1.0, 0.0, 0.0}, b);
    CHECK((D - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("b = 0 limit is k_d I") {
    const Matrix D = dispersion_tensor({0.7, 21.0, 2.1}, Vector::Zero(3));
    CHECK((D - 0.7 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("axis-aligned b gives the diagonal closed form") {
    Vector b(2);
    b << 1.0, 0.0;
    const DispersionParams p{0.5, 3.0, 1.25};
    const Matrix D = dispersion_tensor(p, b);
    CHECK(D(0, 0) == doctest::Approx(p.k_d + p.k_t).epsilon(1e-14));
    CHECK(D(1, 1) == doctest::Approx(p.k_d + p.k_l).epsilon(1e-14));
    CHECK(std::abs(D(0, 1)) <= 1e-15);
  }
  SUBCASE("b is an eigenvector with eigenvalue k_d + k_t |b|, rest k_d + k_l |b|") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<Real> dist(-2.0, 2.0);
    const DispersionParams p{0.0001, 21.0, 2.1};
    for (int dim : {2, 3})
      for (int trial = 0; trial < 50; ++trial) {
        Vector b(dim);
        for (int c = 0; c < dim; ++c) b(c) = dist(rng);
        if (b.norm() < 1e-3) continue;
        const Matrix D = dispersion_tensor(p, b);
        CHECK((D - D.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * D.cwiseAbs().maxCoeff());
        const Vector Db = D * b;
        const Real expected = p.k_d + p.k_t * b.norm();
        CHECK((Db - expected * b).norm() <= 1e-10 * Db.norm());
        Eigen::SelfAdjointEigenSolver<MatrixX> es{MatrixX(D)};
        // Eigenvalues are {k_d + k_l |b| (dim-1 times), k_d + k_t |b|}, ascending.
        CHECK(es.eigenvalues()(dim - 1) == doctest::Approx(expected).epsilon(1e-10));
        for (int k = 0; k + 1 < dim; ++k)
          CHECK(es.eigenvalues()(k) == doctest::Approx(p.k_d + p.k_l * b.norm()).epsilon(1e-10));
      }
  }
}

TEST_CASE("alpha scaling") {
  SUBCASE("alpha is the mean eigenvalue") {
    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = 1.0;
    D(1, 1) = 9.0;
    CHECK(mean_eigenvalue_alpha(D) == doctest::Approx(5.0).epsilon(1e-14));
    Matrix D3 = Matrix::Identity(3, 3);
    D3(0, 0) = 4.0;  // eigenvalues 4, 1, 1
    CHECK(mean_eigenvalue_alpha(D3) == doctest::Approx(2.5).epsilon(1e-12));
  }
  SUBCASE("alpha_scaled attaches the field and keeps beta") {
    Vector b(2);
    b << 2.0, -1.0;
    const CoefficientSet base = make_constant_coefficients(4.0 * Matrix::Identity(2, 2), b, 0.0, {});
    const CoefficientSet scaled = alpha_scaled(base);
    REQUIRE(static_cast<bool>(scaled.alpha));
    CHECK(scaled.alpha(make_point(0.1, 0.9)) == doctest::Approx(4.0).epsilon(1e-14));
    const Vector beta_base = beta(base, make_point(0.5, 0.5));
    const Vector beta_scaled = beta(scaled, make_point(0.5, 0.5));
    CHECK((beta_base - beta_scaled).norm() <= 1e-15);
  }
}

TEST_CASE("coefficient text forms") {
  SUBCASE("matrix of expressions") {
    bool constant = false;
    const TensorField D = tensor_from_text("[[1+x, 0], [0, 2]]", 2, &constant);
    CHECK_FALSE(constant);
    const Matrix Dx = D(make_point(0.5, 0.0));
    CHECK(Dx(0, 0) == doctest::Approx(1.5));
    CHECK(Dx(1, 1) == doctest::Approx(2.0));
  }
  SUBCASE("vector of expressions") {
    bool constant = false;
    const VectorField b = vector_from_text("(y, -x)", 2, &constant);
    CHECK_FALSE(constant);
    const Vector bx = b(make_point(0.25, 0.75));
    CHECK(bx(0) == doctest::Approx(0.75));
    CHECK(bx(1) == doctest::Approx(-0.25));
  }
  SUBCASE("constants are detected") {
    bool constant = false;
    vector_from_text("(2, 1)", 2, &constant);
    CHECK(constant);
    tensor_from_text("[[2, 0.5],[0.5, 1]]", 2, &constant);
    CHECK(constant);
    scalar_from_text("3*pi", 2, &constant);
    CHECK(constant);
  }
  SUBCASE("dispersion call") {
    DispersionParams p;
    CHECK(parse_dispersion_call("dispersion(0.0001, 21, 2.1)", &p));
    CHECK(p.k_d == doctest::Approx(0.0001));
    CHECK(p.k_t == doctest::Approx(21.0));
    CHECK(p.k_l == doctest::Approx(2.1));
    CHECK_FALSE(parse_dispersion_call("[[1,0],[0,1]]", &p));
    CHECK_THROWS_AS(parse_dispersion_call("dispersion(1, 2)", &p), CoefficientError);
  }
  SUBCASE("dimension guard") {
    CHECK_THROWS_WITH_AS(scalar_from_text("z", 2, nullptr), doctest::Contains("z"),
                         CoefficientError);
    CHECK_THROWS_AS(vector_from_text("(x, y, z)", 2, nullptr), CoefficientError);
    CHECK_NOTHROW(scalar_from_text("z", 3, nullptr));
  }
  SUBCASE("shape errors") {
    CHECK_THROWS_AS(tensor_from_text("[[1, 0]]", 2, nullptr), CoefficientError);
    CHECK_THROWS_AS(vector_from_text("(1)", 2, nullptr), CoefficientError);
    CHECK_THROWS_AS(tensor_from_text("(1, 0)", 2, nullptr), CoefficientError);
  }
}
