#include "eafe/expr.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace eafe;

TEST_CASE("precedence and basic evaluation") {
  CHECK(FieldExpr::parse("1+2*3").eval(0) == doctest::Approx(7.0));
  CHECK(FieldExpr::parse("exp(0)+abs(-2)").eval(0) == doctest::Approx(3.0));
  CHECK(FieldExpr::parse("2^3^2").eval(0) == doctest::Approx(512.0));   // right assoc
  CHECK(FieldExpr::parse("-2^2").eval(0) == doctest::Approx(-4.0));     // ^ binds tighter
  CHECK(FieldExpr::parse("(-2)^2").eval(0) == doctest::Approx(4.0));
  CHECK(FieldExpr::parse("6/3/2").eval(0) == doctest::Approx(1.0));
  CHECK(FieldExpr::parse("1-2-3").eval(0) == doctest::Approx(-4.0));
  CHECK(FieldExpr::parse("min(3, max(1, 2))").eval(0) == doctest::Approx(2.0));
  CHECK(FieldExpr::parse("sqrt(x^2+y^2)").eval(3.0, 4.0) == doctest::Approx(5.0));
  CHECK(FieldExpr::parse("sin(pi/2)").eval(0) == doctest::Approx(1.0));
  CHECK(FieldExpr::parse("  1.5e2 * 2 ").eval(0) == doctest::Approx(300.0));
  CHECK(FieldExpr::parse("cos(z)").eval(0, 0, 0) == doctest::Approx(1.0));
}

TEST_CASE("whitespace insensitivity") {
  const Point p = [] {
    Point q(2);
    q << 0.3, 0.7;
    return q;
  }();
  CHECK(FieldExpr::parse("x*y+1").eval(p) == FieldExpr::parse(" x * y + 1 ").eval(p));
}

TEST_CASE("syntax errors carry byte offsets") {
  auto offset_of = [](const char* text) {
    try {
      FieldExpr::parse(text);
    } catch (const ParseError& e) {
      return e.where();
    }
    return std::size_t(-1);
  };
  CHECK(offset_of("2*(x") == 4);        // missing ')' at end of input
  CHECK(offset_of("1+*2") == 2);
  CHECK(offset_of("foo(1)") == 0);      // unknown identifier
  CHECK(offset_of("1 + bar") == 4);
  CHECK_THROWS_AS(FieldExpr::parse(""), ParseError);
  CHECK_THROWS_AS(FieldExpr::parse("1 2"), ParseError);
}

TEST_CASE("arity mismatches are rejected") {
  CHECK_THROWS_WITH_AS(FieldExpr::parse("min(1,2,3)"), doctest::Contains("arity"), ParseError);
  CHECK_THROWS_WITH_AS(FieldExpr::parse("sin(1,2)"), doctest::Contains("arity"), ParseError);
  CHECK_THROWS_AS(FieldExpr::parse("max(1)"), ParseError);
}

TEST_CASE("max_var tracks the coordinates used") {
  CHECK(FieldExpr::parse("1+2").max_var() == 0);
  CHECK(FieldExpr::parse("x").max_var() == 1);
  CHECK(FieldExpr::parse("x*y").max_var() == 2);
  CHECK(FieldExpr::parse("sin(z)").max_var() == 3);
  CHECK(FieldExpr::parse("3.5").is_constant());
}

namespace {

// Random AST via random printable source strings would bias toward shallow
// trees; instead build sources recursively from the grammar.
std::string random_source(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  switch (pick(rng)) {
    case 0: {
      std::uniform_real_distribution<double> num(0.0, 10.0);
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3f", num(rng));
      return buf;
    }
    case 1: return std::uniform_int_distribution<int>(0, 2)(rng) == 0 ? "x" : "y";
    case 2: return "pi";
    case 3: return "(" + random_source(rng, depth - 1) + "+" + random_source(rng, depth - 1) + ")";
    case 4: return random_source(rng, depth - 1) + "-" + random_source(rng, depth - 1);
    case 5: return random_source(rng, depth - 1) + "*" + random_source(rng, depth - 1);
    case 6: return "-" + random_source(rng, depth - 1);
    case 7: return "sin(" + random_source(rng, depth - 1) + ")";
    case 8: return "min(" + random_source(rng, depth - 1) + "," + random_source(rng, depth - 1) + ")";
    default: return random_source(rng, depth - 1) + "/(1+abs(" + random_source(rng, depth - 1) + "))";
  }
}

}  // namespace

TEST_CASE("parse-print round trip is AST-equal") {
  std::mt19937 rng(20240817);
  for (int trial = 0; trial < 300; ++trial) {
    const std::string source = random_source(rng, 4);
    const FieldExpr parsed = FieldExpr::parse(source);
    const FieldExpr reparsed = FieldExpr::parse(parsed.str());
    CHECK(parsed == reparsed);
    // And evaluation agrees at a few points.
    for (double x : {0.25, 1.5}) {
      const double a = parsed.eval(x, 2 * x);
      const double b = reparsed.eval(x, 2 * x);
      if (std::isfinite(a) || std::isfinite(b)) CHECK(a == doctest::Approx(b).epsilon(1e-15));
    }
  }
}

TEST_CASE("power printing preserves associativity") {
  for (const char* source : {"2^3^2", "(2^3)^2", "-x^2", "(-x)^2", "x^-2", "2*x^2-1"}) {
    const FieldExpr e = FieldExpr::parse(source);
    CHECK(e == FieldExpr::parse(e.str()));
  }
}
