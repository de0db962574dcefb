#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "latwave/expression.hpp"

using latwave::Expression;

TEST_CASE("arithmetic and precedence") {
  CHECK(Expression::parse("1+2*3")(0.0) == 7.0);
  CHECK(Expression::parse("(1+2)*3")(0.0) == 9.0);
  CHECK(Expression::parse("2^3^2")(0.0) == 512.0);  // right associative
  CHECK(Expression::parse("-2^2")(0.0) == -4.0);    // unary minus binds loosely
  CHECK(Expression::parse("6/4")(0.0) == 1.5);
  CHECK(Expression::parse("1 - 2 - 3")(0.0) == -4.0);
}

TEST_CASE("variable spellings and constants") {
  for (const char* v : {"x", "xi", "zeta", "u"})
    CHECK(Expression::parse(v)(3.5) == 3.5);
  CHECK(Expression::parse("pi")(0.0) == Catch::Approx(std::numbers::pi));
  CHECK(Expression::parse("e")(0.0) == Catch::Approx(std::numbers::e));
}

TEST_CASE("functions") {
  Expression f = Expression::parse("0.5 + 0.5*exp(-x^2)");
  CHECK(f(0.0) == 1.0);
  CHECK(f(2.0) == Catch::Approx(0.5 + 0.5 * std::exp(-4.0)));
  CHECK(Expression::parse("sin(pi/2)")(0.0) == Catch::Approx(1.0));
  CHECK(Expression::parse("cos(0)")(0.0) == 1.0);
  CHECK(Expression::parse("arctan(1)*4")(0.0) == Catch::Approx(std::numbers::pi));
  CHECK(Expression::parse("atan(1)*4")(0.0) == Catch::Approx(std::numbers::pi));
  CHECK(Expression::parse("erf(1)")(0.0) == Catch::Approx(std::erf(1.0)));
}

TEST_CASE("the long-wave example formula") {
  Expression f = Expression::parse("1-0.65*sin(2*pi*x)");
  CHECK(f(0.0) == 1.0);
  CHECK(f(0.25) == Catch::Approx(0.35));
  CHECK(f(0.75) == Catch::Approx(1.65));
}

TEST_CASE("parse errors carry position context") {
  CHECK_THROWS_AS(Expression::parse("1+"), latwave::ParseError);
  CHECK_THROWS_AS(Expression::parse("foo(2)"), latwave::ParseError);
  CHECK_THROWS_AS(Expression::parse("sin 2"), latwave::ParseError);
  CHECK_THROWS_AS(Expression::parse("(1+2"), latwave::ParseError);
  CHECK_THROWS_AS(Expression::parse("1 2"), latwave::ParseError);
}
