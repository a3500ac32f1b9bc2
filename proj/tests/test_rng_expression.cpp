#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "algebroid/expression.hpp"
#include "algebroid/rng.hpp"

using namespace algebroid;

TEST_CASE("counter rng is pure in (seed, counter)", "[rng]") {
  CounterRng a(42), b(42);
  for (int i = 0; i < 64; ++i) REQUIRE(a.next_u64() == b.next_u64());
  REQUIRE(a.at(7) == CounterRng(42).at(7));
  REQUIRE(CounterRng(1).at(0) != CounterRng(2).at(0));
}

TEST_CASE("counter rng uniforms stay in range", "[rng]") {
  CounterRng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -2.0);
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(3, 5.0);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd v = rng.uniform_vector(lo, hi);
    for (int k = 0; k < 3; ++k) {
      REQUIRE(v[k] >= -2.0);
      REQUIRE(v[k] <= 5.0);
    }
  }
}

TEST_CASE("halton covers the box", "[rng]") {
  REQUIRE(halton(1, 2) == 0.5);
  REQUIRE(halton(2, 2) == 0.25);
  REQUIRE(halton(3, 2) == 0.75);
  REQUIRE(halton(1, 3) == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("expression grammar evaluates", "[expression]") {
  const std::vector<std::string> vars = {"x", "y"};
  Eigen::VectorXd v(2);
  v << 2.0, 3.0;

  auto eval = [&](const std::string& src) {
    return Expression::parse(src, vars).eval(v);
  };

  REQUIRE(eval("1 + 2*3") == 7.0);
  REQUIRE(eval("(1 + 2)*3") == 9.0);
  REQUIRE(eval("x + y") == 5.0);
  REQUIRE(eval("x^2") == 4.0);
  REQUIRE(eval("2^3^2") == 512.0);  // right associative
  REQUIRE(eval("-x^2") == -4.0);    // unary binds above the power result
  REQUIRE(eval("x^-1") == 0.5);
  REQUIRE(eval("sin(0)") == 0.0);
  REQUIRE(eval("cos(0)") == 1.0);
  REQUIRE(eval("sqrt(x*x)") == 2.0);
  REQUIRE(eval("exp(log(y))") == Catch::Approx(3.0));
  REQUIRE(eval("sin(pi/2)") == Catch::Approx(1.0));
  REQUIRE(eval("1e2 + 1.5e-1") == Catch::Approx(100.15));
  REQUIRE(eval("x/y/2") == Catch::Approx(2.0 / 3.0 / 2.0));
  REQUIRE(eval("1 - 2 - 3") == -4.0);
}

TEST_CASE("expression parse errors carry positions", "[expression]") {
  const std::vector<std::string> vars = {"x"};
  REQUIRE_THROWS_AS(Expression::parse("x +", vars), ParseError);
  REQUIRE_THROWS_AS(Expression::parse("(x", vars), ParseError);
  REQUIRE_THROWS_AS(Expression::parse("z", vars), ParseError);
  REQUIRE_THROWS_AS(Expression::parse("tan(x)", vars), ParseError);
  REQUIRE_THROWS_AS(Expression::parse("x 1", vars), ParseError);
  REQUIRE_THROWS_AS(Expression::parse("", vars), ParseError);
}
