#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "fracstar/expression.hpp"

using fracstar::Expression;
using fracstar::ExpressionError;

TEST_CASE("arithmetic, precedence, and associativity") {
  CHECK(Expression::parse("1 + 2*3").eval({}) == 7.0);
  CHECK(Expression::parse("2*3^2").eval({}) == 18.0);
  CHECK(Expression::parse("2^3^2").eval({}) == 512.0);  // right associative
  CHECK(Expression::parse("(1 + 2)*3").eval({}) == 9.0);
  CHECK(Expression::parse("7/2/2").eval({}) == doctest::Approx(1.75));
  CHECK(Expression::parse("(-2)^2").eval({}) == 4.0);
  CHECK(Expression::parse("0 - 2^2").eval({}) == -4.0);
  CHECK(Expression::parse("x*t + k").eval({{"x", 2.0}, {"t", 3.0}, {"k", 1.0}}) ==
        7.0);
}

TEST_CASE("built-in functions and pi") {
  CHECK(Expression::parse("sin(pi*x)").eval({{"x", 0.5}}) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Expression::parse("cos(0)").eval({}) == 1.0);
  CHECK(Expression::parse("exp(1)").eval({}) ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(Expression::parse("sqrt(2)").eval({}) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(Expression::parse("pow(x, 3)").eval({{"x", 2.0}}) == 8.0);
}

TEST_CASE("free variables are reported sorted and deduplicated") {
  const auto vars = Expression::parse("t + x*x - sin(k) + x").variables();
  CHECK(vars == std::vector<std::string>{"k", "t", "x"});
  CHECK(Expression::parse("pi").variables().empty());
}

TEST_CASE("parse and evaluation failures carry positions") {
  CHECK_THROWS_AS(Expression::parse("1 +"), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("sin()"), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("2 ** 3"), ExpressionError);
  CHECK_THROWS_AS(Expression::parse(""), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("x + y").eval({{"x", 1.0}}), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("sqrt(0 - 1)").eval({}), ExpressionError);
}

TEST_CASE("printed form re-parses to an equivalent expression") {
  const char* corpus[] = {
      "1 + 2*x - t^2",
      "-x^2 + sin(pi*t)*cos(x/3)",
      "pow(x, 2) + sqrt(t + 4)",
      "k*(x - 1)*(x + 1)/(t + 2)",
      "exp(-x*x)*sin(2*x + k)",
  };
  std::mt19937_64 rng(13);
  for (const char* text : corpus) {
    const Expression a = Expression::parse(text);
    const Expression b = Expression::parse(a.to_string());
    for (int trial = 0; trial < 20; ++trial) {
      const std::map<std::string, double> env{
          {"x", (rng() >> 11) * 0x1.0p-53 * 2.0},
          {"t", (rng() >> 11) * 0x1.0p-53 * 2.0},
          {"k", double(rng() % 5)},
      };
      const double va = a.eval(env);
      const double vb = b.eval(env);
      CHECK(va == doctest::Approx(vb).epsilon(1e-15));
    }
  }
}
