#include <catch2/catch_amalgamated.hpp>

#include "qtask/expr.hpp"

using namespace qtask;

TEST_CASE("arithmetic, comparison and selection") {
  Scope s{{"a", 3}, {"b", 4}, {"I1", 1}, {"I2", 0}};
  CHECK(Expr::parse("a + b * 2").eval(s) == 11.0);
  CHECK(Expr::parse("(a + b) * 2").eval(s) == 14.0);
  CHECK(Expr::parse("-a + 5").eval(s) == 2.0);
  CHECK(Expr::parse("a == 3").eval(s) == 1.0);
  CHECK(Expr::parse("a < b").eval(s) == 1.0);
  CHECK(Expr::parse("a >= b").eval(s) == 0.0);
  CHECK(Expr::parse("select(I1, 10, 20)").eval(s) == 10.0);
  CHECK(Expr::parse("select(I2, 10, 20)").eval(s) == 20.0);
  CHECK(Expr::parse("xor(I1, I2)").eval(s) == 1.0);
  CHECK(Expr::parse("and(I1, I2)").eval(s) == 0.0);
  CHECK(Expr::parse("mod(7, 3)").eval(s) == 1.0);
  CHECK(Expr::parse("mod(-1, 2)").eval(s) == 1.0);
  CHECK(Expr::parse("abs(-2.5)").eval(s) == 2.5);
  CHECK(Expr::parse("min(a, b) + max(a, b)").eval(s) == 7.0);
  CHECK(Expr::parse("pi").eval(s) == Catch::Approx(3.14159265358979));
  CHECK(Expr::parse("1.5e2").eval(s) == 150.0);
}

TEST_CASE("grid maps an index onto an evenly spaced range") {
  Scope s{{"v", 0}};
  CHECK(Expr::parse("grid(v, -9, 9, 101)").eval(s) == -9.0);
  s["v"] = 100;
  CHECK(Expr::parse("grid(v, -9, 9, 101)").eval(s) == 9.0);
  s["v"] = 50;
  CHECK(Expr::parse("grid(v, -9, 9, 101)").eval(s) == Catch::Approx(0.0));
}

TEST_CASE("free variables are reported for dependency audits") {
  auto e = Expr::parse("select(call, q0, q1) + grid(k, -9, 9, 101)");
  auto vars = e.free_vars();
  CHECK(vars == std::set<std::string>{"call", "q0", "q1", "k"});
  CHECK(Expr::parse("1 + 2").free_vars().empty());
}

TEST_CASE("errors carry positions and names") {
  CHECK_THROWS_AS(Expr::parse("1 +"), ExprError);
  CHECK_THROWS_AS(Expr::parse("foo(1)"), ExprError);
  CHECK_THROWS_AS(Expr::parse("select(1, 2)"), ExprError);
  CHECK_THROWS_AS(Expr::parse("(1 + 2"), ExprError);
  CHECK_THROWS_AS(Expr::parse("1 ~ 2"), ExprError);
  CHECK_THROWS_AS(Expr::parse("a # b"), ExprError);
  CHECK_THROWS_AS(Expr::parse("x").eval(Scope{}), EvalError);
  CHECK_THROWS_AS(Expr::parse("1/0").eval(Scope{}), EvalError);
}

TEST_CASE("comparisons do not chain") {
  CHECK_THROWS_AS(Expr::parse("1 < 2 < 3"), ExprError);
}
