#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "geodyn/error.hpp"
#include "geodyn/expr.hpp"

using namespace geodyn;

namespace {

double eval2(const std::string& text, double t, double x1, double x2, double v1, double v2) {
  const double vars[5] = {t, x1, x2, v1, v2};
  return Expression::parse(text, 2).eval(vars);
}

ParseError parse_error(const std::string& text) {
  try {
    parse_system(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for:\n" << text;
  return ParseError(0, 0, "");
}

const char* kKeplerText =
    "# planar Kepler\n"
    "dim = 2\n"
    "structure = constant-mass\n"
    "f1 = -x1/(x1^2+x2^2)^1.5\n"
    "f2 = -x2/(x1^2+x2^2)^1.5\n"
    "singular = 0 0\n";

}  // namespace

TEST(Expression, Arithmetic) {
  EXPECT_DOUBLE_EQ(eval2("1 + 2*3", 0, 0, 0, 0, 0), 7.0);
  EXPECT_DOUBLE_EQ(eval2("(1 + 2)*3", 0, 0, 0, 0, 0), 9.0);
  EXPECT_DOUBLE_EQ(eval2("8/4/2", 0, 0, 0, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(eval2("2^3^2", 0, 0, 0, 0, 0), 512.0);
  EXPECT_DOUBLE_EQ(eval2("-x1^2", 0, 3, 0, 0, 0), -9.0);
  EXPECT_DOUBLE_EQ(eval2("2^-1", 0, 0, 0, 0, 0), 0.5);
  EXPECT_DOUBLE_EQ(eval2("1.5e2 + .5", 0, 0, 0, 0, 0), 150.5);
}

TEST(Expression, VariablesAndFunctions) {
  EXPECT_DOUBLE_EQ(eval2("t*v2 + x2", 2.0, 0.0, 0.5, 0.0, 1.5), 3.5);
  EXPECT_DOUBLE_EQ(eval2("sqrt(x1^2 + x2^2)", 0, 3, 4, 0, 0), 5.0);
  EXPECT_DOUBLE_EQ(eval2("abs(v1)", 0, 0, 0, -2, 0), 2.0);
  EXPECT_NEAR(eval2("sin(pi/2) + cos(0) + exp(0) + log(1)", 0, 0, 0, 0, 0), 3.0, 1e-15);
}

TEST(Expression, ErrorColumns) {
  try {
    Expression::parse("x1 + * 2", 2, 4, 5);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_EQ(e.column(), 11);
  }
  EXPECT_THROW(Expression::parse("x3", 2), ParseError);
  EXPECT_THROW(Expression::parse("foo(1)", 2), ParseError);
  EXPECT_THROW(Expression::parse("(1 + 2", 2), ParseError);
  EXPECT_THROW(Expression::parse("1 2", 2), ParseError);
  EXPECT_THROW(Expression::parse("", 2), ParseError);
}

TEST(SystemFile, ParsesKepler) {
  const SecondOrderSystem sys = parse_system(kKeplerText, "kepler-file");
  EXPECT_EQ(sys.n, 2);
  EXPECT_EQ(sys.structure, Structure::ConstantMass);
  ASSERT_EQ(sys.singular_points.size(), 1u);
  VectorXd x(2), v(2);
  x << 0.4, 0.0;
  v << 0.0, 2.0;
  EXPECT_NEAR(sys.force(0.0, x, v)(0), -6.25, 1e-12);
  EXPECT_EQ(sys.mass(0.0, x, v), MatrixXd::Identity(2, 2));
  EXPECT_TRUE(check_system(sys, sample_cloud(sys), CheckOptions{}).pass);
}

TEST(SystemFile, MatchesBuiltinVerdicts) {
  const SecondOrderSystem damped = parse_system("dim = 1\nstructure = constant-mass\nf1 = -x1 - v1\n");
  const CheckReport r = check_system(damped, sample_cloud(damped), CheckOptions{});
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.condition("a").residual, 2.0, 1e-6);

  const SecondOrderSystem rel = parse_system(
      "dim = 2\nstructure = velocity-mass\n"
      "M11 = 1/sqrt(1 - v1^2 - v2^2)\nM22 = 1/sqrt(1 - v1^2 - v2^2)\n"
      "f1 = -x1/(x1^2+x2^2)^1.5\nf2 = -x2/(x1^2+x2^2)^1.5\n"
      "singular = 0 0\nspeed_limit = 0.9\nv_range = -0.7 0.7\n");
  EXPECT_TRUE(check_system(rel, sample_cloud(rel), CheckOptions{}).pass);
}

TEST(SystemFile, MassMirrorsTranspose) {
  const SecondOrderSystem sys = parse_system("dim = 2\nM12 = 0.25\nf1 = 0\nf2 = 0\n");
  const MatrixXd M = sys.mass(0.0, VectorXd::Zero(2), VectorXd::Zero(2));
  EXPECT_EQ(M(0, 1), 0.25);
  EXPECT_EQ(M(1, 0), 0.25);
  EXPECT_EQ(M(0, 0), 1.0);
}

TEST(SystemFile, ErrorsCarryLineAndColumn) {
  ParseError e = parse_error("dim = 2\nf1 = x1 +\nf2 = 0\n");
  EXPECT_EQ(e.line(), 2);
  EXPECT_EQ(e.column(), 10);

  e = parse_error("dim = 2\nf1 = 0\n  colour = red\nf2 = 0\n");
  EXPECT_EQ(e.line(), 3);
  EXPECT_EQ(e.column(), 3);

  e = parse_error("f1 = 0\n");
  EXPECT_EQ(e.line(), 1);

  e = parse_error("dim = 2\nf1 = 0\n");
  EXPECT_EQ(e.line(), 3);

  e = parse_error("dim = 9\n");
  EXPECT_EQ(e.line(), 1);
  EXPECT_EQ(e.column(), 7);

  e = parse_error("dim = 1\nf1 = -x1\nx_range = 3 -3\n");
  EXPECT_EQ(e.line(), 3);
}

TEST(SystemFile, LoadFromDisk) {
  const std::string path = ::testing::TempDir() + "geodyn_kepler_system.txt";
  {
    std::ofstream f(path);
    f << kKeplerText;
  }
  EXPECT_EQ(load_system_file(path).n, 2);
  std::remove(path.c_str());
  EXPECT_THROW(load_system_file(path), Error);
}
