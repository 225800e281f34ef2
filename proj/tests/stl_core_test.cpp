#include <gtest/gtest.h>

#include <filesystem>

#include "oracle.hpp"
#include "rmstl/rmstl.hpp"

using namespace rmstl;
using namespace rmstl::stl;

namespace {

VariableTable xy() { return {{"x", -5, 5}, {"y", -5, 5}}; }

ArithExpr var(const VariableTable& v, const std::string& name) { return ArithExpr::variable(*v.find(name), name); }

}  // namespace

TEST(Parse, PredicateIsNormalizedAgainstZero) {
  auto vars = xy();
  auto f = parse_formula("x > 0.5", vars);
  ASSERT_EQ(f.kind(), FormulaKind::Predicate);
  EXPECT_EQ(f.comparison(), Comparison::Greater);
  EXPECT_EQ(f.expr(), ArithExpr::sub(var(vars, "x"), ArithExpr::constant(0.5)));
}

TEST(Parse, ZeroRightHandSideIsKeptAsIs) {
  auto vars = xy();
  auto f = parse_formula("x < 0", vars);
  EXPECT_EQ(f.expr(), var(vars, "x"));
  EXPECT_EQ(f.comparison(), Comparison::Less);
}

TEST(Parse, NestedTemporalOperators) {
  VariableTable vars{{"x", -2.4, 2.4}};
  auto f = parse_formula("ev_[100,200] (alw_[0,300] (x < 0))", vars);
  ASSERT_EQ(f.kind(), FormulaKind::Eventually);
  EXPECT_EQ(f.interval(), (StepInterval{100, 200}));
  ASSERT_EQ(f.left().kind(), FormulaKind::Always);
  EXPECT_EQ(f.left().interval(), (StepInterval{0, 300}));
  EXPECT_EQ(f.left().left(), Formula::predicate(var(vars, "x"), Comparison::Less));
}

TEST(Parse, AbsConjunction) {
  VariableTable vars{{"x1", -10, 10}, {"y1", -10, 10}};
  auto f = parse_formula("abs(x1) < 0.1 and abs(y1) < 0.1", vars);
  ASSERT_EQ(f.kind(), FormulaKind::And);
  EXPECT_EQ(f.left().kind(), FormulaKind::Predicate);
  EXPECT_EQ(f.right().kind(), FormulaKind::Predicate);
  EXPECT_EQ(f.left().expr(), ArithExpr::sub(ArithExpr::abs(var(vars, "x1")), ArithExpr::constant(0.1)));
}

TEST(Parse, Precedence) {
  auto vars = xy();
  auto f = parse_formula("x > 0 or y > 0 and not x > 1", vars);
  ASSERT_EQ(f.kind(), FormulaKind::Or);
  ASSERT_EQ(f.right().kind(), FormulaKind::And);
  EXPECT_EQ(f.right().right().kind(), FormulaKind::Not);

  auto u = parse_formula("x > 0 or y > 0 until_[0,2] x > 1 and y > 1", vars);
  ASSERT_EQ(u.kind(), FormulaKind::Until);
  EXPECT_EQ(u.left().kind(), FormulaKind::Or);
  EXPECT_EQ(u.right().kind(), FormulaKind::And);
}

TEST(Parse, ParenthesizedArithmeticAndFormula) {
  auto vars = xy();
  auto a = parse_formula("(x + y) * 2 > 1", vars);
  EXPECT_EQ(a.kind(), FormulaKind::Predicate);
  auto b = parse_formula("(x > 1 or y > 1) and x < 3", vars);
  EXPECT_EQ(b.kind(), FormulaKind::And);
  EXPECT_EQ(b.left().kind(), FormulaKind::Or);
}

TEST(Parse, SyntaxErrorAtEndOfInput) {
  auto vars = xy();
  try {
    parse_formula("x >", vars);
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 3u);
    EXPECT_EQ(e.found(), "end of input");
  }
}

TEST(Parse, Errors) {
  auto vars = xy();
  EXPECT_THROW(parse_formula("z > 0", vars), UnknownVariable);
  EXPECT_THROW(parse_formula("ev_[3,2] x > 0", vars), EmptyInterval);
  EXPECT_THROW(parse_formula("ev_[0,1.5] x > 0", vars), SyntaxError);
  EXPECT_THROW(parse_formula("x > 0 and", vars), SyntaxError);
  EXPECT_THROW(parse_formula("x > 0 )", vars), SyntaxError);
  EXPECT_THROW(parse_formula("x $ 0", vars), SyntaxError);
  EXPECT_THROW(parse_formula("", vars), SyntaxError);
  EXPECT_THROW(parse_formula("x > 0", VariableTable{}), Error);
}

TEST(Parse, EqualityIsAcceptedSyntactically) {
  auto vars = xy();
  EXPECT_EQ(parse_formula("x == 1", vars).comparison(), Comparison::Equal);
  EXPECT_EQ(parse_formula("x != 1", vars).comparison(), Comparison::NotEqual);
}

TEST(Parse, DefinitionsAreInlined) {
  auto vars = xy();
  FormulaDefinitions defs;
  defs.emplace("near", parse_formula("abs(x) < 1", vars));
  auto f = parse_formula("alw_[0,2] near", vars, &defs);
  ASSERT_EQ(f.kind(), FormulaKind::Always);
  EXPECT_EQ(f.left(), defs.at("near"));
}

TEST(RoundTrip, RandomFormulas) {
  auto vars = xy();
  oracle::FormulaGen gen(11);
  for (int i = 0; i < 2000; ++i) {
    auto f = gen.formula(4);
    auto text = f.to_string();
    EXPECT_EQ(parse_formula(text, vars), f) << text;
  }
}

TEST(RoundTrip, FixtureCorpus) {
  std::size_t checked = 0;
  for (const auto& e : std::filesystem::directory_iterator(RMSTL_FIXTURES)) {
    auto name = e.path().filename().string();
    if (name.starts_with("learner-")) continue;
    auto spec = runtime::load_task_spec_file(e.path().string());
    for (const auto& f : spec.formulas) {
      EXPECT_EQ(parse_formula(f.formula.to_string(), spec.variables), f.formula) << name << ": " << f.name;
      ++checked;
    }
  }
  EXPECT_GT(checked, 20u);
}

TEST(Horizon, Examples) {
  VariableTable vars{{"vx_ego", 0, 40}, {"x", -1, 1}};
  EXPECT_EQ(formula_horizon(parse_formula("vx_ego > 25", vars)), 0);
  EXPECT_EQ(formula_horizon(parse_formula("alw_[0,10] x > 0", vars)), 10);
  EXPECT_EQ(formula_horizon(parse_formula("ev_[0,85] alw_[0,15] vx_ego > 25", vars)), 100);
  EXPECT_EQ(formula_horizon(parse_formula("ev_[100,200] alw_[0,300] x < 0", vars)), 500);
  EXPECT_EQ(formula_horizon(parse_formula("alw_[0,3] x > 0 until_[1,4] ev_[2,2] x > 0", vars)), 7);
  EXPECT_EQ(formula_horizon(parse_formula("alw_[0,3] x > 0 and ev_[0,5] x < 0", vars)), 5);
}

TEST(Signal, AppendReturnsIndex) {
  Signal s(xy());
  EXPECT_EQ(s.append({0.0, 0.0}), 0u);
  s.append({1.0, 1.0});
  s.append({2.0, 2.0});
  EXPECT_EQ(s.append({3.0, 3.0}), 3u);
  EXPECT_EQ(s.length(), 4u);
}

TEST(Signal, ClampsOutOfBoundSamples) {
  Signal s(VariableTable{{"x", -2.4, 2.4}});
  s.append({3.0});
  s.append({1.0});
  EXPECT_EQ(s.at(0, 0), 2.4);
  EXPECT_TRUE(s.clamped(0));
  EXPECT_FALSE(s.clamped(1));
}

TEST(Signal, DimensionMismatch) {
  Signal s(xy());
  EXPECT_THROW(s.append({1.0}), DimensionMismatch);
}

TEST(Signal, PiecewiseConstantValue) {
  Signal s(VariableTable{{"x", -10, 10}});
  s.append({1.0});
  s.append({2.0});
  EXPECT_EQ(s.value("x", 0.0), 1.0);
  EXPECT_EQ(s.value("x", 0.9), 1.0);
  EXPECT_EQ(s.value("x", 1.0), 2.0);
  EXPECT_THROW(s.value("x", 2.0), OutOfRecordedRange);
  EXPECT_THROW(s.value("x", -0.1), OutOfRecordedRange);
  EXPECT_THROW(s.value("q", 0.0), UnknownVariable);
}

TEST(Signal, DefaultBounds) {
  VariableTable v;
  v.add("z");
  EXPECT_EQ(v[0].lo, -kDefaultBound);
  EXPECT_EQ(v[0].hi, kDefaultBound);
}

TEST(Arith, RangeEnclosesSamples) {
  auto vars = xy();
  oracle::FormulaGen gen(5);
  std::uniform_real_distribution<double> u(-5, 5);
  auto bounds = vars.bounds();
  for (int i = 0; i < 500; ++i) {
    auto p = gen.predicate();
    auto r = p.expr().eval_range(bounds);
    for (int k = 0; k < 50; ++k) {
      std::vector<double> s{u(gen.rng()), u(gen.rng())};
      double v = p.expr().eval(s);
      EXPECT_LE(r.lo, v);
      EXPECT_GE(r.hi, v);
      EXPECT_EQ(v, oracle::arith(p.expr(), s));
    }
  }
}
