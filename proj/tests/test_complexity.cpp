#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "sqldebug/complexity.hpp"
#include "sqldebug/parser.hpp"

using namespace sqldebug;

namespace {

SyntaxTree parse(const std::string& sql) { return parse_script(SqlScript(sql)); }

}  // namespace

TEST(AstDepth, SingleNodeTree) {
  const SyntaxTree tree = parse_recovering(SqlScript("")).tree;
  EXPECT_EQ(ast_depth(tree), 1);
  EXPECT_EQ(ast_width(tree), 1);
}

TEST(AstDepth, SimpleSelect) { EXPECT_EQ(ast_depth(parse("SELECT a FROM t")), 5); }

TEST(AstDepth, DerivedTableAddsAtLeastThree) {
  const int flat = ast_depth(parse("SELECT a FROM t"));
  const int nested = ast_depth(parse("SELECT a FROM (SELECT a FROM t) s"));
  EXPECT_GE(nested - flat, 3);
}

TEST(AstWidth, SimpleSelect) { EXPECT_EQ(ast_width(parse("SELECT a FROM t")), 2); }

// The three ColRefs share a level with the TableRef under From.
TEST(AstWidth, ThreeColumns) { EXPECT_EQ(ast_width(parse("SELECT a,b,c FROM t")), 4); }

TEST(Profile, SelectOne) {
  const ComplexityProfile p = profile(SqlScript("SELECT 1"), ProfilerConfig{1.0, 0.1, 0.0});
  // Script -> Query -> Select -> ProjList -> Literal.
  EXPECT_EQ(p.depth, 5);
  EXPECT_EQ(p.width, 1);
  EXPECT_EQ(p.lines, 1);
  EXPECT_EQ(p.tokens, 2);
  EXPECT_EQ(p.functions, 0);
  EXPECT_DOUBLE_EQ(p.composite, 6.1);
}

TEST(Profile, LinesOnlyWeighting) {
  for (const auto& [name, script] : fixtures::reference_scripts()) {
    const ComplexityProfile p = profile(script, ProfilerConfig{0.0, 1.0, 0.0});
    EXPECT_DOUBLE_EQ(p.composite, p.lines) << name;
  }
}

TEST(Profile, CompositeIsLinearInEachTerm) {
  const SqlScript script = fixtures::reference_scripts().front().second;
  const ComplexityProfile base = profile(script);
  for (double alpha : {0.0, 1.0}) {
    for (double beta : {0.0, 1.0}) {
      if (alpha + beta == 0.0) continue;
      const ComplexityProfile p = profile(script, ProfilerConfig{alpha, beta, 0.0});
      EXPECT_DOUBLE_EQ(p.composite, alpha * (base.depth + base.width) + beta * base.lines);
    }
  }
}

TEST(Profile, CountsFunctionsTokensAndNonEmptyLines) {
  const ComplexityProfile p = profile(SqlScript("-- header\n\nSELECT upper(b), count(*)\n\n  FROM t\n"));
  EXPECT_EQ(p.functions, 2);
  EXPECT_EQ(p.lines, 3);
  EXPECT_EQ(p.tokens, 12);
}

TEST(Profile, ParseFailurePropagates) { EXPECT_THROW(profile(SqlScript("SELECT FROM t")), ParseFailure); }

TEST(Profile, BoundsByNodeCount) {
  for (const auto& [name, script] : fixtures::reference_scripts()) {
    const SyntaxTree tree = parse_script(script);
    EXPECT_GE(ast_depth(tree), 1);
    EXPECT_LE(ast_depth(tree), static_cast<int>(tree.size())) << name;
    EXPECT_LE(ast_width(tree), static_cast<int>(tree.size())) << name;
  }
}

TEST(Profile, MonotoneUnderSourceGrowth) {
  const std::string base = "SELECT a FROM t WHERE a > 1";
  const std::string grown = base + "\n  AND b < 2";
  const ComplexityProfile a = profile(SqlScript(base));
  const ComplexityProfile b = profile(SqlScript(grown));
  EXPECT_GE(b.depth, a.depth);
  EXPECT_GE(b.width, a.width);
  EXPECT_GE(b.lines, a.lines);
  EXPECT_GE(b.composite, a.composite);
}

TEST(PassesThreshold, StrictInequality) {
  ComplexityProfile p;
  p.composite = 5.1;
  EXPECT_FALSE(passes_threshold(p, ProfilerConfig{1.0, 0.1, 5.1}));
  EXPECT_TRUE(passes_threshold(p, ProfilerConfig{1.0, 0.1, 5.0}));
  EXPECT_TRUE(passes_threshold(p, ProfilerConfig{1.0, 0.1, -1.0}));
  EXPECT_TRUE(passes_threshold(ComplexityProfile{}, ProfilerConfig{1.0, 0.1, -1.0}));
}

TEST(ProfilerConfig, RejectsDegenerateWeights) {
  EXPECT_THROW((ProfilerConfig{0.0, 0.0, 0.0}.check()), Error);
  EXPECT_THROW((ProfilerConfig{-1.0, 1.0, 0.0}.check()), Error);
  EXPECT_NO_THROW((ProfilerConfig{}.check()));
}
