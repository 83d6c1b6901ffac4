#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "injector_checks.hpp"
#include "sqldebug/injector.hpp"
#include "sqldebug/metrics.hpp"
#include "sqldebug/parser.hpp"

using namespace sqldebug;

namespace {

FeatureSet features_of(const std::string& sql) {
  return structural_profile(parse_script(SqlScript(sql)), &fixtures::schema_catalog());
}

std::vector<std::string> ids(const std::vector<const MutationOperator*>& ops) {
  std::vector<std::string> out;
  for (const auto* op : ops) out.push_back(op->id);
  return out;
}

const char* kUnionSql =
    "SELECT user_id FROM dwd_orders WHERE channel = 'app'\n"
    "UNION ALL\n"
    "SELECT user_id FROM dwd_orders WHERE channel = 'web'";

const char* kCaseSql =
    "SELECT order_id,\n"
    "       CASE WHEN amount > 100 THEN 'high' ELSE 'low' END AS band\n"
    "FROM dwd_orders";

const char* kLeftJoinSql =
    "SELECT u.user_id, o.order_id\n"
    "FROM dim_users u\n"
    "LEFT JOIN dwd_orders o ON u.user_id = o.user_id";

}  // namespace

TEST(StructuralProfile, WindowFlag) {
  EXPECT_TRUE(features_of("SELECT order_id, row_number() OVER (ORDER BY amount) FROM dwd_orders").has_window);
}

TEST(StructuralProfile, SelectOneHasNoFeatures) {
  const FeatureSet f = features_of("SELECT 1");
  EXPECT_FALSE(f.has_case || f.has_union_all || f.has_lateral_view || f.has_window || f.has_group_by ||
               f.has_insert || f.has_cte || f.has_distinct || f.has_cast || f.has_like);
  EXPECT_TRUE(f.functions.empty());
  EXPECT_TRUE(f.joins.empty());
  EXPECT_EQ(f.statements, 1u);
}

TEST(StructuralProfile, CountsLeftJoins) {
  const FeatureSet f = features_of(
      "SELECT u.user_id FROM dim_users u LEFT JOIN dwd_orders o ON u.user_id = o.user_id "
      "LEFT JOIN dwd_payments p ON o.order_id = p.order_id");
  EXPECT_EQ(f.joins, (std::map<std::string, std::size_t>{{"LEFT", 2}}));
}

TEST(StructuralProfile, Deterministic) {
  for (const auto& [name, script] : fixtures::reference_scripts()) {
    const SyntaxTree t = parse_script(script);
    EXPECT_EQ(structural_profile(t, &fixtures::schema_catalog()), structural_profile(t, &fixtures::schema_catalog()));
  }
}

TEST(CandidateBugs, ZeroK) {
  EXPECT_TRUE(candidate_bugs(features_of(kUnionSql), TaxonomyRegistry::standard(), 0).empty());
}

TEST(CandidateBugs, OnlyApplicableOperatorsAreRanked) {
  FeatureSet f;
  f.has_case = true;
  f.has_union_all = true;
  f.operator_sites = {{"case_missing_end", 1}, {"union_all_to_union", 1}};
  auto got = ids(candidate_bugs(f, TaxonomyRegistry::standard(), 2));
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (std::vector<std::string>{"case_missing_end", "union_all_to_union"}));
}

TEST(CandidateBugs, NothingApplicable) {
  EXPECT_TRUE(candidate_bugs(FeatureSet{}, TaxonomyRegistry::standard(), 5).empty());
}

TEST(CandidateBugs, ClassFilterAndTruncation) {
  const FeatureSet f = features_of(kUnionSql);
  const auto semantic = candidate_bugs(f, TaxonomyRegistry::standard(), 10, TaskType::semantic);
  for (const auto* op : semantic) EXPECT_EQ(op->bug_class, TaskType::semantic);
  EXPECT_LE(candidate_bugs(f, TaxonomyRegistry::standard(), 2).size(), 2u);
  EXPECT_EQ(ids(candidate_bugs(f, TaxonomyRegistry::standard(), 3)),
            ids(candidate_bugs(f, TaxonomyRegistry::standard(), 3)));
}

TEST(Inject, UnionAllToUnion) {
  const InjectionResult r = inject(SqlScript(kUnionSql), find_operator("union_all_to_union"), fixtures::schema_catalog());
  EXPECT_EQ(r.bug_class, TaskType::semantic);
  EXPECT_EQ(r.taxonomy, tax::union_misuse());
  EXPECT_TRUE(r.diagnostics.empty());
  EXPECT_EQ(r.issue_sql.text.find("UNION ALL"), std::string::npos);
  EXPECT_FALSE(graph_match(r.issue_sql, {SqlScript(kUnionSql)}, fixtures::schema_catalog()));
}

TEST(Inject, CaseMissingEnd) {
  const InjectionResult r = inject(SqlScript(kCaseSql), find_operator("case_missing_end"), fixtures::schema_catalog());
  EXPECT_EQ(r.bug_class, TaskType::syntax);
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.diagnostics[0].taxonomy, tax::case_missing_end());
  EXPECT_EQ(r.issue_sql.text.find(" END"), std::string::npos);
}

TEST(Inject, LeftJoinToInner) {
  const InjectionResult r =
      inject(SqlScript(kLeftJoinSql), find_operator("left_join_to_inner"), fixtures::schema_catalog());
  EXPECT_EQ(r.bug_class, TaskType::semantic);
  EXPECT_EQ(r.taxonomy, tax::inner_instead_of_left());
  EXPECT_TRUE(r.diagnostics.empty());
  EXPECT_LE(r.edit_distance_to_reference(), kDefaultBudget);
}

TEST(Inject, NoSiteIsAnError) {
  EXPECT_THROW(inject(SqlScript("SELECT 1"), find_operator("union_all_to_union"), fixtures::schema_catalog()), Error);
}

TEST(Inject, TinyBudgetRejectsEverySite) {
  EXPECT_THROW(inject(SqlScript(kCaseSql), find_operator("case_missing_end"), fixtures::schema_catalog(), 0.0001),
               Error);
}

TEST(FindOperator, UnknownIdThrows) { EXPECT_THROW(find_operator("no_such_operator"), Error); }

TEST(VerifyInjection, AcceptsAValidSyntaxInjection) {
  const SqlScript ref(kCaseSql);
  const InjectionResult r = inject(ref, find_operator("case_missing_end"), fixtures::schema_catalog());
  const Verification v = verify_injection(r, ref, fixtures::schema_catalog());
  EXPECT_TRUE(v.ok);
  EXPECT_EQ(v.reason, "ok");
}

TEST(VerifyInjection, EquivalentRewriteHasNoSemanticEffect) {
  const SqlScript ref("SELECT order_id FROM dwd_orders WHERE amount > 10 AND status = 'paid'");
  InjectionResult r;
  r.operator_id = "swap";
  r.bug_class = TaskType::semantic;
  r.taxonomy = tax::incorrect_output();
  const std::string from = "amount > 10 AND status = 'paid'";
  const std::size_t at = ref.text.find(from);
  r.site_span = {at, at + from.size()};
  r.replacement = "status = 'paid' AND amount > 10";
  r.issue_sql = SqlScript(apply_edit(ref.text, {r.site_span, r.replacement}));
  // A generous budget so the semantic check is what rejects the swap.
  const Verification v = verify_injection(r, ref, fixtures::schema_catalog(), 1.0);
  EXPECT_FALSE(v.ok);
  EXPECT_EQ(v.reason, "no semantic effect");
}

TEST(VerifyInjection, TouchingACommentIsRejected) {
  const SqlScript ref("-- keep me\nSELECT order_id FROM dwd_orders WHERE amount > 10");
  InjectionResult r;
  r.operator_id = "comment";
  r.bug_class = TaskType::semantic;
  r.taxonomy = tax::incorrect_output();
  r.site_span = {3, 7};
  r.replacement = "drop";
  r.issue_sql = SqlScript(apply_edit(ref.text, {r.site_span, r.replacement}));
  const Verification v = verify_injection(r, ref, fixtures::schema_catalog());
  EXPECT_FALSE(v.ok);
  EXPECT_EQ(v.reason, "comment modified");
}

TEST(VerifyInjection, SpliceMismatchIsRejected) {
  const SqlScript ref(kCaseSql);
  InjectionResult r = inject(ref, find_operator("case_missing_end"), fixtures::schema_catalog());
  r.issue_sql.text += " ";
  EXPECT_EQ(verify_injection(r, ref, fixtures::schema_catalog()).reason, "bytes outside the site changed");
}

TEST(ApplyEdit, Splices) {
  EXPECT_EQ(apply_edit("SELECT a FROM t", {{7, 8}, "b"}), "SELECT b FROM t");
  EXPECT_EQ(apply_edit("abc", {{3, 3}, "d"}), "abcd");
}

TEST(RoundTrip, EveryOperatorOnTheCorpus) {
  const injector_checks::RoundTrip r = injector_checks::run();
  EXPECT_GE(r.operators, 16u);
  EXPECT_GE(r.injections, 60u);
  EXPECT_LE(r.max_distance, kDefaultBudget);
  for (const auto& f : r.failures) ADD_FAILURE() << f;
  for (const auto& id : r.unused) ADD_FAILURE() << "operator never injected: " << id;
  for (const auto& l : r.missing_level1) ADD_FAILURE() << "level1 without operator: " << l;
}

TEST(RoundTrip, OperatorsAreRegisteredAndDescribed) {
  std::set<std::string> seen;
  for (const MutationOperator& op : mutation_operators()) {
    EXPECT_TRUE(seen.insert(op.id).second) << op.id;
    EXPECT_TRUE(TaxonomyRegistry::standard().contains(op.taxonomy)) << op.id;
    EXPECT_FALSE(op.description.empty()) << op.id;
  }
}
