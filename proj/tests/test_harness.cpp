#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "sqldebug/harness.hpp"

using namespace sqldebug;
using nlohmann::json;

namespace {

std::string jsonl(const std::vector<BenchmarkInstance>& instances) {
  std::string out;
  for (const BenchmarkInstance& i : instances) out += to_json(i).dump() + "\n";
  return out;
}

std::vector<BenchmarkInstance> parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_instances(in, "mem");
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

const BenchmarkInstance& first_of(TaskType type) {
  for (const BenchmarkInstance& i : fixtures::instance_suite()) {
    if (i.task_type == type) return i;
  }
  throw std::runtime_error("no instance of that type");
}

}  // namespace

TEST(Instances, JsonRoundTrip) {
  for (const BenchmarkInstance& i : fixtures::instance_suite()) {
    const json o = to_json(i);
    EXPECT_EQ(o["schema_version"], 1);
    EXPECT_EQ(instance_from_json(o), i) << i.instance_id;
  }
}

TEST(Instances, TwoLineFile) {
  const auto got = parse_text(jsonl({first_of(TaskType::syntax), first_of(TaskType::semantic)}));
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].instance_id, first_of(TaskType::syntax).instance_id);
  EXPECT_EQ(got[1].instance_id, first_of(TaskType::semantic).instance_id);
}

TEST(Instances, MissingReferencesNamesInstanceAndField) {
  json o = to_json(first_of(TaskType::syntax));
  o.erase("reference_sqls");
  EXPECT_EQ(error_of([&] { parse_text(o.dump() + "\n"); }),
            "instance " + first_of(TaskType::syntax).instance_id + ": reference_sqls required");
}

TEST(Instances, SemanticIssueThatFailsLintIsRejected) {
  BenchmarkInstance i = first_of(TaskType::semantic);
  i.issue_sql = "SELECT nope FROM dwd_orders";
  const std::string err = error_of([&] { parse_text(jsonl({i})); });
  EXPECT_NE(err.find("issue_sql"), std::string::npos) << err;
  EXPECT_NE(err.find(i.instance_id), std::string::npos);
}

TEST(Instances, SyntaxIssueThatPassesIsRejected) {
  BenchmarkInstance i = first_of(TaskType::syntax);
  i.issue_sql = i.reference_sqls[0];
  EXPECT_NE(error_of([&] { parse_text(jsonl({i})); }).find("syntax instance"), std::string::npos);
}

TEST(Instances, BrokenReferenceIsRejected) {
  BenchmarkInstance i = first_of(TaskType::semantic);
  i.reference_sqls.push_back("SELECT FROM dwd_orders");
  EXPECT_NE(error_of([&] { parse_text(jsonl({i})); }).find("reference_sqls[1]"), std::string::npos);
}

TEST(Instances, MalformedAndDuplicateLines) {
  EXPECT_NE(error_of([&] { parse_text("{not json}\n"); }).find("mem:1: malformed JSON"), std::string::npos);
  const BenchmarkInstance& i = first_of(TaskType::syntax);
  EXPECT_NE(error_of([&] { parse_text(jsonl({i, i})); }).find("duplicate"), std::string::npos);
  json o = to_json(i);
  o["schema_version"] = 2;
  EXPECT_NE(error_of([&] { parse_text(o.dump()); }).find("schema_version"), std::string::npos);
  o = to_json(i);
  o["taxonomy"] = json::array({"Made up", "x", "y"});
  EXPECT_NE(error_of([&] { parse_text(o.dump()); }).find("taxonomy"), std::string::npos);
}

TEST(Predictions, UniqueDuplicateAndEmpty) {
  std::istringstream three(
      R"({"instance_id":"a","predict_sql":"SELECT 1"})" "\n"
      R"({"instance_id":"b","predict_sql":"SELECT 2"})" "\n"
      R"({"instance_id":"c","predict_sql":"SELECT 3"})" "\n");
  EXPECT_EQ(parse_predictions(three, "p").size(), 3u);
  std::istringstream dup(
      R"({"instance_id":"a","predict_sql":"SELECT 1"})" "\n"
      R"({"instance_id":"a","predict_sql":"SELECT 2"})" "\n");
  EXPECT_THROW(parse_predictions(dup, "p"), Error);
  std::istringstream empty("");
  EXPECT_TRUE(parse_predictions(empty, "p").empty());
}

TEST(Predictions, UnknownIdsAreRejected) {
  std::map<std::string, Prediction> preds{{"ghost", Prediction{"ghost", "SELECT 1"}}};
  EXPECT_THROW(check_prediction_ids(preds, fixtures::instance_suite()), Error);
  EXPECT_NO_THROW(check_prediction_ids({}, fixtures::instance_suite()));
}

TEST(Scores, JsonLinesRoundTrip) {
  InstanceScore s{"x-1", true, true, false, 0.0, 0.1, true};
  const TaxonomyPath path{"A", "B", "C"};
  std::istringstream in(to_json(s, path).dump() + "\n");
  const auto records = parse_scores(in, "s");
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].score.instance_id, "x-1");
  EXPECT_TRUE(records[0].score.em);
  EXPECT_FALSE(records[0].score.mb);
  EXPECT_TRUE(records[0].score.fallback_used);
  EXPECT_EQ(records[0].taxonomy, path);
}

TEST(Report, TableShapeAndJson) {
  ScoreReport r;
  r.overall = {469, 100, 171, 200};
  r.per_taxonomy["Grammar & Structure"] = {3, 1, 1, 2};
  const std::string table = format_report(r, true);
  EXPECT_NE(table.find("36.46"), std::string::npos);
  EXPECT_NE(table.find("Grammar & Structure"), std::string::npos);
  EXPECT_NE(table.find("33.33"), std::string::npos);
  EXPECT_EQ(format_report(r, false).find("Grammar & Structure"), std::string::npos);
  const json j = to_json(r);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["n"], 469);
  EXPECT_DOUBLE_EQ(j["gm_pct"].get<double>(), 36.46);
  EXPECT_DOUBLE_EQ(j["per_taxonomy"]["Grammar & Structure"]["em_pct"].get<double>(), 33.33);
}

TEST(Filter, MajorityTruthTableForFiveModels) {
  EXPECT_EQ(majority(5), 3u);
  EXPECT_EQ(classify(0, 5), FilterDecision::review);
  EXPECT_EQ(classify(1, 5), FilterDecision::retain);
  EXPECT_EQ(classify(2, 5), FilterDecision::retain);
  EXPECT_EQ(classify(3, 5), FilterDecision::discard);
  EXPECT_EQ(classify(4, 5), FilterDecision::discard);
  EXPECT_EQ(classify(5, 5), FilterDecision::discard);
}

TEST(Filter, EvenModelCountsNeedStrictMajority) {
  EXPECT_EQ(majority(4), 3u);
  EXPECT_EQ(classify(2, 4), FilterDecision::retain);
  EXPECT_EQ(classify(3, 4), FilterDecision::discard);
  EXPECT_EQ(classify(1, 1), FilterDecision::discard);
  EXPECT_THROW(classify(0, 0), Error);
}

TEST(Filter, PartitionCoversEveryInstanceOnce) {
  OutcomeMatrix m;
  m.models = {"m1", "m2", "m3", "m4", "m5"};
  m.outcomes["easy"] = {true, true, true, true, false};
  m.outcomes["edge"] = {false, true, false, false, false};
  m.outcomes["hard"] = {false, false, false, false, false};
  m.outcomes["split"] = {true, true, false, false, false};
  const FilterPartition p = attack_defense_filter(m);
  EXPECT_EQ(p.discard, std::vector<std::string>{"easy"});
  EXPECT_EQ(p.retain, (std::vector<std::string>{"edge", "split"}));
  EXPECT_EQ(p.review, std::vector<std::string>{"hard"});
  std::set<std::string> all(p.discard.begin(), p.discard.end());
  all.insert(p.retain.begin(), p.retain.end());
  all.insert(p.review.begin(), p.review.end());
  EXPECT_EQ(all.size(), m.outcomes.size());
  EXPECT_EQ(to_json(p)["schema_version"], 1);
}

TEST(Filter, MatrixMustBeRectangular) {
  OutcomeMatrix m;
  EXPECT_THROW(m.check(), Error);
  m.models = {"a", "b"};
  m.outcomes["x"] = {true};
  EXPECT_THROW(m.check(), Error);
}

TEST(Filter, OutcomeMatrixFromScores) {
  auto record = [](std::string id, bool em, bool gm) {
    ScoreRecord r;
    r.score.instance_id = std::move(id);
    r.score.em = em;
    r.score.gm = gm;
    return r;
  };
  const std::vector<std::pair<std::string, std::vector<ScoreRecord>>> per_model = {
      {"alpha", {record("i1", false, true), record("i2", false, false)}},
      {"beta", {record("i1", true, true)}},
  };
  const OutcomeMatrix gm = outcome_matrix(per_model, SuccessMetric::gm);
  EXPECT_EQ(gm.models, (std::vector<std::string>{"alpha", "beta"}));
  EXPECT_EQ(gm.outcomes.at("i1"), (std::vector<bool>{true, true}));
  EXPECT_EQ(gm.outcomes.at("i2"), (std::vector<bool>{false, false}));
  const OutcomeMatrix em = outcome_matrix(per_model, SuccessMetric::em);
  EXPECT_EQ(em.outcomes.at("i1"), (std::vector<bool>{false, true}));
  EXPECT_EQ(parse_success_metric("em"), SuccessMetric::em);
  EXPECT_THROW(parse_success_metric("bleu"), Error);
}

TEST(InstanceFromInjection, CarriesClassSpecificContext) {
  const BenchmarkInstance& syn = first_of(TaskType::syntax);
  EXPECT_FALSE(syn.error_message.empty());
  EXPECT_TRUE(syn.user_query.empty());
  const BenchmarkInstance& sem = first_of(TaskType::semantic);
  EXPECT_TRUE(sem.error_message.empty());
  EXPECT_NE(sem.user_query.find("results look wrong"), std::string::npos);
  EXPECT_NO_THROW(check_instance(syn));
  EXPECT_NO_THROW(check_instance(sem));
}
