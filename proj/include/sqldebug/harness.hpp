#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sqldebug/injector.hpp"
#include "sqldebug/instance.hpp"
#include "sqldebug/metrics.hpp"

namespace sqldebug {

/// Version stamped on every JSON object the toolkit writes.
constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const BenchmarkInstance& instance);
nlohmann::json to_json(const InstanceScore& score, const TaxonomyPath& taxonomy);
nlohmann::json to_json(const ScoreReport& report);

/// Field-checked decoding; errors name the instance and the field.
BenchmarkInstance instance_from_json(const nlohmann::json& object);

/// Benchmark invariants: the DDL loads, every reference validates clean,
/// syntax issues fail validation and semantic issues pass it.
void check_instance(const BenchmarkInstance& instance);

/// Reads and fully checks a JSONL instance file, in file order.
std::vector<BenchmarkInstance> read_instances(const std::filesystem::path& path);
std::vector<BenchmarkInstance> parse_instances(std::istream& in, const std::string& source_name);

/// Reads predictions keyed by instance id; duplicates are an error.
std::map<std::string, Prediction> read_predictions(const std::filesystem::path& path);
std::map<std::string, Prediction> parse_predictions(std::istream& in, const std::string& source_name);

/// Rejects predictions whose id is not an instance id.
void check_prediction_ids(const std::map<std::string, Prediction>& predictions,
                          const std::vector<BenchmarkInstance>& instances);

/// A per-instance score line as written by `score`.
struct ScoreRecord {
  InstanceScore score;
  TaxonomyPath taxonomy;
};
std::vector<ScoreRecord> read_scores(const std::filesystem::path& path);
std::vector<ScoreRecord> parse_scores(std::istream& in, const std::string& source_name);

/// Two-decimal text table: overall row, plus one row per level1 when
/// `by_taxonomy` is set.
std::string format_report(const ScoreReport& report, bool by_taxonomy);

// ----------------------------------------------------- attack-defense filter

enum class FilterDecision { discard, retain, review };
std::string_view to_string(FilterDecision decision);

/// Strictly more than half: floor(m / 2) + 1.
std::size_t majority(std::size_t models);

/// s >= majority -> discard; 1 <= s < majority -> retain; s == 0 -> review.
FilterDecision classify(std::size_t successes, std::size_t models);

/// Per instance, one success flag per model.
struct OutcomeMatrix {
  std::vector<std::string> models;
  std::map<std::string, std::vector<bool>> outcomes;

  /// Throws Error unless there is at least one model and every vector has
  /// one entry per model.
  void check() const;
};

enum class SuccessMetric { em, gm };
SuccessMetric parse_success_metric(std::string_view text);

/// Builds the matrix from one score list per model; an instance missing from
/// a model's scores counts as a failure for that model.
OutcomeMatrix outcome_matrix(const std::vector<std::pair<std::string, std::vector<ScoreRecord>>>& per_model,
                             SuccessMetric metric);

struct FilterPartition {
  std::vector<std::string> discard;
  std::vector<std::string> retain;
  std::vector<std::string> review;
};

FilterPartition attack_defense_filter(const OutcomeMatrix& outcomes);
nlohmann::json to_json(const FilterPartition& partition);

/// Placeholder bug report for semantic instances.
std::string templated_user_query(const std::string& description);

/// Benchmark record for an accepted injection: syntax instances carry the
/// validator's first error message, semantic ones a templated user query.
BenchmarkInstance instance_from_injection(std::string instance_id, const InjectionResult& result,
                                          const MutationOperator& op, const SqlScript& reference,
                                          std::vector<std::string> ddl, std::string domain);

}  // namespace sqldebug
