#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sqldebug/taxonomy.hpp"

namespace sqldebug {

enum class TaskType { syntax, semantic };

std::string_view to_string(TaskType type);
/// Parses "syntax" / "semantic"; throws Error otherwise.
TaskType parse_task_type(std::string_view text);

/// One benchmark item: a buggy script, its context and accepted fixes.
struct BenchmarkInstance {
  std::string instance_id;
  TaskType task_type = TaskType::syntax;
  std::vector<std::string> ddl;
  std::string issue_sql;
  std::string error_message;  ///< syntax instances
  std::string user_query;     ///< semantic instances
  std::vector<std::string> reference_sqls;
  TaxonomyPath taxonomy;
  std::string domain;

  bool operator==(const BenchmarkInstance&) const = default;
};

struct Prediction {
  std::string instance_id;
  std::string predict_sql;

  bool operator==(const Prediction&) const = default;
};

}  // namespace sqldebug
