#include "sqldebug/instance.hpp"

#include "sqldebug/span.hpp"

namespace sqldebug {

std::string_view to_string(TaskType type) { return type == TaskType::syntax ? "syntax" : "semantic"; }

TaskType parse_task_type(std::string_view text) {
  if (text == "syntax") return TaskType::syntax;
  if (text == "semantic") return TaskType::semantic;
  throw Error("task_type must be 'syntax' or 'semantic', got '" + std::string(text) + "'");
}

}  // namespace sqldebug
