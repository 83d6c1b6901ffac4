#include "sqldebug/complexity.hpp"

#include <algorithm>
#include <cctype>

#include "sqldebug/parser.hpp"

namespace sqldebug {

void ProfilerConfig::check() const {
  if (alpha < 0 || beta < 0 || alpha + beta <= 0) {
    throw Error("profiler weights must be non-negative with alpha + beta > 0");
  }
}

namespace {

std::vector<int> level_counts(const SyntaxTree& tree) {
  std::vector<int> counts;
  if (tree.empty()) return counts;
  std::vector<NodeId> level{tree.root()};
  while (!level.empty()) {
    counts.push_back(static_cast<int>(level.size()));
    std::vector<NodeId> next;
    for (NodeId id : level) {
      const auto& kids = tree[id].children;
      next.insert(next.end(), kids.begin(), kids.end());
    }
    level = std::move(next);
  }
  return counts;
}

}  // namespace

int ast_depth(const SyntaxTree& tree) { return static_cast<int>(level_counts(tree).size()); }

int ast_width(const SyntaxTree& tree) {
  const auto counts = level_counts(tree);
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

int count_lines(std::string_view text) {
  int lines = 0;
  bool content = false;
  for (char c : text) {
    if (c == '\n') {
      lines += content ? 1 : 0;
      content = false;
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      content = true;
    }
  }
  return lines + (content ? 1 : 0);
}

ComplexityProfile profile(const SqlScript& script, const ProfilerConfig& config,
                          const Catalog* /*catalog*/) {
  config.check();
  const SyntaxTree tree = parse_script(script);
  ComplexityProfile p;
  p.depth = ast_depth(tree);
  p.width = ast_width(tree);
  p.lines = count_lines(script.text);
  for (const Token& t : tokenize(script.text)) p.tokens += t.is_trivia() ? 0 : 1;
  for (NodeId id = 0; id < tree.size(); ++id) {
    p.functions += tree[id].kind == NodeKind::FunctionCall ? 1 : 0;
  }
  p.composite = config.alpha * (p.depth + p.width) + config.beta * p.lines;
  return p;
}

bool passes_threshold(const ComplexityProfile& profile, const ProfilerConfig& config) {
  return profile.composite > config.tau;
}

}  // namespace sqldebug
