#include "sqldebug/syntax_tree.hpp"

#include <array>
#include <sstream>

namespace sqldebug {

std::string_view to_string(NodeKind kind) {
  static constexpr std::array kNames = {
      "Script",      "Comment",      "Raw",         "Query",        "With",
      "Cte",         "SetOp",        "Select",      "Distinct",     "ProjList",
      "Alias",       "Star",         "From",        "TableRef",     "TableAlias",
      "DerivedTable", "Join",        "On",          "LateralView",  "ColumnAlias",
      "Where",       "GroupBy",      "Having",      "OrderBy",      "SortKey",
      "Limit",       "ColRef",       "Literal",     "BinaryOp",     "UnaryOp",
      "FunctionCall", "Over",        "PartitionBy", "Frame",        "Case",
      "When",        "Else",         "Cast",        "InList",       "InSubquery",
      "Between",     "Like",         "IsNull",      "Exists",       "ScalarSubquery",
      "Subscript",   "Insert",       "PartitionSpec", "PartitionItem", "ColumnList",
      "Identifier",  "CreateTable",  "Flag",        "ColumnDef",    "TypeName",
      "TableComment", "PartitionedBy", "TableOptions",
  };
  static_assert(kNames.size() == static_cast<std::size_t>(NodeKind::TableOptions) + 1);
  return kNames[static_cast<std::size_t>(kind)];
}

const Node* SyntaxTree::child(NodeId id, std::size_t i) const {
  const auto& kids = nodes_.at(id).children;
  return i < kids.size() ? &nodes_[kids[i]] : nullptr;
}

long SyntaxTree::find_child(NodeId id, NodeKind kind) const {
  for (NodeId c : nodes_.at(id).children) {
    if (nodes_[c].kind == kind) return static_cast<long>(c);
  }
  return -1;
}

void SyntaxTree::walk(NodeId from, const std::function<bool(NodeId)>& visit) const {
  std::vector<NodeId> stack{from};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (!visit(id)) continue;
    const auto& kids = nodes_[id].children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
}

std::vector<NodeId> SyntaxTree::parents() const {
  std::vector<NodeId> parent(nodes_.size(), root_);
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    for (NodeId c : nodes_[id].children) parent[c] = id;
  }
  return parent;
}

bool SyntaxTree::operator==(const SyntaxTree& other) const {
  if (nodes_.size() != other.nodes_.size() || source_ != other.source_) return false;
  std::vector<std::pair<NodeId, NodeId>> stack{{root_, other.root_}};
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    const Node& x = nodes_[a];
    const Node& y = other.nodes_[b];
    if (x.kind != y.kind || x.label != y.label || x.span != y.span ||
        x.children.size() != y.children.size()) {
      return false;
    }
    for (std::size_t i = 0; i < x.children.size(); ++i) {
      stack.emplace_back(x.children[i], y.children[i]);
    }
  }
  return true;
}

std::string dump(const SyntaxTree& tree) {
  std::ostringstream out;
  std::vector<std::pair<NodeId, int>> stack{{tree.root(), 0}};
  while (!stack.empty()) {
    auto [id, depth] = stack.back();
    stack.pop_back();
    const Node& n = tree[id];
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << to_string(n.kind);
    if (!n.label.empty()) out << ' ' << n.label;
    out << '\n';
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
      stack.emplace_back(*it, depth + 1);
    }
  }
  return out.str();
}

}  // namespace sqldebug
