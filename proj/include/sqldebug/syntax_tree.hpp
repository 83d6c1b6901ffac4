#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sqldebug/span.hpp"

namespace sqldebug {

// Normative node-kind grammar. Depth/width and edit distances are counted
// against exactly these nodes (whitespace and punctuation never appear).
//
//   Script      := (Query | Insert | CreateTable | Comment | Raw)*
//   Query       := [With] (Select | SetOp | Query)
//   With        := Cte+                    Cte[name] := [ColumnList] Query
//   SetOp[UNION|UNION ALL] := body body
//   Select      := [Distinct] ProjList [From] [Where] [GroupBy] [Having] [OrderBy] [Limit]
//   ProjList    := (expr | Alias[name](expr) | Star[*|t.*])+
//   From        := tableexpr LateralView*
//   tableexpr   := TableRef[name]([TableAlias]) | DerivedTable(Query [TableAlias])
//                | Join[INNER|LEFT|RIGHT|FULL|CROSS|COMMA|LEFT SEMI](tableexpr tableexpr [On])
//   LateralView[|OUTER] := FunctionCall TableAlias ColumnAlias+
//   Where/Having/On := expr     GroupBy := expr+     OrderBy := SortKey[|ASC|DESC](expr)+
//   Limit[n]
//   expr        := ColRef[a|t.a] | Literal[text] | BinaryOp[op](expr expr) | UnaryOp[op](expr)
//                | FunctionCall[name]([Distinct] expr* [Over]) | Star
//                | Case[|SIMPLE]([expr] When(expr expr)+ [Else(expr)]) | Cast[type](expr)
//                | InList[IN|NOT IN](expr expr+) | InSubquery[IN|NOT IN](expr Query)
//                | Between[..](expr expr expr) | Like[LIKE|NOT LIKE|RLIKE|NOT RLIKE](expr expr)
//                | IsNull[IS NULL|IS NOT NULL](expr) | Exists[..](Query) | ScalarSubquery(Query)
//                | Subscript(expr expr)
//   Over        := [PartitionBy(expr+)] [OrderBy] [Frame[text]]
//   Insert[INTO|OVERWRITE] := [With] TableRef [PartitionSpec(PartitionItem[col]([Literal])+)]
//                             [ColumnList(Identifier+)] (Select | SetOp | Query)
//   CreateTable[name] := [Flag[IF NOT EXISTS]] ColumnDef[name](TypeName[type] [Literal])*
//                        [TableComment(Literal)] [PartitionedBy(ColumnDef+)] [TableOptions[text]] [Query]
//   Raw[text]   := (leaf) tokens of a statement that failed to parse
enum class NodeKind : std::uint8_t {
  Script,
  Comment,
  Raw,
  Query,
  With,
  Cte,
  SetOp,
  Select,
  Distinct,
  ProjList,
  Alias,
  Star,
  From,
  TableRef,
  TableAlias,
  DerivedTable,
  Join,
  On,
  LateralView,
  ColumnAlias,
  Where,
  GroupBy,
  Having,
  OrderBy,
  SortKey,
  Limit,
  ColRef,
  Literal,
  BinaryOp,
  UnaryOp,
  FunctionCall,
  Over,
  PartitionBy,
  Frame,
  Case,
  When,
  Else,
  Cast,
  InList,
  InSubquery,
  Between,
  Like,
  IsNull,
  Exists,
  ScalarSubquery,
  Subscript,
  Insert,
  PartitionSpec,
  PartitionItem,
  ColumnList,
  Identifier,
  CreateTable,
  Flag,
  ColumnDef,
  TypeName,
  TableComment,
  PartitionedBy,
  TableOptions,
};

std::string_view to_string(NodeKind kind);

using NodeId = std::uint32_t;

struct Node {
  NodeKind kind = NodeKind::Script;
  std::string label;
  std::vector<NodeId> children;
  Span span;
};

/// Immutable, arena-backed ordered tree. Nodes are created bottom-up by the
/// parser; the root is always a Script node.
class SyntaxTree {
 public:
  SyntaxTree() = default;
  SyntaxTree(std::string source, std::vector<Node> nodes, NodeId root)
      : source_(std::move(source)), nodes_(std::move(nodes)), root_(root) {}

  [[nodiscard]] const std::string& source() const { return source_; }
  [[nodiscard]] NodeId root() const { return root_; }
  [[nodiscard]] const Node& node(NodeId id) const { return nodes_.at(id); }
  [[nodiscard]] const Node& operator[](NodeId id) const { return nodes_[id]; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] bool empty() const { return nodes_.empty(); }
  [[nodiscard]] std::string_view text(NodeId id) const {
    const Span s = nodes_[id].span;
    return std::string_view(source_).substr(s.begin, s.size());
  }

  /// Child `i` of `id`, or nullptr.
  [[nodiscard]] const Node* child(NodeId id, std::size_t i) const;
  /// First child of the given kind, or -1.
  [[nodiscard]] long find_child(NodeId id, NodeKind kind) const;

  /// Pre-order walk; the callback returns false to skip a subtree.
  void walk(NodeId from, const std::function<bool(NodeId)>& visit) const;
  /// Parent links, indexed by NodeId (root maps to itself).
  [[nodiscard]] std::vector<NodeId> parents() const;

  /// Structural equality: kinds, labels, spans and shape.
  bool operator==(const SyntaxTree& other) const;

 private:
  std::string source_;
  std::vector<Node> nodes_;
  NodeId root_ = 0;
};

/// Indented one-node-per-line rendering, e.g. `Select` / `  ColRef a`.
std::string dump(const SyntaxTree& tree);

}  // namespace sqldebug
