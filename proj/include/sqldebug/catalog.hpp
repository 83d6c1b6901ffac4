#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqldebug/lexer.hpp"
#include "sqldebug/syntax_tree.hpp"

namespace sqldebug {

enum class ColumnType {
  int_,
  bigint,
  double_,
  decimal,
  string,
  boolean,
  date,
  timestamp,
  array,
  map,
  struct_,
};

std::string_view to_string(ColumnType type);
/// Maps a DDL type spelling (`bigint`, `varchar(20)`, `array<string>`, ...)
/// to its column type class. Unknown spellings throw Error.
ColumnType parse_column_type(std::string_view spelling);
[[nodiscard]] bool is_numeric(ColumnType type);
[[nodiscard]] bool is_temporal(ColumnType type);

struct Column {
  std::string name;  ///< lower-case unless declared with backticks
  ColumnType type = ColumnType::string;
  std::string type_text;  ///< declared spelling, e.g. `map<string,int>`
  std::string comment;

  bool operator==(const Column&) const = default;
};

struct Table {
  std::string name;
  std::vector<Column> columns;  ///< data columns followed by partition columns
  std::vector<std::string> partition_columns;

  /// Ordinal of a column (case-insensitive), if present.
  [[nodiscard]] std::optional<std::size_t> find(std::string_view column) const;
  [[nodiscard]] bool is_partition(std::string_view column) const;
  bool operator==(const Table&) const = default;
};

/// Schema built from CREATE TABLE statements. Table names are unique
/// case-insensitively; a database prefix (`db.t`) is kept as part of the
/// name, and lookups of `t` also find `db.t` when exactly one such table
/// exists.
class Catalog {
 public:
  /// Throws Error on a duplicate table, duplicate column or a partition
  /// column clashing with a data column.
  void add(Table table);
  [[nodiscard]] const Table* find(std::string_view name) const;
  [[nodiscard]] const std::map<std::string, Table>& tables() const { return tables_; }
  [[nodiscard]] bool empty() const { return tables_.empty(); }
  bool operator==(const Catalog&) const = default;

 private:
  std::map<std::string, Table> tables_;  // key: lower-case name
};

/// Table definition of one CreateTable node (column list form only).
Table table_from_ddl(const SyntaxTree& tree, NodeId create_table);

/// Parses every script and collects its CREATE TABLE statements. Any other
/// statement kind, or a table defined twice, is an Error.
Catalog load_catalog(const std::vector<SqlScript>& ddl);

}  // namespace sqldebug
