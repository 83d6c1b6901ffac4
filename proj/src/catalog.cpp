#include "sqldebug/catalog.hpp"

#include <algorithm>

#include "sqldebug/parser.hpp"

namespace sqldebug {

std::string_view to_string(ColumnType type) {
  switch (type) {
    case ColumnType::int_: return "int";
    case ColumnType::bigint: return "bigint";
    case ColumnType::double_: return "double";
    case ColumnType::decimal: return "decimal";
    case ColumnType::string: return "string";
    case ColumnType::boolean: return "boolean";
    case ColumnType::date: return "date";
    case ColumnType::timestamp: return "timestamp";
    case ColumnType::array: return "array";
    case ColumnType::map: return "map";
    case ColumnType::struct_: return "struct";
  }
  return "?";
}

ColumnType parse_column_type(std::string_view spelling) {
  std::string base = to_lower(spelling);
  const auto cut = base.find_first_of("(<");
  if (cut != std::string::npos) base.resize(cut);
  if (base == "int" || base == "integer" || base == "tinyint" || base == "smallint") {
    return ColumnType::int_;
  }
  if (base == "bigint") return ColumnType::bigint;
  if (base == "double" || base == "float" || base == "real") return ColumnType::double_;
  if (base == "decimal" || base == "numeric") return ColumnType::decimal;
  if (base == "string" || base == "varchar" || base == "char" || base == "binary") {
    return ColumnType::string;
  }
  if (base == "boolean" || base == "bool") return ColumnType::boolean;
  if (base == "date") return ColumnType::date;
  if (base == "timestamp") return ColumnType::timestamp;
  if (base == "array") return ColumnType::array;
  if (base == "map") return ColumnType::map;
  if (base == "struct") return ColumnType::struct_;
  throw Error("unknown column type '" + std::string(spelling) + "'");
}

bool is_numeric(ColumnType type) {
  return type == ColumnType::int_ || type == ColumnType::bigint || type == ColumnType::double_ ||
         type == ColumnType::decimal;
}

bool is_temporal(ColumnType type) {
  return type == ColumnType::date || type == ColumnType::timestamp;
}

std::optional<std::size_t> Table::find(std::string_view column) const {
  const std::string want = to_lower(column);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (to_lower(columns[i].name) == want) return i;
  }
  return std::nullopt;
}

bool Table::is_partition(std::string_view column) const {
  const std::string want = to_lower(column);
  return std::any_of(partition_columns.begin(), partition_columns.end(),
                     [&](const std::string& p) { return to_lower(p) == want; });
}

void Catalog::add(Table table) {
  const std::string key = to_lower(table.name);
  if (tables_.count(key) != 0) throw Error("duplicate table '" + table.name + "'");
  std::vector<std::string> seen;
  for (const Column& c : table.columns) {
    const std::string lc = to_lower(c.name);
    if (std::find(seen.begin(), seen.end(), lc) != seen.end()) {
      throw Error("table '" + table.name + "': duplicate column '" + c.name + "'");
    }
    seen.push_back(lc);
  }
  for (const std::string& p : table.partition_columns) {
    if (!table.find(p)) {
      throw Error("table '" + table.name + "': unknown partition column '" + p + "'");
    }
  }
  tables_.emplace(key, std::move(table));
}

const Table* Catalog::find(std::string_view name) const {
  const std::string key = to_lower(name);
  if (auto it = tables_.find(key); it != tables_.end()) return &it->second;
  if (key.find('.') != std::string::npos) {
    // db.t also matches a table declared without a database prefix
    if (auto it = tables_.find(key.substr(key.rfind('.') + 1)); it != tables_.end()) {
      return &it->second;
    }
    return nullptr;
  }
  const Table* match = nullptr;
  for (const auto& [k, t] : tables_) {
    const auto dot = k.rfind('.');
    if (dot != std::string::npos && k.substr(dot + 1) == key) {
      if (match != nullptr) return nullptr;
      match = &t;
    }
  }
  return match;
}

namespace {

Column column_from_def(const SyntaxTree& tree, NodeId def) {
  const Node& n = tree[def];
  Column c;
  c.name = n.label;
  for (NodeId k : n.children) {
    if (tree[k].kind == NodeKind::TypeName) {
      c.type_text = tree[k].label;
      c.type = parse_column_type(tree[k].label);
    } else if (tree[k].kind == NodeKind::Literal) {
      const std::string& s = tree[k].label;
      c.comment = s.size() >= 2 ? s.substr(1, s.size() - 2) : s;
    }
  }
  return c;
}

}  // namespace

Table table_from_ddl(const SyntaxTree& tree, NodeId create_table) {
  const Node& n = tree[create_table];
  Table t;
  t.name = n.label;
  for (NodeId k : n.children) {
    if (tree[k].kind == NodeKind::ColumnDef) {
      t.columns.push_back(column_from_def(tree, k));
    } else if (tree[k].kind == NodeKind::PartitionedBy) {
      for (NodeId p : tree[k].children) {
        Column c = column_from_def(tree, p);
        t.partition_columns.push_back(c.name);
        t.columns.push_back(std::move(c));
      }
    }
  }
  return t;
}

Catalog load_catalog(const std::vector<SqlScript>& ddl) {
  Catalog catalog;
  for (const SqlScript& script : ddl) {
    const SyntaxTree tree = parse_script(script);
    for (NodeId stmt : tree[tree.root()].children) {
      const Node& n = tree[stmt];
      if (n.kind == NodeKind::Comment) continue;
      if (n.kind != NodeKind::CreateTable) {
        throw Error("DDL expects CREATE TABLE statements, found " +
                    std::string(n.kind == NodeKind::Insert ? "INSERT" : "query") + " statement");
      }
      if (tree.find_child(stmt, NodeKind::Query) >= 0) {
        throw Error("DDL for table '" + n.label + "' must declare columns, not CREATE TABLE AS");
      }
      catalog.add(table_from_ddl(tree, stmt));
    }
  }
  return catalog;
}

}  // namespace sqldebug
