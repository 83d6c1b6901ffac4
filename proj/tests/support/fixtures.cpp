#include "fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sqldebug/harness.hpp"
#include "sqldebug/injector.hpp"

namespace fixtures {

namespace fs = std::filesystem;
using sqldebug::SqlScript;

fs::path root() { return fs::path(SQLDEBUG_FIXTURE_DIR); }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string& schema_ddl() {
  static const std::string text = read_text(root() / "schema.sql");
  return text;
}

const sqldebug::Catalog& schema_catalog() {
  static const sqldebug::Catalog catalog = sqldebug::load_catalog({SqlScript(schema_ddl())});
  return catalog;
}

const std::vector<std::pair<std::string, SqlScript>>& reference_scripts() {
  static const auto scripts = [] {
    std::vector<std::pair<std::string, SqlScript>> out;
    for (const auto& entry : fs::directory_iterator(root() / "reference")) {
      if (entry.path().extension() != ".sql") continue;
      out.emplace_back(entry.path().stem().string(), SqlScript(read_text(entry.path())));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }();
  return scripts;
}

const std::string& toy_ddl() {
  static const std::string text =
      "CREATE TABLE t (a INT, b INT, k INT, s STRING);\n"
      "CREATE TABLE u (k INT, v INT, c STRING);\n";
  return text;
}

const sqldebug::Catalog& toy_catalog() {
  static const sqldebug::Catalog catalog = sqldebug::load_catalog({SqlScript(toy_ddl())});
  return catalog;
}

const toy::Database& toy_database() {
  using toy::Value;
  static const toy::Database db = [] {
    auto i = Value::integer;
    auto s = Value::text;
    const Value null = Value::null();
    toy::Database d;
    d["t"] = {
        {i(1), i(10), i(1), s("apple")},
        {i(2), i(20), i(2), s("banana")},
        {i(3), null, i(2), s("cherry")},
        {null, i(20), i(4), null},
    };
    d["u"] = {
        {i(1), i(5), s("x")},
        {i(2), i(7), s("y")},
        {i(2), null, s("y")},
        {i(3), i(9), null},
    };
    return d;
  }();
  return db;
}

const std::vector<sqldebug::BenchmarkInstance>& instance_suite() {
  static const auto suite = [] {
    std::vector<sqldebug::BenchmarkInstance> out;
    for (const auto& [stem, reference] : reference_scripts()) {
      for (const sqldebug::MutationOperator& op : sqldebug::mutation_operators()) {
        sqldebug::InjectionResult result;
        try {
          result = sqldebug::inject(reference, op, schema_catalog());
        } catch (const sqldebug::Error&) {
          continue;
        }
        out.push_back(sqldebug::instance_from_injection(stem + "-" + op.id, result, op, reference,
                                                        {schema_ddl()}, "retail"));
      }
    }
    return out;
  }();
  return suite;
}

}  // namespace fixtures
