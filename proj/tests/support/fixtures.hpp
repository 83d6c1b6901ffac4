#pragma once

// Shared fixture access for the test binaries: the warehouse schema, the
// reference scripts, a small toy schema with data, and the injected
// instance suite built from them.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sqldebug/catalog.hpp"
#include "sqldebug/instance.hpp"
#include "sqldebug/lexer.hpp"
#include "toy_interpreter.hpp"

namespace fixtures {

std::filesystem::path root();
std::string read_text(const std::filesystem::path& path);

/// DDL text of tests/fixtures/schema.sql and its catalog.
const std::string& schema_ddl();
const sqldebug::Catalog& schema_catalog();

/// (stem, script) for every tests/fixtures/reference/*.sql, sorted by stem.
const std::vector<std::pair<std::string, sqldebug::SqlScript>>& reference_scripts();

/// t(a INT, b INT, k INT, s STRING) and u(k INT, v INT, c STRING).
const std::string& toy_ddl();
const sqldebug::Catalog& toy_catalog();
/// At most four rows per toy table, NULLs included.
const toy::Database& toy_database();

/// Every operator applied to every reference it accepts, ids
/// "<stem>-<operator>", in reference then operator order.
const std::vector<sqldebug::BenchmarkInstance>& instance_suite();

}  // namespace fixtures
