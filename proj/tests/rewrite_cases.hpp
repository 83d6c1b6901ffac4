#pragma once

// Rewrite-soundness driver: lowers toy queries, applies every rewrite rule
// one step at a time until nothing changes, and evaluates the plan before
// and after each effective step with the toy interpreter.

#include <map>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "sqldebug/parser.hpp"
#include "sqldebug/plan.hpp"
#include "toy_interpreter.hpp"

namespace rewrite_cases {

/// Queries over the toy schema t(a, b, k, s), u(k, v, c). Together they make
/// every rule fire at least three times.
inline std::vector<std::string> queries() {
  return {
      // R2: flattening and operand order
      "SELECT a FROM t WHERE b > 5 AND a > 0",
      "SELECT a FROM t WHERE (a > 0 AND b > 5) AND k = 2",
      "SELECT a FROM t WHERE k = 2 OR (a = 1 OR b IS NULL)",
      "SELECT a, s FROM t WHERE s LIKE 'b%' OR (a IS NULL AND b = 20)",
      // R3: constant folding
      "SELECT a FROM t WHERE 1 = 1",
      "SELECT a + 2 * 3 FROM t",
      "SELECT a FROM t WHERE a > 1 + 1 AND 2 > 1",
      "SELECT a FROM t WHERE 1 = 0 OR b = 20",
      // R4: commutative ordering
      "SELECT t.a, u.v FROM t JOIN u ON t.k = u.k",
      "SELECT t.a, u.v FROM u JOIN t ON u.k = t.k",
      "SELECT a FROM t WHERE 1 < a",
      "SELECT b + a, b * k FROM t",
      "SELECT k, sum(a), count(*) FROM t GROUP BY k",
      // R5: pass-through derived tables
      "SELECT a FROM (SELECT * FROM t) x",
      "SELECT x.a FROM (SELECT a, b, k, s FROM t) x WHERE x.b > 1",
      "SELECT x.a, u.c FROM (SELECT * FROM t) x LEFT JOIN u ON x.k = u.k",
      "SELECT x.k, sum(x.b), count(x.a) FROM (SELECT b, k, a FROM t) x GROUP BY x.k",
      "SELECT y.c, max(y.v) FROM (SELECT v, c FROM u WHERE v > 1) y GROUP BY y.c",
      // R6: negation
      "SELECT a FROM t WHERE NOT (a > 1)",
      "SELECT a FROM t WHERE NOT NOT (b = 20)",
      "SELECT a FROM t WHERE NOT (a IS NULL)",
      "SELECT a FROM t WHERE NOT (a IN (1, 2))",
      "SELECT a FROM t WHERE NOT (s LIKE 'a%')",
      // R7: adjacent filters
      "SELECT a FROM (SELECT * FROM t WHERE a > 1) x WHERE b > 5",
      "SELECT x.k FROM (SELECT * FROM (SELECT * FROM t WHERE k = 2) y WHERE a > 2) x WHERE b IS NULL",
      "SELECT v FROM (SELECT * FROM u WHERE v > 1) x WHERE k <> 3",
      // R8: stacked projections
      "SELECT x.a + 1 FROM (SELECT a, b FROM t) x",
      "SELECT y.total FROM (SELECT a + b AS total, k FROM t) y",
      "SELECT z.c FROM (SELECT c, k FROM u) z",
      // mixed
      "SELECT t.k, count(*) FROM t LEFT JOIN u ON t.k = u.k GROUP BY t.k",
      "SELECT a FROM t WHERE k IN (SELECT k FROM u WHERE v > 5)",
      "SELECT a FROM t WHERE EXISTS (SELECT 1 FROM u WHERE u.k = t.k AND NOT (u.v < 6))",
      "SELECT a FROM t UNION SELECT k FROM u",
      "SELECT DISTINCT k FROM t WHERE 2 = 2 AND NOT (k >= 3)",
      "SELECT CASE WHEN a > 1 THEN 'big' ELSE 'small' END FROM t",
  };
}

inline const std::vector<sqldebug::Rule>& all_rules() {
  using sqldebug::Rule;
  static const std::vector<Rule> rules = {Rule::flatten_and_sort,  Rule::fold_constants, Rule::commutative_order,
                                          Rule::inline_passthrough, Rule::push_not,       Rule::merge_filters,
                                          Rule::collapse_projects};
  return rules;
}

inline sqldebug::PlanNode lower_toy(const std::string& sql) {
  const auto plan = sqldebug::lower(sqldebug::parse_script(sqldebug::SqlScript(sql)), fixtures::toy_catalog());
  return plan.statements.at(0);
}

struct Step {
  std::string query;
  sqldebug::Rule rule;
  bool sound = false;
  std::string detail;
};

/// Every effective rule application, with its soundness verdict.
inline std::vector<Step> trace(const std::string& sql) {
  std::vector<Step> steps;
  sqldebug::PlanNode plan = lower_toy(sql);
  for (int round = 0; round < 32; ++round) {
    bool changed = false;
    for (sqldebug::Rule rule : all_rules()) {
      sqldebug::PlanNode next = sqldebug::apply_rule(plan, rule);
      if (next == plan) continue;
      Step s{sql, rule, false, {}};
      try {
        const auto before = toy::bag(toy::evaluate(plan, fixtures::toy_database()));
        const auto after = toy::bag(toy::evaluate(next, fixtures::toy_database()));
        s.sound = before == after;
        if (!s.sound) s.detail = sqldebug::serialize(plan) + "=>\n" + sqldebug::serialize(next);
      } catch (const std::exception& e) {
        s.detail = e.what();
      }
      steps.push_back(std::move(s));
      plan = std::move(next);
      changed = true;
    }
    if (!changed) break;
  }
  return steps;
}

struct Summary {
  std::map<sqldebug::Rule, std::size_t> sound;  ///< effective, result-preserving steps per rule
  std::vector<Step> failures;
};

inline Summary run_all() {
  Summary out;
  for (sqldebug::Rule r : all_rules()) out.sound[r] = 0;
  for (const std::string& q : queries()) {
    for (Step& s : trace(q)) {
      if (s.sound) {
        ++out.sound[s.rule];
      } else {
        out.failures.push_back(std::move(s));
      }
    }
  }
  return out;
}

/// Alias-erasure (R1) and CTE-inlining pairs: same results, same plan.
struct PlanPair {
  std::string left;
  std::string right;
};

inline std::vector<PlanPair> alias_pairs() {
  return {
      {"SELECT x.a FROM t x WHERE x.b > 1", "SELECT a FROM t WHERE b > 1"},
      {"SELECT p.a AS first, q.v AS second FROM t p JOIN u q ON p.k = q.k",
       "SELECT t.a, u.v FROM t JOIN u ON t.k = u.k"},
      {"SELECT g.k AS key, count(*) AS n FROM t g GROUP BY g.k", "SELECT k, count(*) FROM t GROUP BY k"},
  };
}

inline std::vector<PlanPair> cte_pairs() {
  return {
      {"WITH c AS (SELECT a FROM t) SELECT a FROM c", "SELECT a FROM t"},
      {"WITH big AS (SELECT * FROM t WHERE b > 5) SELECT k, count(*) FROM big GROUP BY k",
       "SELECT k, count(*) FROM t WHERE b > 5 GROUP BY k"},
      {"WITH j AS (SELECT t.a, u.v FROM t JOIN u ON t.k = u.k) SELECT a FROM j WHERE v > 5",
       "SELECT t.a FROM t JOIN u ON t.k = u.k WHERE u.v > 5"},
  };
}

}  // namespace rewrite_cases
