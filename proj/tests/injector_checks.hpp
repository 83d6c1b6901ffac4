#pragma once

// Round-trip checks of every operator over the reference corpus. Shared by
// the unit tests and the acceptance binary.

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "sqldebug/injector.hpp"
#include "sqldebug/parser.hpp"

namespace injector_checks {

struct RoundTrip {
  std::size_t operators = 0;
  std::size_t injections = 0;
  std::vector<std::string> failures;       ///< "<stem> <operator>: reason"
  std::vector<std::string> unused;         ///< operators that injected nowhere
  std::vector<std::string> missing_level1; ///< "<class>: <level1>" not covered
  double max_distance = 0.0;
};

inline bool outside_bytes_unchanged(const std::string& reference, const sqldebug::InjectionResult& r) {
  const std::string& issue = r.issue_sql.text;
  const std::size_t tail = reference.size() - r.site_span.end;
  if (issue.size() < r.site_span.begin + tail) return false;
  return issue.compare(0, r.site_span.begin, reference, 0, r.site_span.begin) == 0 &&
         issue.compare(issue.size() - tail, tail, reference, r.site_span.end, tail) == 0;
}

inline RoundTrip run(double budget = sqldebug::kDefaultBudget) {
  using namespace sqldebug;
  RoundTrip out;
  const Catalog& catalog = fixtures::schema_catalog();
  std::set<std::string> used;
  for (const auto& [stem, reference] : fixtures::reference_scripts()) {
    const FeatureSet features = structural_profile(parse_script(reference), &catalog);
    for (const MutationOperator& op : mutation_operators()) {
      if (!op.applicable(features)) continue;
      InjectionResult r;
      try {
        r = inject(reference, op, catalog, budget);
      } catch (const Error& e) {
        continue;  // no site of this script survives verification
      }
      ++out.injections;
      used.insert(op.id);
      out.max_distance = std::max(out.max_distance, r.edit_distance_to_reference());
      auto fail = [&](const std::string& why) { out.failures.push_back(stem + " " + op.id + ": " + why); };
      const Verification v = verify_injection(r, reference, catalog, budget);
      if (!v.ok) fail(v.reason);
      if (r.edit_distance_to_reference() > budget) fail("distance over budget");
      if (!outside_bytes_unchanged(reference.text, r)) fail("bytes outside the site changed");
      if (op.bug_class == TaskType::syntax) {
        const auto first = std::find_if(r.diagnostics.begin(), r.diagnostics.end(),
                                        [](const Diagnostic& d) { return d.severity == Severity::error; });
        if (first == r.diagnostics.end() || first->taxonomy.level1 != op.taxonomy.level1) {
          fail("first diagnostic not in " + op.taxonomy.level1);
        }
      }
      if (inject(reference, op, catalog, budget).issue_sql.text != r.issue_sql.text) fail("not deterministic");
    }
  }
  out.operators = mutation_operators().size();
  for (const MutationOperator& op : mutation_operators()) {
    if (!used.count(op.id)) out.unused.push_back(op.id);
  }
  // Every level1 of each bug table must have an operator of that class.
  for (const TaxonomyEntry& e : TaxonomyRegistry::standard().entries()) {
    for (TaskType cls : {TaskType::semantic, TaskType::syntax}) {
      const int count = cls == TaskType::semantic ? e.semantic_count : e.syntax_count;
      if (count == 0) continue;
      const bool covered = std::any_of(mutation_operators().begin(), mutation_operators().end(), [&](const auto& op) {
        return op.bug_class == cls && op.taxonomy.level1 == e.path.level1;
      });
      const std::string tag = std::string(to_string(cls)) + ": " + e.path.level1;
      if (!covered && std::find(out.missing_level1.begin(), out.missing_level1.end(), tag) == out.missing_level1.end()) {
        out.missing_level1.push_back(tag);
      }
    }
  }
  return out;
}

}  // namespace injector_checks
