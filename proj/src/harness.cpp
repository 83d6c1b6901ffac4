#include "sqldebug/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "sqldebug/validator.hpp"

namespace sqldebug {

using nlohmann::json;

namespace {

std::string instance_label(const json& object) {
  if (object.is_object() && object.contains("instance_id") && object["instance_id"].is_string()) {
    return object["instance_id"].get<std::string>();
  }
  return "?";
}

[[noreturn]] void field_error(const std::string& id, const std::string& field, const std::string& what) {
  throw Error("instance " + id + ": " + field + " " + what);
}

std::string string_field(const json& o, const std::string& id, const char* field, bool required = true) {
  if (!o.contains(field)) {
    if (required) field_error(id, field, "required");
    return {};
  }
  if (!o[field].is_string()) field_error(id, field, "must be a string");
  return o[field].get<std::string>();
}

std::vector<std::string> string_list(const json& o, const std::string& id, const char* field) {
  if (!o.contains(field)) field_error(id, field, "required");
  const json& v = o[field];
  if (!v.is_array()) field_error(id, field, "must be an array of strings");
  std::vector<std::string> out;
  for (const json& item : v) {
    if (!item.is_string()) field_error(id, field, "must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

void check_schema_version(const json& o, const std::string& what) {
  if (o.contains("schema_version") && o["schema_version"] != kSchemaVersion) {
    throw Error(what + ": unsupported schema_version " + o["schema_version"].dump());
  }
}

/// Calls `fn(json, line_number)` for every non-blank line.
template <typename Fn>
void for_each_json_line(std::istream& in, const std::string& source, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json value;
    try {
      value = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(source + ":" + std::to_string(number) + ": malformed JSON: " + e.what());
    }
    if (!value.is_object()) throw Error(source + ":" + std::to_string(number) + ": expected a JSON object");
    fn(value, number);
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return in;
}

bool has_error(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::error; });
}

json taxonomy_json(const TaxonomyPath& p) { return json::array({p.level1, p.level2, p.level3}); }

json counts_json(const MetricCounts& c) {
  auto pct = [&](std::size_t k) { return std::stod(format_percentage(k, c.n)); };
  return {{"n", c.n},         {"em", c.em},       {"gm", c.gm},         {"mb", c.mb},
          {"em_pct", pct(c.em)}, {"gm_pct", pct(c.gm)}, {"mb_pct", pct(c.mb)}};
}

}  // namespace

json to_json(const BenchmarkInstance& i) {
  json o;
  o["schema_version"] = kSchemaVersion;
  o["instance_id"] = i.instance_id;
  o["task_type"] = std::string(to_string(i.task_type));
  o["ddl"] = i.ddl;
  o["issue_sql"] = i.issue_sql;
  if (i.task_type == TaskType::syntax) {
    o["error_message"] = i.error_message;
  } else {
    o["user_query"] = i.user_query;
  }
  o["reference_sqls"] = i.reference_sqls;
  o["taxonomy"] = taxonomy_json(i.taxonomy);
  o["domain"] = i.domain;
  return o;
}

json to_json(const InstanceScore& s, const TaxonomyPath& taxonomy) {
  return {{"schema_version", kSchemaVersion}, {"instance_id", s.instance_id}, {"em", s.em},
          {"gm", s.gm},                      {"mb", s.mb},                   {"fallback_used", s.fallback_used},
          {"taxonomy", taxonomy_json(taxonomy)}};
}

json to_json(const ScoreReport& r) {
  json o = counts_json(r.overall);
  o["schema_version"] = kSchemaVersion;
  json per = json::object();
  for (const auto& [level1, counts] : r.per_taxonomy) per[level1] = counts_json(counts);
  o["per_taxonomy"] = per;
  return o;
}

BenchmarkInstance instance_from_json(const json& o) {
  const std::string id = instance_label(o);
  if (!o.contains("instance_id")) throw Error("instance ?: instance_id required");
  string_field(o, id, "instance_id");
  check_schema_version(o, "instance " + id);
  BenchmarkInstance i;
  i.instance_id = id;
  try {
    i.task_type = parse_task_type(string_field(o, id, "task_type"));
  } catch (const Error& e) {
    field_error(id, "task_type", e.what());
  }
  i.ddl = string_list(o, id, "ddl");
  i.issue_sql = string_field(o, id, "issue_sql");
  if (i.task_type == TaskType::syntax) {
    i.error_message = string_field(o, id, "error_message");
  } else {
    i.user_query = string_field(o, id, "user_query");
  }
  i.reference_sqls = string_list(o, id, "reference_sqls");
  if (i.reference_sqls.empty()) field_error(id, "reference_sqls", "must not be empty");
  const std::vector<std::string> path = string_list(o, id, "taxonomy");
  if (path.size() != 3) field_error(id, "taxonomy", "must have three levels");
  i.taxonomy = {path[0], path[1], path[2]};
  i.domain = string_field(o, id, "domain", false);
  return i;
}

void check_instance(const BenchmarkInstance& i) {
  const std::string& id = i.instance_id;
  Catalog catalog;
  try {
    std::vector<SqlScript> ddl(i.ddl.begin(), i.ddl.end());
    catalog = load_catalog(ddl);
  } catch (const Error& e) {
    field_error(id, "ddl", std::string("does not load: ") + e.what());
  }
  if (!TaxonomyRegistry::standard().contains(i.taxonomy)) {
    field_error(id, "taxonomy", "is not a known path: " + to_string(i.taxonomy));
  }
  for (std::size_t k = 0; k < i.reference_sqls.size(); ++k) {
    const auto diags = lint(SqlScript(i.reference_sqls[k]), catalog);
    if (has_error(diags)) {
      field_error(id, "reference_sqls[" + std::to_string(k) + "]",
                  "fails validation: " + first_error_message(diags));
    }
  }
  const bool issue_fails = has_error(lint(SqlScript(i.issue_sql), catalog));
  if (i.task_type == TaskType::syntax && !issue_fails) {
    field_error(id, "issue_sql", "passes validation but the instance is a syntax instance");
  }
  if (i.task_type == TaskType::semantic && issue_fails) {
    field_error(id, "issue_sql", "fails validation but the instance is a semantic instance");
  }
}

std::vector<BenchmarkInstance> parse_instances(std::istream& in, const std::string& source_name) {
  std::vector<BenchmarkInstance> out;
  std::set<std::string> ids;
  for_each_json_line(in, source_name, [&](const json& o, std::size_t) {
    BenchmarkInstance i = instance_from_json(o);
    if (!ids.insert(i.instance_id).second) throw Error("instance " + i.instance_id + ": duplicate instance_id");
    check_instance(i);
    out.push_back(std::move(i));
  });
  return out;
}

std::vector<BenchmarkInstance> read_instances(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse_instances(in, path.string());
}

std::map<std::string, Prediction> parse_predictions(std::istream& in, const std::string& source_name) {
  std::map<std::string, Prediction> out;
  for_each_json_line(in, source_name, [&](const json& o, std::size_t line) {
    const std::string where = source_name + ":" + std::to_string(line);
    check_schema_version(o, where);
    if (!o.contains("instance_id") || !o["instance_id"].is_string()) throw Error(where + ": instance_id required");
    if (!o.contains("predict_sql") || !o["predict_sql"].is_string()) {
      throw Error("prediction " + o["instance_id"].get<std::string>() + ": predict_sql required");
    }
    Prediction p{o["instance_id"].get<std::string>(), o["predict_sql"].get<std::string>()};
    if (out.count(p.instance_id) != 0) throw Error("prediction " + p.instance_id + ": duplicate instance_id");
    out.emplace(p.instance_id, std::move(p));
  });
  return out;
}

std::map<std::string, Prediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse_predictions(in, path.string());
}

void check_prediction_ids(const std::map<std::string, Prediction>& predictions,
                          const std::vector<BenchmarkInstance>& instances) {
  std::set<std::string> ids;
  for (const BenchmarkInstance& i : instances) ids.insert(i.instance_id);
  for (const auto& [id, p] : predictions) {
    if (ids.count(id) == 0) throw Error("prediction " + id + ": unknown instance_id");
  }
}

std::vector<ScoreRecord> parse_scores(std::istream& in, const std::string& source_name) {
  std::vector<ScoreRecord> out;
  for_each_json_line(in, source_name, [&](const json& o, std::size_t line) {
    const std::string where = source_name + ":" + std::to_string(line);
    check_schema_version(o, where);
    try {
      ScoreRecord r;
      r.score.instance_id = o.at("instance_id").get<std::string>();
      r.score.em = o.at("em").get<bool>();
      r.score.gm = o.at("gm").get<bool>();
      r.score.mb = o.at("mb").get<bool>();
      r.score.fallback_used = o.value("fallback_used", false);
      if (o.contains("taxonomy")) {
        const auto path = o["taxonomy"].get<std::vector<std::string>>();
        if (path.size() != 3) throw Error("taxonomy must have three levels");
        r.taxonomy = {path[0], path[1], path[2]};
      }
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(where + ": malformed score record: " + e.what());
    }
  });
  return out;
}

std::vector<ScoreRecord> read_scores(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse_scores(in, path.string());
}

std::string format_report(const ScoreReport& report, bool by_taxonomy) {
  std::size_t width = std::string("Category").size();
  if (by_taxonomy) {
    for (const auto& [level1, c] : report.per_taxonomy) width = std::max(width, level1.size());
  }
  std::string out;
  auto row = [&](const std::string& name, const std::string& n, const std::string& em, const std::string& gm,
                 const std::string& mb) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-*s %6s %8s %8s %8s\n", static_cast<int>(width), name.c_str(), n.c_str(),
                  em.c_str(), gm.c_str(), mb.c_str());
    out += buf;
  };
  auto counts_row = [&](const std::string& name, const MetricCounts& c) {
    row(name, std::to_string(c.n), format_percentage(c.em, c.n), format_percentage(c.gm, c.n),
        format_percentage(c.mb, c.n));
  };
  row("Category", "N", "EM", "GM", "MB");
  out += std::string(width + 34, '-') + "\n";
  if (by_taxonomy) {
    for (const auto& [level1, c] : report.per_taxonomy) counts_row(level1, c);
    out += std::string(width + 34, '-') + "\n";
  }
  counts_row("Overall", report.overall);
  return out;
}

std::string_view to_string(FilterDecision d) {
  switch (d) {
    case FilterDecision::discard: return "discard";
    case FilterDecision::retain: return "retain";
    case FilterDecision::review: return "review";
  }
  return "?";
}

std::size_t majority(std::size_t models) { return models / 2 + 1; }

FilterDecision classify(std::size_t successes, std::size_t models) {
  if (models == 0) throw Error("attack-defense filter needs at least one model");
  if (successes > models) throw Error("more successes than models");
  if (successes == 0) return FilterDecision::review;
  return successes >= majority(models) ? FilterDecision::discard : FilterDecision::retain;
}

void OutcomeMatrix::check() const {
  if (models.empty()) throw Error("outcome matrix needs at least one model");
  for (const auto& [id, v] : outcomes) {
    if (v.size() != models.size()) {
      throw Error("instance " + id + ": expected " + std::to_string(models.size()) + " outcomes, got " +
                  std::to_string(v.size()));
    }
  }
}

SuccessMetric parse_success_metric(std::string_view text) {
  if (text == "em") return SuccessMetric::em;
  if (text == "gm") return SuccessMetric::gm;
  throw Error("metric must be 'em' or 'gm', got '" + std::string(text) + "'");
}

OutcomeMatrix outcome_matrix(const std::vector<std::pair<std::string, std::vector<ScoreRecord>>>& per_model,
                             SuccessMetric metric) {
  OutcomeMatrix m;
  for (const auto& [model, records] : per_model) {
    if (std::find(m.models.begin(), m.models.end(), model) != m.models.end()) {
      throw Error("model " + model + " listed twice");
    }
    m.models.push_back(model);
  }
  for (std::size_t k = 0; k < per_model.size(); ++k) {
    for (const ScoreRecord& r : per_model[k].second) {
      auto& v = m.outcomes[r.score.instance_id];
      v.resize(per_model.size(), false);
      v[k] = metric == SuccessMetric::em ? r.score.em : r.score.gm;
    }
  }
  m.check();
  return m;
}

FilterPartition attack_defense_filter(const OutcomeMatrix& outcomes) {
  outcomes.check();
  FilterPartition p;
  for (const auto& [id, v] : outcomes.outcomes) {
    const auto s = static_cast<std::size_t>(std::count(v.begin(), v.end(), true));
    switch (classify(s, outcomes.models.size())) {
      case FilterDecision::discard: p.discard.push_back(id); break;
      case FilterDecision::retain: p.retain.push_back(id); break;
      case FilterDecision::review: p.review.push_back(id); break;
    }
  }
  return p;
}

json to_json(const FilterPartition& p) {
  return {{"schema_version", kSchemaVersion}, {"discard", p.discard}, {"retain", p.retain}, {"review", p.review}};
}

std::string templated_user_query(const std::string& description) {
  return "The script runs but its results look wrong: " + description +
         ". Please fix the query so that it returns the intended data.";
}

BenchmarkInstance instance_from_injection(std::string instance_id, const InjectionResult& result,
                                          const MutationOperator& op, const SqlScript& reference,
                                          std::vector<std::string> ddl, std::string domain) {
  BenchmarkInstance i;
  i.instance_id = std::move(instance_id);
  i.task_type = op.bug_class;
  i.ddl = std::move(ddl);
  i.issue_sql = result.issue_sql.text;
  if (i.task_type == TaskType::syntax) {
    i.error_message = first_error_message(result.diagnostics);
  } else {
    i.user_query = templated_user_query(op.description);
  }
  i.reference_sqls = {reference.text};
  i.taxonomy = result.taxonomy;
  i.domain = std::move(domain);
  return i;
}

}  // namespace sqldebug
