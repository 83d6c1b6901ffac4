// Command-line front end: parse, lint, profile, normalize, score, inject,
// filter and report.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sqldebug/complexity.hpp"
#include "sqldebug/harness.hpp"
#include "sqldebug/injector.hpp"
#include "sqldebug/parser.hpp"
#include "sqldebug/plan.hpp"
#include "sqldebug/validator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sqldebug;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Catalog read_catalog(const std::vector<std::string>& ddl_files) {
  std::vector<SqlScript> scripts;
  for (const std::string& f : ddl_files) scripts.emplace_back(read_file(f));
  return load_catalog(scripts);
}

/// Writes to the file, or to stdout for "-" / empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

json profile_json(const ComplexityProfile& p) {
  return {{"depth", p.depth}, {"width", p.width},         {"lines", p.lines},
          {"tokens", p.tokens}, {"functions", p.functions}, {"composite", p.composite}};
}

json diagnostic_json(const Diagnostic& d, const std::string& file) {
  return {{"schema_version", kSchemaVersion},
          {"file", file},
          {"taxonomy", json::array({d.taxonomy.level1, d.taxonomy.level2, d.taxonomy.level3})},
          {"message", d.message},
          {"span", {{"start", d.span.begin}, {"end", d.span.end}}},
          {"severity", std::string(to_string(d.severity))}};
}

// ---------------------------------------------------------------- commands

int cmd_parse(const std::string& file, bool recover) {
  const SqlScript script(read_file(file));
  if (!recover) {
    std::cout << dump(parse_script(script));
    return 0;
  }
  const ParseResult r = parse_recovering(script);
  std::cout << dump(r.tree);
  for (const ParseError& e : r.errors) std::cerr << file << ": " << e.message << "\n";
  return r.clean() ? 0 : 1;
}

int cmd_lint(const std::vector<std::string>& files, const std::vector<std::string>& ddl) {
  const Catalog catalog = read_catalog(ddl);
  bool clean = true;
  for (const std::string& f : files) {
    for (const Diagnostic& d : lint(SqlScript(read_file(f)), catalog)) {
      std::cout << diagnostic_json(d, f).dump() << "\n";
      clean = clean && d.severity != Severity::error;
    }
  }
  return clean ? 0 : 1;
}

int cmd_profile(const std::vector<std::string>& files, const std::vector<std::string>& ddl,
                const ProfilerConfig& config, bool corpus) {
  config.check();
  const Catalog catalog = read_catalog(ddl);
  ComplexityProfile sum;
  for (const std::string& f : files) {
    const ComplexityProfile p = profile(SqlScript(read_file(f)), config, &catalog);
    json row = profile_json(p);
    row["schema_version"] = kSchemaVersion;
    row["file"] = f;
    row["passes_threshold"] = passes_threshold(p, config);
    std::cout << row.dump() << "\n";
    sum.depth += p.depth;
    sum.width += p.width;
    sum.lines += p.lines;
    sum.tokens += p.tokens;
    sum.functions += p.functions;
    sum.composite += p.composite;
  }
  if (corpus && !files.empty()) {
    const double n = static_cast<double>(files.size());
    json avg = {{"schema_version", kSchemaVersion},
                {"file", "average"},
                {"count", files.size()},
                {"depth", sum.depth / n},
                {"width", sum.width / n},
                {"lines", sum.lines / n},
                {"tokens", sum.tokens / n},
                {"functions", sum.functions / n},
                {"composite", sum.composite / n}};
    std::cout << avg.dump() << "\n";
  }
  return 0;
}

int cmd_normalize(const std::string& file, const std::vector<std::string>& ddl, bool as_json) {
  const Catalog catalog = read_catalog(ddl);
  const SyntaxTree tree = parse_script(SqlScript(read_file(file)));
  const auto diags = validate(tree, catalog);
  for (const Diagnostic& d : diags) {
    if (d.severity == Severity::error) throw Error(file + ": " + to_string(d.taxonomy) + ": " + d.message);
  }
  const CanonicalPlan plan = normalize(lower(tree, catalog));
  if (as_json) {
    std::cout << json{{"schema_version", kSchemaVersion}, {"plan", plan.text}, {"digest", plan.digest}}.dump()
              << "\n";
  } else {
    std::cout << plan.text << "digest " << plan.digest << "\n";
  }
  return 0;
}

int cmd_score(const std::string& instances_path, const std::string& predictions_path, const std::string& out,
              const std::string& per_instance, unsigned threads) {
  const auto instances = read_instances(instances_path);
  const auto predictions = read_predictions(predictions_path);
  check_prediction_ids(predictions, instances);
  auto scores = score_all(instances, predictions, threads);

  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return instances[a].instance_id < instances[b].instance_id; });

  Output lines(per_instance);
  std::vector<std::pair<TaxonomyPath, InstanceScore>> tagged;
  for (std::size_t i : order) {
    lines.stream() << to_json(scores[i], instances[i].taxonomy).dump() << "\n";
    tagged.emplace_back(instances[i].taxonomy, scores[i]);
  }
  if (tagged.empty()) throw Error("no instances to score");
  Output report(out);
  report.stream() << to_json(aggregate(tagged)).dump(2) << "\n";
  return 0;
}

int cmd_inject(const std::string& sql_path, const std::vector<std::string>& ddl, const std::string& cls,
               std::size_t k, double budget, const std::string& out, const std::string& domain,
               const std::string& only_operator) {
  const Catalog catalog = read_catalog(ddl);
  const TaskType bug_class = parse_task_type(cls);
  const SqlScript reference(read_file(sql_path));
  const auto diags = lint(reference, catalog);
  for (const Diagnostic& d : diags) {
    if (d.severity == Severity::error) throw Error(sql_path + ": reference does not validate: " + d.message);
  }
  std::vector<const MutationOperator*> ops;
  if (!only_operator.empty()) {
    ops.push_back(&find_operator(only_operator));
    if (ops.front()->bug_class != bug_class) throw Error("operator " + only_operator + " is not of class " + cls);
  } else {
    const FeatureSet features = structural_profile(parse_script(reference), &catalog);
    ops = candidate_bugs(features, TaxonomyRegistry::standard(), k, bug_class);
  }
  std::vector<std::string> ddl_text;
  for (const std::string& f : ddl) ddl_text.push_back(read_file(f));
  const std::string stem = fs::path(sql_path).stem().string();

  Output output(out);
  std::size_t written = 0;
  for (const MutationOperator* op : ops) {
    InjectionResult r;
    try {
      r = inject(reference, *op, catalog, budget);
    } catch (const Error& e) {
      std::cerr << "skipped: " << e.what() << "\n";
      continue;
    }
    const BenchmarkInstance i = instance_from_injection(stem + "-" + op->id, r, *op, reference, ddl_text, domain);
    output.stream() << to_json(i).dump() << "\n";
    ++written;
  }
  std::cerr << "wrote " << written << " instance(s)\n";
  return 0;
}

int cmd_filter(const std::vector<std::string>& score_files, const std::string& metric, const std::string& out) {
  std::vector<std::pair<std::string, std::vector<ScoreRecord>>> per_model;
  for (const std::string& spec : score_files) {
    // "model=path" or just "path" (model named after the file stem)
    const auto eq = spec.find('=');
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    const std::string model = eq == std::string::npos ? fs::path(path).stem().string() : spec.substr(0, eq);
    per_model.emplace_back(model, read_scores(path));
  }
  const FilterPartition p = attack_defense_filter(outcome_matrix(per_model, parse_success_metric(metric)));
  Output output(out);
  output.stream() << to_json(p).dump(2) << "\n";
  return 0;
}

int cmd_report(const std::string& scores_path, bool by_taxonomy, bool as_json) {
  const auto records = read_scores(scores_path);
  std::vector<std::pair<TaxonomyPath, InstanceScore>> tagged;
  for (const ScoreRecord& r : records) tagged.emplace_back(r.taxonomy, r.score);
  const ScoreReport report = aggregate(tagged);
  if (as_json) {
    std::cout << to_json(report).dump(2) << "\n";
  } else {
    std::cout << format_report(report, by_taxonomy);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sqldebug: execution-free SQL debugging toolkit"};
  app.require_subcommand(1);

  std::string file;
  std::vector<std::string> files;
  std::vector<std::string> ddl;
  bool flag = false;
  bool as_json = false;

  auto* parse = app.add_subcommand("parse", "Print the syntax tree of a SQL file");
  parse->add_option("file", file, "SQL file")->required();
  parse->add_flag("--recover", flag, "Recover from errors with Raw nodes");

  auto* lint_cmd = app.add_subcommand("lint", "Validate SQL files against a catalog (JSONL diagnostics)");
  lint_cmd->add_option("files", files, "SQL files")->required();
  lint_cmd->add_option("--ddl", ddl, "DDL file(s) defining the catalog");

  ProfilerConfig config;
  auto* profile_cmd = app.add_subcommand("profile", "Complexity profile per script");
  profile_cmd->add_option("files", files, "SQL files")->required();
  profile_cmd->add_option("--ddl", ddl, "DDL file(s)");
  profile_cmd->add_option("--alpha", config.alpha, "Weight of depth + width");
  profile_cmd->add_option("--beta", config.beta, "Weight of line count");
  profile_cmd->add_option("--tau", config.tau, "Seed threshold (composite must exceed it)");
  profile_cmd->add_flag("--corpus", flag, "Append an averages row");

  auto* normalize_cmd = app.add_subcommand("normalize", "Print the canonical plan and its digest");
  normalize_cmd->add_option("file", file, "SQL file")->required();
  normalize_cmd->add_option("--ddl", ddl, "DDL file(s)");
  normalize_cmd->add_flag("--json", as_json, "Emit JSON");

  std::string instances;
  std::string predictions;
  std::string out;
  std::string per_instance;
  unsigned threads = 0;
  auto* score = app.add_subcommand("score", "Score predictions with EM, GM and MB");
  score->add_option("--instances", instances, "Benchmark instances (JSONL)")->required();
  score->add_option("--predictions", predictions, "Predictions (JSONL)")->required();
  score->add_option("--out", out, "ScoreReport JSON output (default: stdout)");
  score->add_option("--per-instance", per_instance, "Per-instance JSONL output (default: stdout)");
  score->add_option("--threads", threads, "Worker threads (0: hardware concurrency)");

  std::string cls;
  std::size_t k = 3;
  double budget = kDefaultBudget;
  std::string domain = "general";
  std::string operator_id;
  auto* inject_cmd = app.add_subcommand("inject", "Inject taxonomy-labeled bugs into a reference script");
  inject_cmd->add_option("--sql", file, "Reference SQL file")->required();
  inject_cmd->add_option("--ddl", ddl, "DDL file(s)")->required();
  inject_cmd->add_option("--class", cls, "syntax or semantic")->required()->check(CLI::IsMember({"syntax", "semantic"}));
  inject_cmd->add_option("--k", k, "Number of candidate bug types");
  inject_cmd->add_option("--budget", budget, "Maximum normalized edit distance");
  inject_cmd->add_option("--out", out, "Output JSONL (default: stdout)");
  inject_cmd->add_option("--domain", domain, "Domain label for the instances");
  inject_cmd->add_option("--operator", operator_id, "Apply only this operator");

  std::string metric = "gm";
  auto* filter = app.add_subcommand("filter", "Attack-defense partition over per-model score files");
  filter->add_option("--scores", files, "Score JSONL per model, as path or model=path")->required();
  filter->add_option("--metric", metric, "Success metric")->check(CLI::IsMember({"em", "gm"}));
  filter->add_option("--out", out, "Output JSON (default: stdout)");

  auto* report = app.add_subcommand("report", "Percentage table over a score JSONL");
  report->add_option("scores", file, "Per-instance score JSONL")->required();
  report->add_flag("--by-taxonomy", flag, "Add one row per level-1 category");
  report->add_flag("--json", as_json, "Emit the ScoreReport JSON instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*parse) return cmd_parse(file, flag);
    if (*lint_cmd) return cmd_lint(files, ddl);
    if (*profile_cmd) return cmd_profile(files, ddl, config, flag);
    if (*normalize_cmd) return cmd_normalize(file, ddl, as_json);
    if (*score) return cmd_score(instances, predictions, out, per_instance, threads);
    if (*inject_cmd) return cmd_inject(file, ddl, cls, k, budget, out, domain, operator_id);
    if (*filter) return cmd_filter(files, metric, out);
    if (*report) return cmd_report(file, flag, as_json);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
