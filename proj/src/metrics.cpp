#include "sqldebug/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "sql_functions.hpp"
#include "sqldebug/parser.hpp"
#include "sqldebug/validator.hpp"

namespace sqldebug {

void EditConfig::check() const {
  if (insert_cost <= 0 || delete_cost <= 0 || relabel_cost <= 0) {
    throw Error("edit costs must be positive");
  }
}

std::size_t LabeledTree::add(std::string label, std::size_t parent) {
  labels.push_back(std::move(label));
  children.emplace_back();
  const std::size_t id = labels.size() - 1;
  if (id > 0) children.at(parent).push_back(id);
  return id;
}

LabeledTree labeled_tree(const SyntaxTree& tree) {
  LabeledTree out;
  if (tree.empty()) return out;
  auto visit = [&](auto&& self, NodeId id, std::size_t parent) -> void {
    const Node& n = tree[id];
    const std::size_t me = out.add(std::string(to_string(n.kind)) + "|" + n.label, parent);
    for (NodeId c : n.children) {
      if (tree[c].kind != NodeKind::Comment) self(self, c, me);
    }
  };
  visit(visit, tree.root(), 0);
  return out;
}

namespace {

/// Post-order numbering (1-based) with leftmost-leaf descendants.
struct PostOrder {
  std::vector<const std::string*> label;  // [1..n]
  std::vector<std::size_t> lml;           // [1..n]
  std::vector<std::size_t> keyroots;

  explicit PostOrder(const LabeledTree& t) {
    label.push_back(nullptr);
    lml.push_back(0);
    if (t.size() == 0) return;
    auto visit = [&](auto&& self, std::size_t id) -> std::size_t {
      std::size_t leftmost = 0;
      for (std::size_t c : t.children[id]) {
        const std::size_t l = self(self, c);
        if (leftmost == 0) leftmost = l;
      }
      label.push_back(&t.labels[id]);
      const std::size_t me = label.size() - 1;
      lml.push_back(leftmost == 0 ? me : leftmost);
      return lml.back();
    };
    visit(visit, 0);
    const std::size_t n = label.size() - 1;
    std::vector<bool> seen(n + 1, false);
    for (std::size_t i = n; i >= 1; --i) {
      if (!seen[lml[i]]) {
        keyroots.push_back(i);
        seen[lml[i]] = true;
      }
    }
    std::reverse(keyroots.begin(), keyroots.end());
  }
};

}  // namespace

std::int64_t tree_edit_cost(const LabeledTree& a, const LabeledTree& b, const EditConfig& config) {
  config.check();
  const PostOrder pa(a);
  const PostOrder pb(b);
  const std::size_t n = pa.label.size() - 1;
  const std::size_t m = pb.label.size() - 1;
  if (n == 0) return static_cast<std::int64_t>(m) * config.insert_cost;
  if (m == 0) return static_cast<std::int64_t>(n) * config.delete_cost;

  std::vector<std::int64_t> td((n + 1) * (m + 1), 0);
  auto tree_dist = [&](std::size_t i, std::size_t j) -> std::int64_t& { return td[i * (m + 1) + j]; };
  std::vector<std::int64_t> fd((n + 2) * (m + 2), 0);

  for (std::size_t i : pa.keyroots) {
    for (std::size_t j : pb.keyroots) {
      const std::size_t li = pa.lml[i];
      const std::size_t lj = pb.lml[j];
      const std::size_t rows = i - li + 2;
      const std::size_t cols = j - lj + 2;
      // forest distance over [li..x] x [lj..y], indexed with offset (li-1, lj-1)
      auto f = [&](std::size_t x, std::size_t y) -> std::int64_t& { return fd[x * cols + y]; };
      f(0, 0) = 0;
      for (std::size_t x = 1; x < rows; ++x) f(x, 0) = f(x - 1, 0) + config.delete_cost;
      for (std::size_t y = 1; y < cols; ++y) f(0, y) = f(0, y - 1) + config.insert_cost;
      for (std::size_t x = 1; x < rows; ++x) {
        const std::size_t ai = li + x - 1;
        for (std::size_t y = 1; y < cols; ++y) {
          const std::size_t bj = lj + y - 1;
          const std::int64_t del = f(x - 1, y) + config.delete_cost;
          const std::int64_t ins = f(x, y - 1) + config.insert_cost;
          if (pa.lml[ai] == li && pb.lml[bj] == lj) {
            const std::int64_t rel = f(x - 1, y - 1) + (*pa.label[ai] == *pb.label[bj] ? 0 : config.relabel_cost);
            f(x, y) = std::min({del, ins, rel});
            tree_dist(ai, bj) = f(x, y);
          } else {
            const std::size_t px = pa.lml[ai] - li;  // forest before subtree ai
            const std::size_t py = pb.lml[bj] - lj;
            f(x, y) = std::min({del, ins, f(px, py) + tree_dist(ai, bj)});
          }
        }
      }
    }
  }
  return tree_dist(n, m);
}

Distance tree_distance(const SyntaxTree& a, const SyntaxTree& b, const EditConfig& config) {
  const LabeledTree la = labeled_tree(a);
  const LabeledTree lb = labeled_tree(b);
  const auto size = static_cast<std::int64_t>(std::max(la.size(), lb.size()));
  return {tree_edit_cost(la, lb, config), std::max<std::int64_t>(size, 1)};
}

double tree_edit_distance(const SyntaxTree& a, const SyntaxTree& b, const EditConfig& config) {
  return tree_distance(a, b, config).value();
}

namespace {

std::vector<std::string> significant_tokens(const SqlScript& script) {
  std::vector<std::string> out;
  for (const Token& t : tokenize_lenient(script.text).tokens) {
    if (!t.is_trivia()) out.push_back(normalized_token_text(t));
  }
  return out;
}

}  // namespace

Distance token_distance(const SqlScript& a, const SqlScript& b) {
  const auto ta = significant_tokens(a);
  const auto tb = significant_tokens(b);
  std::vector<std::size_t> prev(tb.size() + 1);
  std::vector<std::size_t> cur(tb.size() + 1);
  for (std::size_t j = 0; j <= tb.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= ta.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= tb.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ta[i - 1] == tb[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  const auto size = static_cast<std::int64_t>(std::max(ta.size(), tb.size()));
  return {static_cast<std::int64_t>(prev[tb.size()]), std::max<std::int64_t>(size, 1)};
}

ScriptDistance script_distance(const SqlScript& a, const SqlScript& b, const EditConfig& config) {
  const ParseResult pa = parse_recovering(a);
  const ParseResult pb = parse_recovering(b);
  if (has_raw(pa.tree) || has_raw(pb.tree)) return {token_distance(a, b), true};
  return {tree_distance(pa.tree, pb.tree, config), false};
}

std::string normalize_text(std::string_view text) {
  std::vector<std::string> lines;
  std::string line;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r' ||
                               line.back() == '\f' || line.back() == '\v')) {
        line.pop_back();
      }
      lines.push_back(std::move(line));
      line.clear();
    } else {
      line += text[i];
    }
  }
  std::size_t first = 0;
  while (first < lines.size() && lines[first].empty()) ++first;
  std::size_t last = lines.size();
  while (last > first && lines[last - 1].empty()) --last;
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    if (i > first) out += '\n';
    out += lines[i];
  }
  return out;
}

bool exact_match(const SqlScript& prediction, const std::vector<SqlScript>& references) {
  const std::string pred = normalize_text(prediction.text);
  return std::any_of(references.begin(), references.end(),
                     [&](const SqlScript& r) { return normalize_text(r.text) == pred; });
}

std::optional<CanonicalPlan> canonical_plan(const SqlScript& script, const Catalog& catalog) {
  try {
    const SyntaxTree tree = parse_script(script);
    if (!passes(tree, catalog)) return std::nullopt;
    return normalize(lower(tree, catalog));
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool graph_match(const SqlScript& prediction, const std::vector<SqlScript>& references, const Catalog& catalog) {
  const auto pred = canonical_plan(prediction, catalog);
  if (!pred) return false;
  return std::any_of(references.begin(), references.end(), [&](const SqlScript& r) {
    const auto ref = canonical_plan(r, catalog);
    return ref && plans_isomorphic(*pred, *ref);
  });
}

ModifyBetter modify_better(const SqlScript& prediction, const SqlScript& issue,
                           const std::vector<SqlScript>& references, const EditConfig& config) {
  if (references.empty()) throw Error("modify_better needs at least one reference");
  // Both sides are measured with the same distance so that the comparison is
  // like for like: tree distance when every script parses without Raw
  // recovery nodes, token distance otherwise.
  auto parsed = [](const SqlScript& s) { return parse_recovering(s).tree; };
  const SyntaxTree pred_tree = parsed(prediction);
  const SyntaxTree issue_tree = parsed(issue);
  std::vector<SyntaxTree> ref_trees;
  for (const SqlScript& r : references) ref_trees.push_back(parsed(r));
  bool fallback = has_raw(pred_tree) || has_raw(issue_tree);
  for (const SyntaxTree& t : ref_trees) fallback = fallback || has_raw(t);

  ModifyBetter out;
  out.fallback_used = fallback;
  std::optional<Distance> best_pred;
  std::optional<Distance> best_issue;
  for (std::size_t i = 0; i < references.size(); ++i) {
    const Distance dp = fallback ? token_distance(prediction, references[i])
                                 : tree_distance(pred_tree, ref_trees[i], config);
    const Distance di = fallback ? token_distance(issue, references[i])
                                 : tree_distance(issue_tree, ref_trees[i], config);
    if (!best_pred || dp < *best_pred) best_pred = dp;
    if (!best_issue || di < *best_issue) best_issue = di;
  }
  out.distance_pred = *best_pred;
  out.distance_issue = *best_issue;
  out.mb = out.distance_pred < out.distance_issue;
  return out;
}

InstanceScore score_instance(const BenchmarkInstance& instance, const SqlScript& prediction) {
  std::vector<SqlScript> ddl(instance.ddl.begin(), instance.ddl.end());
  const Catalog catalog = load_catalog(ddl);
  const std::vector<SqlScript> refs(instance.reference_sqls.begin(), instance.reference_sqls.end());
  InstanceScore s;
  s.instance_id = instance.instance_id;
  s.em = exact_match(prediction, refs);
  s.gm = graph_match(prediction, refs, catalog);
  const ModifyBetter mb = modify_better(prediction, SqlScript(instance.issue_sql), refs);
  s.mb = mb.mb;
  s.distance_pred = mb.distance_pred.value();
  s.distance_issue = mb.distance_issue.value();
  s.fallback_used = mb.fallback_used;
  return s;
}

std::vector<InstanceScore> score_all(const std::vector<BenchmarkInstance>& instances,
                                     const std::map<std::string, Prediction>& predictions, unsigned threads) {
  std::vector<InstanceScore> out(instances.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(instances.size(), 1)));
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(instances.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < instances.size(); i = next++) {
      const auto it = predictions.find(instances[i].instance_id);
      const SqlScript pred(it == predictions.end() ? std::string() : it->second.predict_sql);
      try {
        out[i] = score_instance(instances[i], pred);
      } catch (const std::exception& e) {
        errors[i] = "instance " + instances[i].instance_id + ": " + e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const std::string& e : errors) {
    if (!e.empty()) throw Error(e);
  }
  return out;
}

std::int64_t percentage_hundredths(std::size_t count, std::size_t n) {
  if (n == 0) throw Error("percentage of an empty set");
  const auto c = static_cast<std::int64_t>(count);
  const auto d = static_cast<std::int64_t>(n);
  return (20000 * c + d) / (2 * d);
}

std::string format_percentage(std::size_t count, std::size_t n) {
  const std::int64_t h = percentage_hundredths(count, n);
  std::string frac = std::to_string(h % 100);
  if (frac.size() < 2) frac = "0" + frac;
  return std::to_string(h / 100) + "." + frac;
}

ScoreReport aggregate(const std::vector<std::pair<TaxonomyPath, InstanceScore>>& scores) {
  if (scores.empty()) throw Error("cannot aggregate an empty score list");
  ScoreReport report;
  auto add = [](MetricCounts& c, const InstanceScore& s) {
    ++c.n;
    c.em += s.em ? 1 : 0;
    c.gm += s.gm ? 1 : 0;
    c.mb += s.mb ? 1 : 0;
  };
  for (const auto& [path, score] : scores) {
    add(report.overall, score);
    add(report.per_taxonomy[path.level1], score);
  }
  return report;
}

}  // namespace sqldebug
