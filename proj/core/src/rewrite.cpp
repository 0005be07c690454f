#include "contextdb/rewrite.hpp"

#include "contextdb/error.hpp"
#include "contextdb/random_db.hpp"

#include <mutex>
#include <set>

namespace contextdb {

std::string RewriteRule::name() const {
  switch (kind) {
    case RuleKind::Associative: return direction == Assoc::Left ? "associative-left" : "associative-right";
    case RuleKind::Distributive: return "distributive";
    case RuleKind::Grouping: return "grouping";
    case RuleKind::RestrictionPropagation: return "restriction-propagation";
  }
  return {};
}

std::optional<RewriteRule> parse_rule_name(std::string_view name) {
  if (name == "associative" || name == "associative-left") return RewriteRule::associative(Assoc::Left);
  if (name == "associative-right") return RewriteRule::associative(Assoc::Right);
  if (name == "distributive") return RewriteRule::distributive();
  if (name == "grouping") return RewriteRule::grouping();
  if (name == "restriction-propagation") return RewriteRule::restriction_propagation();
  return std::nullopt;
}

namespace {

[[noreturn]] void no_match(const RewriteRule& rule, const Expr& e) {
  throw Error(ErrorCode::NoMatch, rule.name() + " does not apply to " + print(e), {{"rule", rule.name()}});
}

ExprPtr rewrite_here(const RewriteRule& rule, const ExprPtr& e) {
  switch (rule.kind) {
    case RuleKind::Associative: {
      if (e->kind != ExprKind::Compose) no_match(rule, *e);
      const auto& outer = e->children[0];
      const auto& inner = e->children[1];
      if (rule.direction == Assoc::Left) {
        if (inner->kind != ExprKind::Compose) no_match(rule, *e);
        return make_compose(make_compose(outer, inner->children[0]), inner->children[1]);
      }
      if (outer->kind != ExprKind::Compose) no_match(rule, *e);
      return make_compose(outer->children[0], make_compose(outer->children[1], inner));
    }
    case RuleKind::Distributive: {
      if (e->kind != ExprKind::Compose || e->children[0]->kind != ExprKind::Pair) no_match(rule, *e);
      std::vector<ExprPtr> members;
      for (const auto& g : e->children[0]->children) members.push_back(make_compose(g, e->children[1]));
      return make_pair(std::move(members));
    }
    case RuleKind::Grouping: {
      if (e->kind != ExprKind::Pair) no_match(rule, *e);
      const ExprPtr* shared = nullptr;
      std::vector<ExprPtr> outers;
      for (const auto& m : e->children) {
        if (m->kind != ExprKind::Compose) no_match(rule, *e);
        if (!shared) {
          shared = &m->children[1];
        } else if (!equal(**shared, *m->children[1])) {
          no_match(rule, *e);
        }
        outers.push_back(m->children[0]);
      }
      return make_compose(make_pair(std::move(outers)), *shared);
    }
    case RuleKind::RestrictionPropagation: {
      if (!has_restriction(*e)) no_match(rule, *e);
      ExprPtr out = push_restrictions(e);
      if (equal(*out, *e)) no_match(rule, *e);
      return out;
    }
  }
  no_match(rule, *e);
}

}  // namespace

ExprPtr apply_rule(const RewriteRule& rule, const ExprPtr& expr, const ExprPath& path) {
  const ExprPtr& target = subexpression(expr, path);
  return replace_at(expr, path, rewrite_here(rule, target));
}

std::string RewriteTrace::to_string() const {
  std::string out;
  for (const auto& s : steps) {
    out += s.rule.name() + " @ " + print_path(s.path) + " : " + print(*s.before) + " => " + print(*s.after) + "\n";
  }
  return out;
}

ExprPtr replay(const RewriteTrace& trace, const ExprPtr& start) {
  ExprPtr cur = start;
  for (const auto& s : trace.steps) cur = apply_rule(s.rule, cur, s.path);
  return cur;
}

std::shared_ptr<const EvaluatedFunction> ResultCache::find(const std::string& text, const std::string& snapshot) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find({text, snapshot});
  return it == entries_.end() ? nullptr : it->second;
}

bool ResultCache::contains(const std::string& text, const std::string& snapshot) const {
  std::shared_lock lock(mu_);
  return entries_.contains({text, snapshot});
}

void ResultCache::insert(const std::string& text, const std::string& snapshot, EvaluatedFunction value) {
  auto entry = std::make_shared<const EvaluatedFunction>(std::move(value));
  std::unique_lock lock(mu_);
  auto& slot = entries_[{text, snapshot}];
  if (!slot) slot = std::move(entry);
}

void ResultCache::declare(const std::string& text, const std::string& snapshot) {
  std::unique_lock lock(mu_);
  entries_.try_emplace({text, snapshot}, nullptr);
}

std::size_t ResultCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

void ResultCache::clear() {
  std::unique_lock lock(mu_);
  entries_.clear();
}

namespace {

struct Score {
  std::size_t cached = 0;
  std::size_t nodes = 0;
};

Score score(const ExprPtr& e, const ResultCache& cache, const std::string& snapshot) {
  Score s;
  std::set<std::string> hits;
  for (const auto& p : all_paths(e)) {
    std::string text = print(*subexpression(e, p));
    if (cache.contains(text, snapshot)) hits.insert(text);
  }
  s.cached = hits.size();
  s.nodes = node_count(*e);
  return s;
}

bool improves(const Score& next, const Score& cur) {
  if (next.cached != cur.cached) return next.cached > cur.cached;
  return next.cached > 0 && next.nodes < cur.nodes;
}

// Post-order: children left to right, then the node itself.
void post_order(const ExprPtr& e, ExprPath& cur, std::vector<ExprPath>& out) {
  for (std::size_t i = 0; i < e->children.size(); ++i) {
    cur.push_back(i);
    post_order(e->children[i], cur, out);
    cur.pop_back();
  }
  out.push_back(cur);
}

}  // namespace

std::pair<ExprPtr, RewriteTrace> rewrite_for_cache(const ExprPtr& expr, const ResultCache& cache,
                                                   const std::string& snapshot) {
  RewriteTrace trace;
  if (cache.empty()) return {expr, trace};
  static const RewriteRule rules[] = {
      RewriteRule::associative(Assoc::Left), RewriteRule::associative(Assoc::Right), RewriteRule::distributive(),
      RewriteRule::grouping(), RewriteRule::restriction_propagation()};
  ExprPtr cur = expr;
  Score cur_score = score(cur, cache, snapshot);
  for (int step = 0; step < 32; ++step) {
    std::vector<ExprPath> paths;
    ExprPath scratch;
    post_order(cur, scratch, paths);
    std::optional<RewriteStep> best;
    Score best_score = cur_score;
    for (const auto& path : paths) {
      for (const auto& rule : rules) {
        ExprPtr next;
        try {
          next = apply_rule(rule, cur, path);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::NoMatch) continue;
          throw;
        }
        Score s = score(next, cache, snapshot);
        if (improves(s, best_score)) {
          best_score = s;
          best = RewriteStep{rule, path, cur, next};
        }
      }
    }
    if (!best) break;
    cur = best->after;
    cur_score = best_score;
    trace.steps.push_back(std::move(*best));
  }
  return {cur, trace};
}

namespace {

std::shared_ptr<const EvaluatedFunction> cached_full(const ExprPtr& e, const DatabaseInstance& db, ResultCache& cache) {
  const std::string text = print(*e);
  if (auto hit = cache.find(text, db.snapshot_id())) return hit;
  EvaluatedFunction out{e, FiniteFunction{e->source, e->target, {}}};
  if (e->kind == ExprKind::Compose) {
    auto outer = cached_full(e->children[0], db, cache);
    auto inner = cached_full(e->children[1], db, cache);
    for (const auto& [x, y] : inner->function.map) {
      if (const Value* z = outer->function.at(y)) out.function.map.emplace_hint(out.function.map.end(), x, *z);
    }
  } else if (e->kind == ExprKind::Pair) {
    std::vector<std::shared_ptr<const EvaluatedFunction>> parts;
    std::vector<NodeRef> targets;
    for (const auto& c : e->children) {
      parts.push_back(cached_full(c, db, cache));
      targets.push_back(c->target);
    }
    for (const auto& [x, y0] : parts.front()->function.map) {
      std::vector<Value> vals{y0};
      bool defined = true;
      for (std::size_t i = 1; i < parts.size() && defined; ++i) {
        const Value* y = parts[i]->function.at(x);
        if (y) vals.push_back(*y);
        else defined = false;
      }
      if (defined) out.function.map.emplace_hint(out.function.map.end(), x, assemble_tuple(targets, vals));
    }
  } else {
    out = eval(e, db);
  }
  cache.insert(text, db.snapshot_id(), out);
  return cache.find(text, db.snapshot_id());
}

}  // namespace

EvaluatedFunction eval_cached(const ExprPtr& e, const DatabaseInstance& db, ResultCache& cache) {
  ExprPtr pushed = push_restrictions(e);
  ExprPtr core = pushed->kind == ExprKind::Restrict ? pushed->children[0] : pushed;
  auto full = cached_full(core, db, cache);
  EvaluatedFunction out{e, FiniteFunction{e->source, e->target, {}}};
  if (core == pushed) {
    out.function.map = full->function.map;
    return out;
  }
  Evaluator ev(db);
  for (const auto& [x, y] : full->function.map) {
    if (ev.satisfies(pushed->restriction, pushed->source, x)) out.function.map.emplace_hint(out.function.map.end(), x, y);
  }
  return out;
}

EquivalenceVerdict check_equivalence(const std::shared_ptr<const Context>& ctx, const ExprPtr& e1,
                                     const ExprPtr& e2, std::size_t trials, std::uint64_t seed) {
  if (e1->source != e2->source || e1->target != e2->target) {
    throw Error(ErrorCode::TypeError,
                print(*e1) + " and " + print(*e2) + " are not parallel",
                {{"left", e1->source.name() + "->" + e1->target.name()},
                 {"right", e2->source.name() + "->" + e2->target.name()}});
  }
  RandomDbOptions options;
  collect_literals(*e1, options.pools);
  collect_literals(*e2, options.pools);
  std::mt19937_64 rng(seed);
  EquivalenceVerdict verdict;
  for (std::size_t t = 0; t < trials; ++t) {
    auto db = std::make_shared<const DatabaseInstance>(random_database(ctx, rng, options));
    auto f1 = eval(e1, *db).function.map;
    auto f2 = eval(e2, *db).function.map;
    ++verdict.trials_run;
    if (f1 == f2) continue;
    verdict.equivalent_on_samples = false;
    verdict.counterexample_db = db;
    for (const auto& [x, y] : f1) {
      auto it = f2.find(x);
      if (it == f2.end() || it->second != y) {
        verdict.counterexample_key = x;
        verdict.detail = print(*e1) + "(" + to_string(x) + ") = " + to_string(y) + " but " + print(*e2) + "(" +
                         to_string(x) + ") = " + (it == f2.end() ? std::string("undefined") : to_string(it->second));
        break;
      }
    }
    if (!verdict.counterexample_key) {
      for (const auto& [x, y] : f2) {
        if (!f1.contains(x)) {
          verdict.counterexample_key = x;
          verdict.detail = print(*e1) + "(" + to_string(x) + ") is undefined but " + print(*e2) + "(" +
                           to_string(x) + ") = " + to_string(y);
          break;
        }
      }
    }
    break;
  }
  return verdict;
}

}  // namespace contextdb
