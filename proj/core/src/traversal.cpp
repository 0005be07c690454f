#include "contextdb/traversal.hpp"

#include "contextdb/error.hpp"

#include <algorithm>
#include <set>

namespace contextdb {

TraversalAnswer answer(const TraversalQueryAst& q, const DatabaseInstance& db) {
  TraversalAnswer out{q, {}};
  Evaluator ev(db);
  for (const auto& k : db.enumerate(q.key)) {
    if (q.key_restriction && !ev.satisfies(*q.key_restriction, q.key, k)) continue;
    std::vector<Value> row;
    row.reserve(q.expressions.size());
    bool defined = true;
    for (const auto& e : q.expressions) {
      auto v = ev.apply(*e, k);
      if (!v) {
        defined = false;
        break;
      }
      row.push_back(std::move(*v));
    }
    if (defined) out.rows.emplace_hint(out.rows.end(), k, std::move(row));
  }
  return out;
}

namespace {

std::vector<std::size_t> single(std::size_t k) { return {k}; }

std::vector<ExprPtr> split(const ExprPtr& e) {
  if (!e->target.is_product()) return {e};
  std::vector<ExprPtr> out;
  auto append = [&out](std::vector<ExprPtr> more) { out.insert(out.end(), more.begin(), more.end()); };
  switch (e->kind) {
    case ExprKind::Pair:
      for (const auto& c : e->children) append(split(c));
      return out;
    case ExprKind::Compose:
      for (const auto& o : split(e->children[0])) out.push_back(make_compose(o, e->children[1]));
      return out;
    case ExprKind::Restrict:
      for (const auto& s : split(e->children[0])) out.push_back(make_restrict(s, e->restriction));
      return out;
    case ExprKind::Projection:
      for (std::size_t i = 0; i < e->target.arity(); ++i) {
        out.push_back(make_projection(e->source, NodeRef::simple(e->target.factors()[i]), single(e->positions[i])));
      }
      return out;
    case ExprKind::Product: {
      std::vector<NodeRef> sources;
      for (const auto& c : e->children) sources.push_back(c->source);
      auto layout = product_layout(sources);
      for (std::size_t i = 0; i < sources.size(); ++i) {
        std::vector<std::size_t> positions(sources[i].arity());
        for (std::size_t k = 0; k < layout.size(); ++k) {
          if (layout[k].part == i) positions[layout[k].factor] = k;
        }
        append(split(make_compose(e->children[i], make_projection(e->source, sources[i], positions))));
      }
      return out;
    }
    default:
      // identity on a product node, or an edge into one: project each factor
      for (std::size_t k = 0; k < e->target.arity(); ++k) {
        auto pi = make_projection(e->target, NodeRef::simple(e->target.factors()[k]), single(k));
        out.push_back(e->kind == ExprKind::Identity ? pi : make_compose(pi, e));
      }
      return out;
  }
}

}  // namespace

TraversalQueryAst split_product_targets(const TraversalQueryAst& q) {
  TraversalQueryAst out = q;
  out.expressions.clear();
  out.origins.clear();
  out.aliases.clear();
  for (std::size_t i = 0; i < q.expressions.size(); ++i) {
    auto parts = split(q.expressions[i]);
    for (auto& p : parts) {
      out.expressions.push_back(p);
      out.origins.push_back(i < q.origins.size() ? q.origins[i] : q.name);
      out.aliases.push_back(parts.size() == 1 && i < q.aliases.size() ? q.aliases[i] : "");
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> parallel_groups(const TraversalQueryAst& split_query) {
  std::map<NodeRef, std::vector<std::size_t>> by_target;
  std::vector<NodeRef> order;
  for (std::size_t i = 0; i < split_query.expressions.size(); ++i) {
    const auto& t = split_query.expressions[i]->target;
    if (!by_target.contains(t)) order.push_back(t);
    by_target[t].push_back(i);
  }
  std::vector<std::vector<std::size_t>> out;
  for (const auto& t : order) {
    if (by_target[t].size() > 1) out.push_back(by_target[t]);
  }
  return out;
}

bool is_tree(const TraversalQueryAst& q) {
  auto s = split_product_targets(q);
  return parallel_groups(s).empty();
}

std::optional<RelationMode> parse_relation_mode(std::string_view text) {
  if (text == "alias") return RelationMode::Alias;
  if (text == "eq" || text == "require_equalities") return RelationMode::RequireEqualities;
  return std::nullopt;
}

std::string_view to_string(RelationMode mode) {
  return mode == RelationMode::Alias ? "alias" : "require_equalities";
}

Relation induced_relation(const TraversalQueryAst& q, const DatabaseInstance& db, RelationMode mode) {
  TraversalQueryAst s = split_product_targets(q);
  TraversalAnswer ans = answer(s, db);
  auto groups = parallel_groups(s);

  std::vector<bool> keep(s.expressions.size(), true);
  std::vector<int> group_of(s.expressions.size(), -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t i : groups[g]) group_of[i] = static_cast<int>(g);
  }

  if (mode == RelationMode::RequireEqualities) {
    for (const auto& g : groups) {
      std::vector<std::pair<std::string, std::string>> details;
      std::size_t witnesses = 0;
      for (const auto& [k, row] : ans.rows) {
        bool agree = std::all_of(g.begin(), g.end(), [&](std::size_t i) { return row[i] == row[g.front()]; });
        if (!agree && witnesses < 10) {
          details.emplace_back("witness", to_string(k));
          ++witnesses;
        }
      }
      if (witnesses) {
        std::string exprs;
        for (std::size_t i : g) {
          if (!exprs.empty()) exprs += ", ";
          exprs += print(*s.expressions[i]);
          details.emplace_back("expression", print(*s.expressions[i]));
        }
        throw Error(ErrorCode::EqualityViolation, "parallel expressions " + exprs + " disagree", std::move(details));
      }
      for (std::size_t j = 1; j < g.size(); ++j) keep[g[j]] = false;
    }
  }

  Relation rel;
  rel.schema.name = q.name;
  rel.schema.key_name = q.key.name();
  rel.schema.key_attribute = q.key.name();
  std::set<std::string> taken{rel.schema.key_name};
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < s.expressions.size(); ++i) {
    if (!keep[i]) continue;
    kept.push_back(i);
    const auto& e = s.expressions[i];
    std::string attr = e->target.name();
    std::string name;
    if (!s.aliases[i].empty()) {
      name = s.aliases[i];
    } else if (mode == RelationMode::Alias && group_of[i] >= 0) {
      const auto& g = groups[group_of[i]];
      std::set<std::string> origins;
      for (std::size_t j : g) origins.insert(s.origins[j]);
      name = origins.size() == g.size() ? s.origins[i] + "." + attr : print(*e) + "." + attr;
    } else {
      name = attr;
    }
    if (taken.contains(name)) name = print(*e) + "." + attr;
    std::string unique = name;
    for (int n = 2; taken.contains(unique); ++n) unique = name + "#" + std::to_string(n);
    taken.insert(unique);
    rel.schema.columns.push_back({unique, attr, print(*e)});
  }
  for (const auto& [k, row] : ans.rows) {
    std::vector<Value> out{k};
    for (std::size_t i : kept) out.push_back(row[i]);
    rel.rows.push_back(std::move(out));
  }
  return rel;
}

std::vector<std::string> check_key_dependencies(const Relation& r) {
  std::vector<std::string> violations;
  std::map<Value, const std::vector<Value>*> seen;
  for (const auto& row : r.rows) {
    if (row.size() != r.schema.columns.size() + 1) {
      violations.push_back("row arity " + std::to_string(row.size()) + " does not match the schema");
      continue;
    }
    auto [it, inserted] = seen.emplace(row.front(), &row);
    if (inserted) continue;
    violations.push_back("duplicate key " + to_string(row.front()));
    for (std::size_t c = 1; c < row.size(); ++c) {
      if ((*it->second)[c] != row[c]) {
        violations.push_back(r.schema.key_name + " -> " + r.schema.columns[c - 1].name + " fails at key " +
                             to_string(row.front()));
      }
    }
  }
  return violations;
}

TraversalQueryAst restrict_query(const TraversalQueryAst& q, const RestrictionSpec& spec) {
  TraversalQueryAst out = q;
  out.key_restriction = q.key_restriction ? conjoin(*q.key_restriction, spec) : spec;
  // validates the spec against the key
  make_restrict(make_identity(q.key), *out.key_restriction);
  return out;
}

TraversalQueryAst compose_queries(const TraversalQueryAst& outer, const TraversalQueryAst& inner) {
  ExprPtr in = make_pair(inner.expressions);
  std::vector<ExprPtr> exprs;
  for (const auto& o : outer.expressions) {
    ExprPtr restricted = outer.key_restriction ? make_restrict(o, *outer.key_restriction) : o;
    exprs.push_back(make_compose(restricted, in));
  }
  return make_traversal("Q", std::move(exprs), inner.key_restriction);
}

TraversalQueryAst pair_queries(const std::vector<TraversalQueryAst>& queries, std::string name) {
  if (queries.empty()) throw Error(ErrorCode::SyntaxError, "nothing to pair");
  TraversalQueryAst out;
  out.name = std::move(name);
  out.key = queries.front().key;
  for (const auto& q : queries) {
    if (q.key != out.key) {
      throw Error(ErrorCode::KeyMismatch, "queries " + queries.front().name + " and " + q.name + " have different keys",
                  {{"left", out.key.name()}, {"right", q.key.name()}});
    }
    for (std::size_t i = 0; i < q.expressions.size(); ++i) {
      out.expressions.push_back(q.expressions[i]);
      out.origins.push_back(q.name);
      out.aliases.push_back(i < q.aliases.size() ? q.aliases[i] : "");
    }
    if (q.key_restriction) {
      out.key_restriction = out.key_restriction ? conjoin(*out.key_restriction, *q.key_restriction) : *q.key_restriction;
    }
  }
  return out;
}

TraversalQueryAst identity_query(const NodeRef& node) { return make_traversal("Q", {make_identity(node)}); }

}  // namespace contextdb
