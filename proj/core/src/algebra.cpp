#include "contextdb/algebra.hpp"

#include "contextdb/error.hpp"

#include <algorithm>

namespace contextdb {

namespace {

// Component `factor` of a value whose node has the given arity.
const Value& component(const Value& v, std::size_t arity, std::size_t factor) {
  return arity == 1 ? v : v.as_tuple()[factor];
}

}  // namespace

Value assemble_tuple(const std::vector<NodeRef>& parts, const std::vector<Value>& values) {
  auto layout = product_layout(parts);
  Value::Tuple t;
  t.reserve(layout.size());
  for (const auto& slot : layout) t.push_back(component(values[slot.part], parts[slot.part].arity(), slot.factor));
  if (t.size() == 1) return t.front();
  return Value(std::move(t));
}

namespace {

bool holds(CmpOp op, std::partial_ordering c) {
  switch (op) {
    case CmpOp::Eq: return c == 0;
    case CmpOp::Ne: return c != 0;
    case CmpOp::Lt: return c < 0;
    case CmpOp::Le: return c <= 0;
    case CmpOp::Gt: return c > 0;
    case CmpOp::Ge: return c >= 0;
    case CmpOp::In: return false;
  }
  return false;
}

}  // namespace

std::optional<Value> Evaluator::memo_apply(const Expr& e, const Value& x) {
  auto& table = memo_[&e];
  if (auto it = table.find(x); it != table.end()) return it->second;
  auto v = apply(e, x);
  table.emplace(x, v);
  return v;
}

bool Evaluator::satisfies(const RestrictionSpec& spec, const NodeRef& node, const Value& x) {
  if (spec.values && !std::binary_search(spec.values->begin(), spec.values->end(), x)) return false;
  for (const auto& c : spec.conditions) {
    auto l = memo_apply(*c.lhs, x);
    if (!l) return false;
    if (c.op == CmpOp::In) {
      if (!satisfies(*c.rhs_spec, c.lhs->target, *l)) return false;
      continue;
    }
    std::optional<Value> r;
    if (c.rhs_expr) {
      r = memo_apply(*c.rhs_expr, x);
      if (!r) return false;
    } else {
      r = c.rhs_value;
    }
    auto cmp = compare_values(*l, *r);
    if (!cmp) {
      throw Error(ErrorCode::PredicateTypeError,
                  "cannot compare " + to_string(*l) + " with " + to_string(*r) + " at " + node.name(),
                  {{"left", to_string(*l)}, {"right", to_string(*r)}});
    }
    if (!holds(c.op, *cmp)) return false;
  }
  return true;
}

std::optional<Value> Evaluator::apply(const Expr& e, const Value& x) {
  switch (e.kind) {
    case ExprKind::Edge: {
      const FiniteFunction* fn = db_.function(e.edge);
      if (!fn) return std::nullopt;
      const Value* y = fn->at(x);
      if (!y) return std::nullopt;
      return *y;
    }
    case ExprKind::Identity:
      if (!db_.contains(e.source, x)) return std::nullopt;
      return x;
    case ExprKind::Terminal:
      if (!db_.contains(e.source, x)) return std::nullopt;
      return Value::unit();
    case ExprKind::Projection: {
      if (!db_.contains(e.source, x)) return std::nullopt;
      if (e.positions.size() == 1) return component(x, e.source.arity(), e.positions[0]);
      Value::Tuple t;
      for (std::size_t p : e.positions) t.push_back(component(x, e.source.arity(), p));
      return Value(std::move(t));
    }
    case ExprKind::Compose: {
      auto mid = apply(*e.children[1], x);
      if (!mid) return std::nullopt;
      return apply(*e.children[0], *mid);
    }
    case ExprKind::Pair: {
      std::vector<Value> vals;
      std::vector<NodeRef> parts;
      for (const auto& c : e.children) {
        auto v = apply(*c, x);
        if (!v) return std::nullopt;
        vals.push_back(std::move(*v));
        parts.push_back(c->target);
      }
      return assemble_tuple(parts, vals);
    }
    case ExprKind::Product: {
      std::vector<NodeRef> sources, targets;
      for (const auto& c : e.children) {
        sources.push_back(c->source);
        targets.push_back(c->target);
      }
      if (!x.is_tuple() || x.as_tuple().size() != e.source.arity()) return std::nullopt;
      auto layout = product_layout(sources);
      std::vector<Value::Tuple> split(sources.size());
      for (std::size_t i = 0; i < sources.size(); ++i) split[i].resize(sources[i].arity());
      for (std::size_t k = 0; k < layout.size(); ++k) split[layout[k].part][layout[k].factor] = x.as_tuple()[k];
      std::vector<Value> outs;
      for (std::size_t i = 0; i < sources.size(); ++i) {
        Value in = sources[i].arity() == 1 ? split[i][0] : Value(std::move(split[i]));
        auto v = apply(*e.children[i], in);
        if (!v) return std::nullopt;
        outs.push_back(std::move(*v));
      }
      return assemble_tuple(targets, outs);
    }
    case ExprKind::Restrict:
      if (!satisfies(e.restriction, e.source, x)) return std::nullopt;
      return apply(*e.children[0], x);
  }
  return std::nullopt;
}

EvaluatedFunction Evaluator::eval(const ExprPtr& e) {
  EvaluatedFunction out{e, FiniteFunction{e->source, e->target, {}}};
  if (e->kind == ExprKind::Edge) {
    if (const FiniteFunction* fn = db_.function(e->edge)) out.function.map = fn->map;
    return out;
  }
  for (const auto& x : db_.enumerate(e->source)) {
    if (auto y = apply(*e, x)) out.function.map.emplace_hint(out.function.map.end(), x, std::move(*y));
  }
  return out;
}

EvaluatedFunction eval(const ExprPtr& e, const DatabaseInstance& db) {
  Evaluator ev(db);
  return ev.eval(e);
}

std::map<Value, Value> eval_at(const ExprPtr& e, const DatabaseInstance& db, const std::vector<Value>& inputs) {
  Evaluator ev(db);
  std::map<Value, Value> out;
  for (const auto& x : inputs) {
    if (auto y = ev.apply(*e, x)) out.emplace(x, std::move(*y));
  }
  return out;
}

ValueSet restriction_carrier(const RestrictionSpec& spec, const NodeRef& node, const DatabaseInstance& db) {
  Evaluator ev(db);
  ValueSet out;
  for (const auto& x : db.enumerate(node)) {
    if (ev.satisfies(spec, node, x)) out.insert(out.end(), x);
  }
  return out;
}

namespace {

struct Pushed {
  ExprPtr core;
  RestrictionSpec where;
};

Pushed push(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Restrict: {
      Pushed inner = push(e->children[0]);
      return {inner.core, conjoin(e->restriction, inner.where)};
    }
    case ExprKind::Compose: {
      Pushed outer = push(e->children[0]);
      Pushed inner = push(e->children[1]);
      RestrictionSpec where = inner.where;
      if (!outer.where.unconstrained()) {
        Condition c;
        c.lhs = inner.core;
        c.op = CmpOp::In;
        c.rhs_spec = std::make_shared<RestrictionSpec>(outer.where);
        where.conditions.push_back(std::move(c));
      }
      return {make_compose(outer.core, inner.core), std::move(where)};
    }
    case ExprKind::Pair: {
      std::vector<ExprPtr> cores;
      RestrictionSpec where;
      for (const auto& c : e->children) {
        Pushed p = push(c);
        cores.push_back(p.core);
        where = conjoin(where, p.where);
      }
      return {make_pair(std::move(cores)), std::move(where)};
    }
    case ExprKind::Product: {
      std::vector<ExprPtr> cores;
      std::vector<NodeRef> sources;
      std::vector<RestrictionSpec> wheres;
      for (const auto& c : e->children) {
        Pushed p = push(c);
        cores.push_back(p.core);
        sources.push_back(c->source);
        wheres.push_back(std::move(p.where));
      }
      auto layout = product_layout(sources);
      RestrictionSpec where;
      for (std::size_t i = 0; i < sources.size(); ++i) {
        if (wheres[i].unconstrained()) continue;
        std::vector<std::size_t> positions(sources[i].arity());
        for (std::size_t k = 0; k < layout.size(); ++k) {
          if (layout[k].part == i) positions[layout[k].factor] = k;
        }
        Condition c;
        c.lhs = make_projection(e->source, sources[i], positions);
        c.op = CmpOp::In;
        c.rhs_spec = std::make_shared<RestrictionSpec>(std::move(wheres[i]));
        where.conditions.push_back(std::move(c));
      }
      return {make_product(std::move(cores)), std::move(where)};
    }
    default: return {e, {}};
  }
}

}  // namespace

ExprPtr push_restrictions(const ExprPtr& e) {
  if (!has_restriction(*e)) return e;
  Pushed p = push(e);
  if (p.where.unconstrained()) return p.core;
  return make_restrict(p.core, std::move(p.where));
}

std::set<Signature> implied_closure_step(const DatabaseInstance& db, const std::set<Signature>& known) {
  const Context& ctx = db.context();
  std::set<Signature> out = known;
  for (const auto& n : ctx.nodes()) {
    out.insert({n, n});
    if (!n.is_product()) continue;
    for (const auto& f : n.factors()) out.insert({n, NodeRef::simple(f)});
    for (const auto& m : ctx.nodes()) {
      if (m != n && m.is_sub_product_of(n)) out.insert({n, m});
    }
  }
  for (const auto& a : known) {
    for (const auto& b : known) {
      if (a.target == b.source) out.insert({a.source, b.target});
    }
  }
  for (const auto& s : known) {
    for (const auto& z : ctx.nodes()) {
      if (z.is_terminal()) continue;
      NodeRef src = NodeRef::product_of({s.source, z});
      NodeRef tgt = NodeRef::product_of({s.target, z});
      if (src.has_repeated_factor() || tgt.has_repeated_factor()) continue;
      out.insert({src, tgt});
    }
  }
  return out;
}

}  // namespace contextdb
