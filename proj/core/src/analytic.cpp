#include "contextdb/analytic.hpp"

#include "contextdb/constraints.hpp"
#include "contextdb/error.hpp"
#include "contextdb/traversal.hpp"

#include <algorithm>

namespace contextdb {

namespace {

const AggregateOp& require_op(const std::string& name) {
  const AggregateOp* op = find_aggregate(name);
  if (!op) throw Error(ErrorCode::OpNotApplicable, "unknown aggregate " + name, {{"op", name}});
  return *op;
}

// Parallel expressions of a query part must agree on db.
void require_tree(const ExprPtr& part, const DatabaseInstance& db) {
  TraversalQueryAst q = split_product_targets(make_traversal("Q", {part}));
  for (const auto& group : parallel_groups(q)) {
    for (std::size_t k = 1; k < group.size(); ++k) {
      const auto& a = q.expressions[group[0]];
      const auto& b = q.expressions[group[k]];
      if (!check_equality(a, b, db).satisfied) {
        throw Error(ErrorCode::NotTreeQuery,
                    print(*a) + " and " + print(*b) + " are parallel and differ",
                    {{"left", print(*a)}, {"right", print(*b)}});
      }
    }
  }
}

std::map<Value, Value> aggregate_groups(const std::map<Value, std::vector<Value>>& groups, const AggregateOp& op) {
  std::map<Value, Value> out;
  for (const auto& [key, members] : groups) out.emplace_hint(out.end(), key, op.apply(members));
  return out;
}

std::string default_result_name(const std::string& op, const NodeRef& measured) {
  return op + "(" + measured.name() + ")";
}

// Groups m over g for keys where both are defined.
std::map<Value, Value> group_direct(const ExprPtr& g, const ExprPtr& m, const AggregateOp& op,
                                    const DatabaseInstance& db) {
  Evaluator ev(db);
  std::map<Value, std::vector<Value>> groups;
  for (const auto& x : db.enumerate(g->source)) {
    auto gx = ev.apply(*g, x);
    if (!gx) continue;
    auto mx = ev.apply(*m, x);
    if (!mx) continue;
    groups[*gx].push_back(std::move(*mx));
  }
  return aggregate_groups(groups, op);
}

}  // namespace

AnalyticAnswer evaluate_analytic(const AnalyticQueryAst& q, const DatabaseInstance& db) {
  const AggregateOp& op = require_op(q.op);
  if (!op.applies_to(aggregation_base(db.context(), q.measuring->target))) {
    throw Error(ErrorCode::OpNotApplicable, q.op + " is not applicable to " + q.measuring->target.name(),
                {{"op", q.op}, {"node", q.measuring->target.name()}});
  }
  if (q.grouping->source != q.measuring->source) {
    throw Error(ErrorCode::KeyMismatch, "grouping and measuring start at different nodes",
                {{"left", q.grouping->source.name()}, {"right", q.measuring->source.name()}});
  }
  require_tree(q.grouping, db);
  require_tree(q.measuring, db);
  AnalyticAnswer ans{q.grouping->target, q.result_attribute(), group_direct(q.grouping, q.measuring, op, db),
                     print(*q.grouping), print(*q.measuring), q.op};
  if (q.filter) ans = restrict_answer(ans, *q.filter);
  return ans;
}

AnalyticPlan AnalyticPlan::direct(const AnalyticQueryAst& q) {
  AnalyticPlan p;
  p.kind = Kind::Direct;
  p.grouping = q.grouping;
  p.measuring = q.measuring;
  p.op = q.op;
  p.result_name = q.result_name;
  return p;
}

std::string print(const AnalyticPlan& plan) {
  std::string middle = plan.kind == AnalyticPlan::Kind::Nested ? print(*plan.inner) : print(*plan.measuring);
  return "(" + print(*plan.grouping) + ", " + middle + ", " + plan.op + ")";
}

namespace {

const AggregateOp& require_associative(const std::string& name) {
  const AggregateOp& op = require_op(name);
  if (!op.associative) {
    throw Error(ErrorCode::NotAssociative, name + " is not associative; evaluate the query directly", {{"op", name}});
  }
  return op;
}

// Splits a grouping into (outer, inner) with grouping = outer o inner and
// the grouping's restriction carried by the inner part.
std::pair<ExprPtr, ExprPtr> split_grouping(const ExprPtr& g) {
  if (g->kind == ExprKind::Compose) return {g->children[0], g->children[1]};
  if (g->kind == ExprKind::Restrict) {
    const ExprPtr& core = g->children[0];
    if (core->kind == ExprKind::Compose) return {core->children[0], make_restrict(core->children[1], g->restriction)};
    return {core, make_restrict(make_identity(g->source), g->restriction)};
  }
  return {g, make_identity(g->source)};
}

AnalyticPlan base_plan(const ExprPtr& identity, const ExprPtr& m, const std::string& op) {
  AnalyticPlan p;
  p.kind = AnalyticPlan::Kind::Base;
  p.grouping = identity;
  p.measuring = m;
  p.op = op;
  return p;
}

bool is_identity(const ExprPtr& g) {
  if (g->kind == ExprKind::Identity) return true;
  return g->kind == ExprKind::Restrict && g->children[0]->kind == ExprKind::Identity;
}

}  // namespace

AnalyticPlan rewrite_composition(const AnalyticQueryAst& q) {
  const AggregateOp& op = require_associative(q.op);
  auto [outer, inner] = split_grouping(q.grouping);
  AnalyticPlan p;
  p.kind = AnalyticPlan::Kind::Nested;
  p.grouping = outer;
  p.op = op.combiner;
  p.result_name = q.result_name;
  if (is_identity(inner)) {
    p.inner = std::make_shared<AnalyticPlan>(base_plan(inner, q.measuring, q.op));
  } else {
    AnalyticQueryAst sub = q;
    sub.grouping = inner;
    sub.result_name.reset();
    sub.filter.reset();
    p.inner = std::make_shared<AnalyticPlan>(AnalyticPlan::direct(sub));
  }
  return p;
}

AnalyticPlan unfold_composition(const AnalyticQueryAst& q) {
  require_associative(q.op);
  if (is_identity(q.grouping)) {
    AnalyticPlan p = base_plan(q.grouping, q.measuring, q.op);
    p.result_name = q.result_name;
    return p;
  }
  AnalyticPlan p = rewrite_composition(q);
  if (p.inner->kind == AnalyticPlan::Kind::Direct) {
    AnalyticQueryAst sub = q;
    sub.grouping = p.inner->grouping;
    sub.result_name.reset();
    sub.filter.reset();
    p.inner = std::make_shared<AnalyticPlan>(unfold_composition(sub));
  }
  return p;
}

AnalyticPlan rewrite_pairing(std::size_t component, const AnalyticQueryAst& paired) {
  const AggregateOp& op = require_associative(paired.op);
  const ExprPtr& g = paired.grouping;
  if (g->kind != ExprKind::Pair) {
    if (component != 0) {
      throw Error(ErrorCode::NotApplicable, "grouping " + print(*g) + " has a single component",
                  {{"component", std::to_string(component)}});
    }
    return AnalyticPlan::direct(paired);
  }
  if (component >= g->children.size()) {
    throw Error(ErrorCode::NotApplicable, "grouping " + print(*g) + " has no component " + std::to_string(component),
                {{"component", std::to_string(component)}});
  }
  std::vector<NodeRef> targets;
  for (const auto& c : g->children) targets.push_back(c->target);
  auto layout = product_layout(targets);
  const NodeRef& sub = targets[component];
  std::vector<std::size_t> positions(sub.arity());
  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (layout[k].part == component) positions[layout[k].factor] = k;
  }
  AnalyticPlan p;
  p.kind = AnalyticPlan::Kind::Nested;
  p.grouping = make_projection(g->target, sub, positions);
  p.op = op.combiner;
  AnalyticQueryAst inner = paired;
  inner.result_name.reset();
  inner.filter.reset();
  p.inner = std::make_shared<AnalyticPlan>(AnalyticPlan::direct(inner));
  return p;
}

AnalyticAnswer evaluate_plan(const AnalyticPlan& plan, const DatabaseInstance& db) {
  const AggregateOp& op = require_op(plan.op);
  if (plan.kind != AnalyticPlan::Kind::Nested) {
    AnalyticAnswer ans{plan.grouping->target,
                       plan.result_name.value_or(default_result_name(plan.op, plan.measuring->target)),
                       group_direct(plan.grouping, plan.measuring, op, db),
                       print(*plan.grouping), print(*plan.measuring), plan.op};
    return ans;
  }
  AnalyticAnswer inner = evaluate_plan(*plan.inner, db);
  Evaluator ev(db);
  std::map<Value, std::vector<Value>> groups;
  for (const auto& [key, value] : inner.values) {
    if (auto gk = ev.apply(*plan.grouping, key)) groups[*gk].push_back(value);
  }
  // The result keeps the name of the innermost aggregate.
  const AnalyticPlan* base = &plan;
  while (base->kind == AnalyticPlan::Kind::Nested) base = base->inner.get();
  AnalyticAnswer ans{plan.grouping->target,
                     plan.result_name.value_or(default_result_name(base->op, base->measuring->target)),
                     aggregate_groups(groups, op), print(*plan.grouping), print(*plan.inner), plan.op};
  return ans;
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

AnalyticAnswer restrict_answer(const AnalyticAnswer& ans, const AnswerFilter& filter) {
  std::vector<std::pair<CmpOp, Value>> tests;
  for (const auto& c : filter.conditions) {
    if (c.literal) {
      tests.emplace_back(c.op, *c.literal);
      continue;
    }
    const AggregateOp& agg = require_op(c.aggregate);
    std::vector<Value> all;
    for (const auto& [k, v] : ans.values) all.push_back(v);
    if (all.empty()) return ans;
    tests.emplace_back(c.op, agg.apply(all));
  }
  AnalyticAnswer out = ans;
  out.values.clear();
  for (const auto& [key, value] : ans.values) {
    if (filter.keys && std::find(filter.keys->begin(), filter.keys->end(), key) == filter.keys->end()) continue;
    bool keep = true;
    for (const auto& [op, rhs] : tests) {
      auto c = compare_values(value, rhs);
      if (!c) {
        throw Error(ErrorCode::PredicateTypeError, "cannot compare " + to_string(value) + " with " + to_string(rhs),
                    {{"left", to_string(value)}, {"right", to_string(rhs)}});
      }
      if (!holds(op, *c)) {
        keep = false;
        break;
      }
    }
    if (keep) out.values.emplace_hint(out.values.end(), key, value);
  }
  return out;
}

AnalyticAnswer restrict_answer(const AnalyticAnswer& ans, const RestrictionSpec& spec, const DatabaseInstance& db) {
  Evaluator ev(db);
  AnalyticAnswer out = ans;
  out.values.clear();
  for (const auto& [key, value] : ans.values) {
    if (ev.satisfies(spec, ans.group_node, key)) out.values.emplace_hint(out.values.end(), key, value);
  }
  return out;
}

std::optional<ArithOp> parse_arith_op(std::string_view text) {
  if (text == "add" || text == "+") return ArithOp::Add;
  if (text == "subtract" || text == "-") return ArithOp::Subtract;
  if (text == "multiply" || text == "*") return ArithOp::Multiply;
  if (text == "divide" || text == "/") return ArithOp::Divide;
  return std::nullopt;
}

std::string_view to_string(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "add";
    case ArithOp::Subtract: return "subtract";
    case ArithOp::Multiply: return "multiply";
    case ArithOp::Divide: return "divide";
  }
  return "";
}

namespace {

std::string_view symbol(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Subtract: return "-";
    case ArithOp::Multiply: return "*";
    case ArithOp::Divide: return "/";
  }
  return "";
}

Value arith(const Value& a, const Value& b, ArithOp op, const Value& key) {
  if (!a.is_numeric() || !b.is_numeric()) {
    throw Error(ErrorCode::OpNotApplicable, "arithmetic on non-numeric values " + to_string(a) + ", " + to_string(b),
                {{"key", to_string(key)}});
  }
  if (op == ArithOp::Divide) {
    if (b.as_number() == 0.0) {
      throw Error(ErrorCode::DivisionByZero, "division by zero at " + to_string(key), {{"key", to_string(key)}});
    }
    return Value(a.as_number() / b.as_number());
  }
  if (a.is_integer() && b.is_integer()) {
    std::int64_t x = a.as_integer(), y = b.as_integer();
    switch (op) {
      case ArithOp::Add: return Value(x + y);
      case ArithOp::Subtract: return Value(x - y);
      default: return Value(x * y);
    }
  }
  double x = a.as_number(), y = b.as_number();
  switch (op) {
    case ArithOp::Add: return Value(x + y);
    case ArithOp::Subtract: return Value(x - y);
    default: return Value(x * y);
  }
}

}  // namespace

AnalyticAnswer combine_answers(const AnalyticAnswer& a, const AnalyticAnswer& b, ArithOp op) {
  AnalyticAnswer out = a;
  out.result_name = a.result_name + std::string(symbol(op)) + b.result_name;
  out.values.clear();
  if (b.group_node.is_terminal()) {
    if (b.values.size() != 1) {
      throw Error(ErrorCode::DomainMismatch, "total answer has no value", {{"right", b.result_name}});
    }
    const Value& total = b.values.begin()->second;
    for (const auto& [k, v] : a.values) out.values.emplace_hint(out.values.end(), k, arith(v, total, op, k));
    return out;
  }
  if (a.group_node != b.group_node) {
    throw Error(ErrorCode::DomainMismatch, "answers are grouped by " + a.group_node.name() + " and " + b.group_node.name(),
                {{"left", a.group_node.name()}, {"right", b.group_node.name()}});
  }
  for (const auto& [k, v] : a.values) {
    auto it = b.values.find(k);
    if (it == b.values.end()) {
      throw Error(ErrorCode::DomainMismatch, "right answer is undefined at " + to_string(k), {{"key", to_string(k)}});
    }
    out.values.emplace_hint(out.values.end(), k, arith(v, it->second, op, k));
  }
  return out;
}

AnalyticAnswer combine_answers(const AnalyticAnswer& a, const Value& scalar, ArithOp op) {
  AnalyticAnswer out = a;
  out.result_name = a.result_name + std::string(symbol(op)) + print_literal(scalar);
  out.values.clear();
  for (const auto& [k, v] : a.values) out.values.emplace_hint(out.values.end(), k, arith(v, scalar, op, k));
  return out;
}

}  // namespace contextdb
