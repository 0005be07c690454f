#include "contextdb/query.hpp"

#include "contextdb/aggregate.hpp"
#include "contextdb/error.hpp"

namespace contextdb {

TraversalQueryAst make_traversal(std::string name, std::vector<ExprPtr> expressions,
                                 std::optional<RestrictionSpec> key_restriction) {
  if (expressions.empty()) throw Error(ErrorCode::SyntaxError, "a query needs at least one expression");
  TraversalQueryAst q;
  q.name = std::move(name);
  q.key = expressions.front()->source;
  for (const auto& e : expressions) {
    if (e->source != q.key) {
      throw Error(ErrorCode::KeyMismatch,
                  "expressions of " + q.name + " start at " + q.key.name() + " and " + e->source.name(),
                  {{"left", q.key.name()}, {"right", e->source.name()}});
    }
  }
  q.expressions = std::move(expressions);
  q.key_restriction = std::move(key_restriction);
  q.origins.assign(q.expressions.size(), q.name);
  q.aliases.assign(q.expressions.size(), "");
  return q;
}

ExprPtr as_expression(const TraversalQueryAst& q) {
  ExprPtr e = make_pair(q.expressions);
  if (q.key_restriction) e = make_restrict(e, *q.key_restriction);
  return e;
}

std::string print(const TraversalQueryAst& q) {
  std::string out = q.name + "(" + q.key.name();
  if (q.key_restriction) out += "/" + print(*q.key_restriction);
  for (const auto& e : q.expressions) out += "; " + print(*e);
  return out + ")";
}

std::string print(const AnswerFilter& f) {
  std::string out;
  if (f.keys) {
    out += "{";
    for (std::size_t i = 0; i < f.keys->size(); ++i) {
      if (i) out += ", ";
      out += print_literal((*f.keys)[i]);
    }
    out += "}";
  }
  if (!f.conditions.empty() || !f.keys) {
    out += "[";
    for (std::size_t i = 0; i < f.conditions.size(); ++i) {
      const auto& c = f.conditions[i];
      if (i) out += " && ";
      out += "ans " + std::string(to_string(c.op)) + " ";
      out += c.literal ? print_literal(*c.literal) : c.aggregate + "(ans)";
    }
    out += "]";
  }
  return out;
}

std::string AnalyticQueryAst::result_attribute() const {
  if (result_name) return *result_name;
  return op + "(" + measuring->target.name() + ")";
}

AnalyticQueryAst make_analytic(ExprPtr grouping, ExprPtr measuring, std::string op, const Context& ctx) {
  if (grouping->source != measuring->source) {
    throw Error(ErrorCode::KeyMismatch,
                "grouping starts at " + grouping->source.name() + " but measuring starts at " +
                    measuring->source.name(),
                {{"left", grouping->source.name()}, {"right", measuring->source.name()}});
  }
  const AggregateOp* agg = find_aggregate(op);
  if (!agg) throw Error(ErrorCode::OpNotApplicable, "unknown aggregate operation '" + op + "'", {{"op", op}});
  if (!agg->applies_to(aggregation_base(ctx, measuring->target))) {
    throw Error(ErrorCode::OpNotApplicable,
                op + " is not applicable to values of " + measuring->target.name(),
                {{"op", op}, {"node", measuring->target.name()}});
  }
  AnalyticQueryAst q;
  q.grouping = std::move(grouping);
  q.measuring = std::move(measuring);
  q.op = std::move(op);
  return q;
}

std::string print(const AnalyticQueryAst& q) {
  std::string out = "analytic(" + print(*q.grouping) + "; " + print(*q.measuring) + "; " + q.op;
  if (q.result_name) out += "; " + *q.result_name;
  out += ")";
  if (q.filter) out += "/" + print(*q.filter);
  return out;
}

}  // namespace contextdb
