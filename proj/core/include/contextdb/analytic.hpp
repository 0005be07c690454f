#pragma once

#include "contextdb/algebra.hpp"
#include "contextdb/aggregate.hpp"
#include "contextdb/query.hpp"

#include <map>
#include <memory>
#include <string>

namespace contextdb {

/// Ans: range(g) -> target(op). Every group is nonempty.
struct AnalyticAnswer {
  NodeRef group_node;
  std::string result_name;
  std::map<Value, Value> values;
  std::string grouping;   // printed grouping expression
  std::string measuring;  // printed measuring expression
  std::string op;
};

/// Groups the keys where both g and m are defined by g, then aggregates m
/// per group. Grouping and measuring must be tree queries, or their parallel
/// expressions must agree on `db`; otherwise NotTreeQuery names the pair.
AnalyticAnswer evaluate_analytic(const AnalyticQueryAst& q, const DatabaseInstance& db);

/// Evaluation plan. Direct and Base aggregate m over the groups of g; Nested
/// aggregates the answer of `inner` over the groups of g (a function on the
/// inner group node) with the combining operation.
struct AnalyticPlan {
  enum class Kind { Direct, Nested, Base };
  Kind kind = Kind::Direct;
  ExprPtr grouping;
  ExprPtr measuring;  // Direct and Base only
  std::shared_ptr<const AnalyticPlan> inner;
  std::string op;
  std::optional<std::string> result_name;

  static AnalyticPlan direct(const AnalyticQueryAst& q);
};

/// "(r, (b, q, sum), sum)".
std::string print(const AnalyticPlan& plan);

/// (g' o g, m, op) -> (g', (g, m, op), op); a grouping that is not a
/// composition is read as g o id(K), with the base (id(K), m, op). Throws
/// NotAssociative for avg and countd.
AnalyticPlan rewrite_composition(const AnalyticQueryAst& q);

/// Applies the composition rule until the innermost plan is the base.
AnalyticPlan unfold_composition(const AnalyticQueryAst& q);

/// (g_i, m, op) from the paired query (g_1 & ... & g_n, m, op) by
/// aggregating along the projection onto target(g_i). A grouping that is
/// not a pairing gives the direct plan (component 0 only).
AnalyticPlan rewrite_pairing(std::size_t component, const AnalyticQueryAst& paired);

AnalyticAnswer evaluate_plan(const AnalyticPlan& plan, const DatabaseInstance& db);

/// Keeps the groups that pass the filter. Aggregate comparands such as
/// avg(ans) are computed over the unfiltered answer.
AnalyticAnswer restrict_answer(const AnalyticAnswer& ans, const AnswerFilter& filter);
/// Keeps the groups satisfying a restriction over the group node.
AnalyticAnswer restrict_answer(const AnalyticAnswer& ans, const RestrictionSpec& spec, const DatabaseInstance& db);

enum class ArithOp { Add, Subtract, Multiply, Divide };

std::optional<ArithOp> parse_arith_op(std::string_view text);
std::string_view to_string(ArithOp op);

/// Pointwise arithmetic. The right operand is a scalar, an answer over T
/// (broadcast), or an answer whose domain covers the left one. Division
/// always yields floats. Throws DivisionByZero (with the key) or
/// DomainMismatch.
AnalyticAnswer combine_answers(const AnalyticAnswer& a, const AnalyticAnswer& b, ArithOp op);
AnalyticAnswer combine_answers(const AnalyticAnswer& a, const Value& scalar, ArithOp op);

}  // namespace contextdb
