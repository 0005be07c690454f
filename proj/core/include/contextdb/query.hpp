#pragma once

#include "contextdb/expression.hpp"

#include <optional>
#include <string>
#include <vector>

namespace contextdb {

/// Q(K; E1; ...; En). `origins[i]` names the query expression i came from
/// when queries are paired; `aliases[i]` is an optional user column name.
struct TraversalQueryAst {
  std::string name = "Q";
  NodeRef key;
  std::vector<ExprPtr> expressions;
  std::optional<RestrictionSpec> key_restriction;
  std::vector<std::string> origins;
  std::vector<std::string> aliases;
};

/// Builds a query from expressions sharing a source; throws KeyMismatch.
TraversalQueryAst make_traversal(std::string name, std::vector<ExprPtr> expressions,
                                 std::optional<RestrictionSpec> key_restriction = std::nullopt);

/// The query as one expression: the pairing of its expressions, restricted
/// by the key restriction when present.
ExprPtr as_expression(const TraversalQueryAst& q);

/// "Q(Inv; r o b; c o p)".
std::string print(const TraversalQueryAst& q);

/// Filter on an analytic answer: explicit group keys and/or conditions on
/// the answer value. The right-hand side of a condition is a literal or an
/// aggregate of all answer values, e.g. [ans <= 1000 && ans > avg(ans)].
struct AnswerCondition {
  CmpOp op = CmpOp::Eq;
  std::optional<Value> literal;
  std::string aggregate;  // set when comparing against op(ans)
};

struct AnswerFilter {
  std::optional<std::vector<Value>> keys;
  std::vector<AnswerCondition> conditions;
};

std::string print(const AnswerFilter& f);

/// (g, m, op). The result attribute defaults to op(Target).
struct AnalyticQueryAst {
  ExprPtr grouping;
  ExprPtr measuring;
  std::string op;
  std::optional<std::string> result_name;
  std::optional<AnswerFilter> filter;

  std::string result_attribute() const;
};

/// Checks key agreement and aggregate applicability; throws KeyMismatch or
/// OpNotApplicable.
AnalyticQueryAst make_analytic(ExprPtr grouping, ExprPtr measuring, std::string op,
                               const Context& ctx);

/// "analytic(r o b; q; sum)".
std::string print(const AnalyticQueryAst& q);

}  // namespace contextdb
