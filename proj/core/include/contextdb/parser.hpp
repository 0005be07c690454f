#pragma once

#include "contextdb/context.hpp"
#include "contextdb/expression.hpp"
#include "contextdb/query.hpp"

#include <string_view>

namespace contextdb {

// Query syntax:
//   expr   := pair
//   pair   := prod ("&" prod)*
//   prod   := comp ("*" comp)*
//   comp   := atom ("o" atom)*              left-associative; g o f applies f first
//   atom   := LABEL | LABEL "@" NODE ">" NODE | "id(" NODE ")" | "tau(" NODE ")"
//           | "pi[" NODE "](" NODE ")" | "(" expr ")" | atom "/" restr
//   restr  := "{" literals "}" ["[" cond ("&&" cond)* "]"] | "[" cond ("&&" cond)* "]"
//   cond   := expr CMP (expr | literal) | expr "in" restr
//   NODE   := IDENT ("*" IDENT)*  (no blanks inside label@Source>Target)
//
// Set literals are bare words or quoted strings coerced to the restricted
// node's type; tuples are written (a, b) in canonical factor order.
// Projection factors may carry source positions for repeated factors:
// pi[Region:1](Region*Region).

/// Throws SyntaxError, UnknownEdge, AmbiguousEdge, UnknownNode, TypeError,
/// KeyMismatch, PredicateTypeError. Syntax errors carry a "position" detail.
ExprPtr parse_expression(std::string_view text, const Context& ctx);

/// `Name(K[/restr]; E1; ...; En)` or a bare expression (its top-level
/// pairing members become the query expressions).
TraversalQueryAst parse_traversal(std::string_view text, const Context& ctx);

/// `analytic(G; M; OP[; ResultName])[/filter]` where G and M are traversal
/// queries or expressions.
AnalyticQueryAst parse_analytic(std::string_view text, const Context& ctx);

/// A restriction over `node`, e.g. "{1, 2}[q > 100]".
RestrictionSpec parse_restriction(std::string_view text, const NodeRef& node, const Context& ctx);

/// Answer filter over answers whose groups are values of `group_node`.
AnswerFilter parse_answer_filter(std::string_view text, const NodeRef& group_node, const Context& ctx);

/// Converts a literal token to a value of `node`'s type; nullopt on failure.
std::optional<Value> coerce_literal(std::string_view token, bool quoted, const NodeRef& node, const Context& ctx);

}  // namespace contextdb
