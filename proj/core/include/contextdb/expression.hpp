#pragma once

#include "contextdb/context.hpp"
#include "contextdb/value.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace contextdb {

enum class ExprKind { Edge, Identity, Terminal, Projection, Compose, Pair, Restrict, Product };

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge, In };

std::string_view to_string(CmpOp op);

struct Expr;
struct RestrictionSpec;
using ExprPtr = std::shared_ptr<const Expr>;
using SpecPtr = std::shared_ptr<const RestrictionSpec>;

/// One conjunct of a predicate restriction. Exactly one right-hand side is
/// set: another expression over the restricted node, a literal, or (for In)
/// a nested restriction over the target of `lhs`.
struct Condition {
  ExprPtr lhs;
  CmpOp op = CmpOp::Eq;
  ExprPtr rhs_expr;
  std::optional<Value> rhs_value;
  SpecPtr rhs_spec;
};

/// A subset of a node's extent: an optional explicit value set intersected
/// with the conjunction of `conditions`. An empty spec selects everything.
struct RestrictionSpec {
  std::optional<std::vector<Value>> values;  // sorted, unique
  std::vector<Condition> conditions;

  bool unconstrained() const noexcept { return !values && conditions.empty(); }
};

/// Conjunction of two specs over the same node.
RestrictionSpec conjoin(const RestrictionSpec& a, const RestrictionSpec& b);
RestrictionSpec value_spec(std::vector<Value> values);

/// Typed AST node. Built only through the factories below, which check
/// typing and compute source/target.
struct Expr {
  ExprKind kind = ExprKind::Identity;
  NodeRef source;
  NodeRef target;

  Edge edge;               // Edge
  bool qualified = false;  // Edge: print as label@Source>Target
  std::vector<std::size_t> positions;  // Projection: source positions, canonical sub order
  bool explicit_positions = false;     // Projection: print positions
  std::vector<ExprPtr> children;  // Compose {outer, inner}; Pair/Product members; Restrict {expr}
  RestrictionSpec restriction;    // Restrict
};

ExprPtr make_edge(const Edge& e, bool qualified = false);
ExprPtr make_identity(const NodeRef& node);
ExprPtr make_terminal(const NodeRef& node);
/// pi[sub](whole). Without explicit positions, repeated factors take the
/// first free occurrences.
ExprPtr make_projection(const NodeRef& whole, const NodeRef& sub,
                        std::optional<std::vector<std::size_t>> positions = std::nullopt);
/// outer o inner: applies `inner` first.
ExprPtr make_compose(ExprPtr outer, ExprPtr inner);
/// Left-associated chain: {h, s, p} -> (h o s) o p.
ExprPtr make_compose_chain(const std::vector<ExprPtr>& chain);
ExprPtr make_pair(std::vector<ExprPtr> members);
ExprPtr make_restrict(ExprPtr e, RestrictionSpec spec);
ExprPtr make_product(std::vector<ExprPtr> members);

/// Rebuilds `e` with new children (same kind and payload), re-checking types.
ExprPtr with_children(const Expr& e, std::vector<ExprPtr> children);

/// Structural equality, ignoring display-only flags.
bool equal(const Expr& a, const Expr& b);
bool equal(const RestrictionSpec& a, const RestrictionSpec& b);
inline bool equal(const ExprPtr& a, const ExprPtr& b) { return equal(*a, *b); }

/// Concrete syntax; parse_expression(print(e)) reproduces e.
std::string print(const Expr& e);
inline std::string print(const ExprPtr& e) { return print(*e); }
std::string print(const RestrictionSpec& spec);
/// Literal as written in restrictions: numbers bare, text and dates quoted,
/// tuples parenthesized.
std::string print_literal(const Value& v);

/// Type check used as an independent oracle: recomputes every source and
/// target bottom-up and compares with the stored ones.
bool well_typed(const Expr& e);

/// True when the expression (or any subexpression) carries a restriction.
bool has_restriction(const Expr& e);
std::size_t node_count(const Expr& e);
/// Edge references, in left-to-right order.
std::vector<Edge> edges_of(const Expr& e);

/// Addressing of subexpressions by child-index paths.
using ExprPath = std::vector<std::size_t>;
std::string print_path(const ExprPath& path);
const ExprPtr& subexpression(const ExprPtr& root, const ExprPath& path);
ExprPtr replace_at(const ExprPtr& root, const ExprPath& path, ExprPtr replacement);
/// Every path in pre-order (root first).
std::vector<ExprPath> all_paths(const ExprPtr& root);

/// Target of the expression as a list of simple display factors: for a
/// pairing, each member's target in member order.
std::vector<NodeRef> display_targets(const Expr& e);

}  // namespace contextdb
