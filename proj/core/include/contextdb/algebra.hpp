#pragma once

#include "contextdb/database.hpp"
#include "contextdb/expression.hpp"

#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

namespace contextdb {

/// The value of an expression in a database: a finite function on the
/// (possibly restricted) extent of its source.
struct EvaluatedFunction {
  ExprPtr expr;
  FiniteFunction function;
};

/// Demand-driven evaluator over one snapshot. Values of restriction
/// comparands are memoized, so each is computed once per input.
class Evaluator {
 public:
  explicit Evaluator(const DatabaseInstance& db) : db_(db) {}

  /// e(x), or nullopt when x is outside the carrier of e.
  std::optional<Value> apply(const Expr& e, const Value& x);
  /// Whether x (a value of `node`) satisfies `spec`.
  bool satisfies(const RestrictionSpec& spec, const NodeRef& node, const Value& x);
  /// Full extension over δ(source(e)).
  EvaluatedFunction eval(const ExprPtr& e);

  const DatabaseInstance& db() const noexcept { return db_; }

 private:
  std::optional<Value> memo_apply(const Expr& e, const Value& x);

  const DatabaseInstance& db_;
  std::unordered_map<const Expr*, std::unordered_map<Value, std::optional<Value>>> memo_;
};

EvaluatedFunction eval(const ExprPtr& e, const DatabaseInstance& db);

/// Tuple of a product built from part values (canonical factor order).
Value assemble_tuple(const std::vector<NodeRef>& parts, const std::vector<Value>& values);

/// e evaluated on the given inputs only; inputs outside the carrier are
/// absent from the result.
std::map<Value, Value> eval_at(const ExprPtr& e, const DatabaseInstance& db, const std::vector<Value>& inputs);

/// Carrier of a restriction over a simple or enumerable node.
ValueSet restriction_carrier(const RestrictionSpec& spec, const NodeRef& node, const DatabaseInstance& db);

/// Equivalent expression with a single restriction at the top (or none):
/// (g/T) o (f/S) becomes (g o f)/{S}[f in T], pairings conjoin their
/// members' restrictions, products lift them through projections.
ExprPtr push_restrictions(const ExprPtr& e);

struct Signature {
  NodeRef source;
  NodeRef target;
  friend auto operator<=>(const Signature&, const Signature&) = default;
  friend bool operator==(const Signature&, const Signature&) = default;
};

/// One round of the implied-function rules: projections (including X -> X),
/// transitivity, and augmentation X*Z -> Y*Z with Z ranging over the
/// context's nodes.
std::set<Signature> implied_closure_step(const DatabaseInstance& db, const std::set<Signature>& known);

}  // namespace contextdb
