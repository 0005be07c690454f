#pragma once

#include "contextdb/algebra.hpp"

#include <vector>

namespace contextdb {

struct EqualityVerdict {
  bool satisfied = true;
  std::vector<Value> witnesses;  // keys where the two sides differ
};

/// E = E' on the common carrier. Throws TypeError unless parallel.
EqualityVerdict check_equality(const ExprPtr& lhs, const ExprPtr& rhs, const DatabaseInstance& db);

/// A block of p_E whose members E' sends to different values; `first` and
/// `second` are two such members.
struct Straddle {
  ValueSet block;
  Value first;
  Value second;
};

struct RefinementVerdict {
  bool satisfied = true;
  std::vector<Straddle> straddles;
};

/// p_f <= p_g on the intersection of the carriers.
RefinementVerdict check_refinement(const FiniteFunction& f, const FiniteFunction& g);
/// E <= E'. Throws KeyMismatch unless both start at the same node.
RefinementVerdict check_refinement(const ExprPtr& lhs, const ExprPtr& rhs, const DatabaseInstance& db);

/// The unique h on range(f) with h o f = g, namely h(y) = g(f^-1(y)).
/// Throws NotRefined when p_f <= p_g fails.
FiniteFunction refinement_witness(const FiniteFunction& f, const FiniteFunction& g);

/// Every constraint declared in the context. Codes: equality-violated,
/// refinement-violated, constraint-invalid.
ValidationReport check_all(const DatabaseInstance& db);

}  // namespace contextdb
