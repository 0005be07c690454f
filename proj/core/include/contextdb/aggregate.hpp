#pragma once

#include "contextdb/context.hpp"
#include "contextdb/value.hpp"

#include <optional>
#include <string>
#include <vector>

namespace contextdb {

/// Input domains an aggregate accepts.
enum class AggregateDomain { Numeric, Ordered, Any };

struct AggregateOp {
  std::string name;
  AggregateDomain domain;
  bool associative;
  /// Operation that merges partial results in nested evaluation (count
  /// partials are summed). Empty when not associative.
  std::string combiner;

  /// Aggregates a nonempty multiset, given in group-key order.
  Value apply(const std::vector<Value>& values) const;
  bool applies_to(std::optional<BaseType> base) const;
};

/// sum, min, max, count, countd, avg in that order.
const std::vector<AggregateOp>& aggregate_registry();
const AggregateOp* find_aggregate(std::string_view name);

/// Base type of a node for aggregation purposes: products and T have none
/// except T, which is unit.
std::optional<BaseType> aggregation_base(const Context& ctx, const NodeRef& node);

/// Names of aggregates applicable to values of `node`.
std::vector<std::string> applicable_aggregates(const Context& ctx, const NodeRef& node);

}  // namespace contextdb
