#include "contextdb/aggregate.hpp"

#include "contextdb/error.hpp"

#include <algorithm>
#include <set>

namespace contextdb {

namespace {

Value sum_of(const std::vector<Value>& values) {
  bool all_int = std::all_of(values.begin(), values.end(), [](const Value& v) { return v.is_integer(); });
  if (all_int) {
    std::int64_t s = 0;
    for (const auto& v : values) s += v.as_integer();
    return Value(s);
  }
  double s = 0;
  for (const auto& v : values) s += v.as_number();
  return Value(s);
}

Value extreme(const std::vector<Value>& values, bool want_max) {
  const Value* best = &values.front();
  for (const auto& v : values) {
    auto c = compare_values(v, *best);
    if (!c) throw Error(ErrorCode::PredicateTypeError, "incomparable values " + to_string(v) + " and " + to_string(*best));
    if (want_max ? *c > 0 : *c < 0) best = &v;
  }
  return *best;
}

}  // namespace

Value AggregateOp::apply(const std::vector<Value>& values) const {
  if (values.empty()) throw Error(ErrorCode::EvalError, name + " over an empty group");
  if (domain == AggregateDomain::Numeric) {
    for (const auto& v : values) {
      if (!v.is_numeric()) throw Error(ErrorCode::OpNotApplicable, name + " is not applicable to " + to_string(v));
    }
  }
  if (name == "sum") return sum_of(values);
  if (name == "min") return extreme(values, false);
  if (name == "max") return extreme(values, true);
  if (name == "count") return Value(static_cast<std::int64_t>(values.size()));
  if (name == "countd") {
    std::set<Value> distinct(values.begin(), values.end());
    return Value(static_cast<std::int64_t>(distinct.size()));
  }
  if (name == "avg") {
    Value s = sum_of(values);
    return Value(s.as_number() / static_cast<double>(values.size()));
  }
  throw Error(ErrorCode::OpNotApplicable, "unknown aggregate " + name);
}

bool AggregateOp::applies_to(std::optional<BaseType> base) const {
  switch (domain) {
    case AggregateDomain::Any: return true;
    case AggregateDomain::Numeric: return base == BaseType::Integer || base == BaseType::Float;
    case AggregateDomain::Ordered:
      return base == BaseType::Integer || base == BaseType::Float || base == BaseType::Date;
  }
  return false;
}

const std::vector<AggregateOp>& aggregate_registry() {
  static const std::vector<AggregateOp> ops{
      {"sum", AggregateDomain::Numeric, true, "sum"},
      {"min", AggregateDomain::Ordered, true, "min"},
      {"max", AggregateDomain::Ordered, true, "max"},
      {"count", AggregateDomain::Any, true, "sum"},
      {"countd", AggregateDomain::Any, false, ""},
      {"avg", AggregateDomain::Numeric, false, ""},
  };
  return ops;
}

const AggregateOp* find_aggregate(std::string_view name) {
  for (const auto& op : aggregate_registry()) {
    if (op.name == name) return &op;
  }
  return nullptr;
}

std::optional<BaseType> aggregation_base(const Context& ctx, const NodeRef& node) {
  return ctx.node_base_type(node);
}

std::vector<std::string> applicable_aggregates(const Context& ctx, const NodeRef& node) {
  std::vector<std::string> out;
  auto base = aggregation_base(ctx, node);
  for (const auto& op : aggregate_registry()) {
    if (op.applies_to(base)) out.push_back(op.name);
  }
  return out;
}

}  // namespace contextdb
