#include "contextdb/random_db.hpp"

#include <algorithm>
#include <cstdio>

namespace contextdb {

namespace {

Value synth(BaseType base, std::size_t i) {
  switch (base) {
    case BaseType::Integer: return Value(static_cast<std::int64_t>(i));
    case BaseType::Float: return Value(static_cast<double>(i) * 0.5);
    case BaseType::Text: return Value("v" + std::to_string(i));
    case BaseType::Date: {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "2023-%02zu-%02zu", 1 + (i / 28) % 12, 1 + i % 28);
      return Value(Date{buf});
    }
    case BaseType::Unit: return Value::unit();
  }
  return Value::unit();
}

void add_pool_values(const Expr& e, std::map<std::string, std::vector<Value>>& pools);

void add_spec(const RestrictionSpec& spec, const NodeRef& node, std::map<std::string, std::vector<Value>>& pools) {
  auto add = [&](const NodeRef& n, const Value& v) {
    if (n.is_simple()) {
      pools[n.attribute()].push_back(v);
    } else if (v.is_tuple() && v.as_tuple().size() == n.arity()) {
      for (std::size_t i = 0; i < n.arity(); ++i) pools[n.factors()[i]].push_back(v.as_tuple()[i]);
    }
  };
  if (spec.values) {
    for (const auto& v : *spec.values) add(node, v);
  }
  for (const auto& c : spec.conditions) {
    add_pool_values(*c.lhs, pools);
    if (c.rhs_value) add(c.lhs->target, *c.rhs_value);
    if (c.rhs_expr) add_pool_values(*c.rhs_expr, pools);
    if (c.rhs_spec) add_spec(*c.rhs_spec, c.lhs->target, pools);
  }
}

void add_pool_values(const Expr& e, std::map<std::string, std::vector<Value>>& pools) {
  if (e.kind == ExprKind::Restrict) add_spec(e.restriction, e.source, pools);
  for (const auto& c : e.children) add_pool_values(*c, pools);
}

}  // namespace

void collect_literals(const Expr& e, std::map<std::string, std::vector<Value>>& pools) { add_pool_values(e, pools); }

DatabaseInstance random_database(const std::shared_ptr<const Context>& ctx, std::mt19937_64& rng,
                                 const RandomDbOptions& options) {
  DatabaseBuilder b(ctx);
  std::uniform_int_distribution<std::size_t> size_dist(std::max<std::size_t>(1, options.min_size),
                                                       std::max(options.min_size, options.max_size));
  std::map<std::string, std::vector<Value>> extents;
  for (const auto& a : ctx->attributes()) {
    std::size_t n = a.base == BaseType::Unit ? 1 : size_dist(rng);
    std::set<Value> chosen;
    if (auto it = options.pools.find(a.attribute); it != options.pools.end()) {
      for (const auto& v : it->second) {
        if (chosen.size() < n && conforms(v, a.base) && rng() % 2 == 0) chosen.insert(v);
      }
    }
    // draw from a range a bit wider than n so extents differ between runs
    std::uniform_int_distribution<std::size_t> pick(0, 2 * n + 2);
    std::size_t guard = 0;
    while (chosen.size() < n && guard++ < 1000) chosen.insert(synth(a.base, pick(rng)));
    for (std::size_t i = 0; chosen.size() < n; ++i) chosen.insert(synth(a.base, 1000 + i));
    for (const auto& v : chosen) b.value(a.attribute, v);
    extents[a.attribute] = {chosen.begin(), chosen.end()};
  }
  auto draw = [&](const NodeRef& node) -> Value {
    if (node.is_terminal()) return Value::unit();
    if (node.is_simple()) {
      const auto& ext = extents[node.attribute()];
      return ext[rng() % ext.size()];
    }
    Value::Tuple t;
    for (const auto& f : node.factors()) {
      const auto& ext = extents[f];
      t.push_back(ext[rng() % ext.size()]);
    }
    return Value(std::move(t));
  };
  DatabaseInstance partial = b.build();
  for (const auto& e : ctx->edges()) {
    for (const auto& x : partial.enumerate(e.source, 4096)) b.pair(e, x, draw(e.target));
  }
  return b.build();
}

}  // namespace contextdb
