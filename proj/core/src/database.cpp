#include "contextdb/database.hpp"

#include "contextdb/error.hpp"

#include <cstdio>
#include <limits>

namespace contextdb {

ValueSet FiniteFunction::domain() const {
  ValueSet out;
  for (const auto& [x, y] : map) out.insert(out.end(), x);
  return out;
}

ValueSet FiniteFunction::range() const {
  ValueSet out;
  for (const auto& [x, y] : map) out.insert(y);
  return out;
}

Partition partition_of(const FiniteFunction& fn) {
  std::map<Value, ValueSet> by_image;
  Partition p;
  p.base_node = fn.domain_node;
  for (const auto& [x, y] : fn.map) {
    by_image[y].insert(x);
    p.carrier.insert(p.carrier.end(), x);
  }
  for (auto& [y, block] : by_image) p.blocks.push_back(std::move(block));
  return p;
}

ValueSet preimage(const FiniteFunction& fn, const ValueSet& targets) {
  ValueSet out;
  if (targets.empty()) return out;
  for (const auto& [x, y] : fn.map) {
    if (targets.contains(y)) out.insert(out.end(), x);
  }
  return out;
}

std::string canonical_text(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Unit: return "u:";
    case Value::Kind::Integer: return "i:" + to_string(v);
    case Value::Kind::Float: return "f:" + to_string(v);
    case Value::Kind::Text: return "s:" + std::to_string(v.as_text().size()) + ":" + v.as_text();
    case Value::Kind::Date: return "d:" + v.as_date().iso;
    case Value::Kind::Tuple: {
      std::string out = "t" + std::to_string(v.as_tuple().size()) + "(";
      for (const auto& c : v.as_tuple()) out += canonical_text(c) + ";";
      return out + ")";
    }
  }
  return {};
}

namespace {

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void feed(std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

const ValueSet& unit_extent() {
  static const ValueSet s{Value::unit()};
  return s;
}

const ValueSet& empty_extent() {
  static const ValueSet s;
  return s;
}

}  // namespace

DatabaseInstance::DatabaseInstance(std::shared_ptr<const Context> ctx,
                                   std::map<std::string, ValueSet> node_values,
                                   std::map<Edge, FiniteFunction> functions)
    : ctx_(std::move(ctx)), functions_(std::move(functions)) {
  for (auto& [k, v] : node_values) nodes_.emplace(k, std::move(v));
  Fnv1a h;
  for (const auto& [name, vs] : nodes_) {
    h.feed("N" + name);
    for (const auto& v : vs) h.feed(canonical_text(v));
  }
  for (const auto& [e, fn] : functions_) {
    h.feed("E" + e.qualified_name());
    for (const auto& [x, y] : fn.map) {
      h.feed(canonical_text(x));
      h.feed(canonical_text(y));
    }
  }
  snapshot_id_ = h.hex();
}

const ValueSet& DatabaseInstance::extent(std::string_view attribute) const {
  if (attribute == kTerminalName) return unit_extent();
  auto it = nodes_.find(attribute);
  return it == nodes_.end() ? empty_extent() : it->second;
}

bool DatabaseInstance::contains(const NodeRef& node, const Value& v) const {
  if (node.is_simple()) return extent(node.attribute()).contains(v);
  if (!v.is_tuple() || v.as_tuple().size() != node.arity()) return false;
  const auto& parts = v.as_tuple();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!extent(node.factors()[i]).contains(parts[i])) return false;
  }
  return true;
}

std::size_t DatabaseInstance::extent_size(const NodeRef& node) const {
  std::size_t total = 1;
  for (const auto& f : node.factors()) {
    std::size_t n = extent(f).size();
    if (n == 0) return 0;
    if (total > std::numeric_limits<std::size_t>::max() / n) return std::numeric_limits<std::size_t>::max();
    total *= n;
  }
  return total;
}

std::vector<Value> DatabaseInstance::enumerate(const NodeRef& node, std::size_t limit) const {
  if (node.is_simple()) {
    const auto& e = extent(node.attribute());
    return {e.begin(), e.end()};
  }
  std::size_t n = extent_size(node);
  if (n > limit) {
    throw Error(ErrorCode::EvalError,
                "extent of " + node.name() + " is too large to enumerate (" + std::to_string(n) + " tuples)",
                {{"node", node.name()}});
  }
  std::vector<std::vector<Value>> axes;
  for (const auto& f : node.factors()) {
    const auto& e = extent(f);
    axes.emplace_back(e.begin(), e.end());
  }
  std::vector<Value> out;
  if (n == 0) return out;
  out.reserve(n);
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    Value::Tuple t;
    t.reserve(axes.size());
    for (std::size_t i = 0; i < axes.size(); ++i) t.push_back(axes[i][idx[i]]);
    out.emplace_back(std::move(t));
    std::size_t k = axes.size();
    while (k > 0) {
      --k;
      if (++idx[k] < axes[k].size()) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
  }
}

const FiniteFunction* DatabaseInstance::function(const Edge& e) const {
  auto it = functions_.find(e);
  return it == functions_.end() ? nullptr : &it->second;
}

Edge resolve_edge(const Context& ctx, std::string_view label) {
  if (auto at = label.find('@'); at != std::string_view::npos) {
    auto gt = label.find('>', at);
    if (gt == std::string_view::npos) {
      throw Error(ErrorCode::SyntaxError, "malformed qualified edge '" + std::string(label) + "'", {{"label", std::string(label)}});
    }
    auto edge = ctx.find_edge(parse_node(label.substr(at + 1, gt - at - 1)), label.substr(0, at),
                              parse_node(label.substr(gt + 1)));
    if (!edge) throw Error(ErrorCode::UnknownEdge, "unknown edge '" + std::string(label) + "'", {{"label", std::string(label)}});
    return *edge;
  }
  auto matches = ctx.edges_labeled(label);
  if (matches.empty()) throw Error(ErrorCode::UnknownEdge, "unknown edge '" + std::string(label) + "'", {{"label", std::string(label)}});
  if (matches.size() > 1) {
    std::vector<std::pair<std::string, std::string>> details;
    for (const auto& m : matches) details.emplace_back("candidate", m.qualified_name());
    throw Error(ErrorCode::AmbiguousEdge,
                "edge label '" + std::string(label) + "' is ambiguous; write label@Source>Target", details);
  }
  return matches.front();
}

DatabaseBuilder& DatabaseBuilder::value(const std::string& attribute, Value v) {
  nodes_[attribute].insert(std::move(v));
  return *this;
}

DatabaseBuilder& DatabaseBuilder::values(const std::string& attribute, std::initializer_list<Value> vs) {
  auto& s = nodes_[attribute];
  s.insert(vs.begin(), vs.end());
  return *this;
}

DatabaseBuilder& DatabaseBuilder::pair(const Edge& edge, Value x, Value y) {
  auto& fn = functions_[edge];
  fn.domain_node = edge.source;
  fn.target_node = edge.target;
  fn.map.insert_or_assign(std::move(x), std::move(y));
  return *this;
}

DatabaseBuilder& DatabaseBuilder::pair(std::string_view label, Value x, Value y) {
  return pair(resolve_edge(*ctx_, label), std::move(x), std::move(y));
}

DatabaseBuilder& DatabaseBuilder::erase(const Edge& edge, const Value& x) {
  if (auto it = functions_.find(edge); it != functions_.end()) it->second.map.erase(x);
  return *this;
}

DatabaseInstance DatabaseBuilder::build() const {
  auto fns = functions_;
  for (const auto& e : ctx_->edges()) {
    auto& fn = fns[e];
    fn.domain_node = e.source;
    fn.target_node = e.target;
  }
  return DatabaseInstance(ctx_, nodes_, std::move(fns));
}

ValidationReport validate_instance(const DatabaseInstance& db) {
  ValidationReport report;
  const Context& ctx = db.context();
  for (const auto& [name, vs] : db.node_values()) {
    auto base = ctx.base_type(name);
    if (!base || name == kTerminalName) {
      report.add("unknown-node", {name}, "values given for undeclared attribute " + name);
      continue;
    }
    for (const auto& v : vs) {
      if (!conforms(v, *base)) {
        report.add("domain-violation", {name, to_string(v)},
                   "value " + to_string(v) + " is not a " + std::string(to_string(*base)));
      }
    }
  }
  for (const auto& e : ctx.edges()) {
    const FiniteFunction* fn = db.function(e);
    std::size_t expected = db.extent_size(e.source);
    if (!fn) {
      if (expected != 0) report.add("missing-function", {e.qualified_name()}, "no function stored for edge");
      continue;
    }
    std::vector<std::string> outside;
    for (const auto& [x, y] : fn->map) {
      if (!db.contains(e.source, x)) outside.push_back(to_string(x));
      if (!db.contains(e.target, y)) {
        report.add("image-violation", {e.qualified_name(), to_string(x), to_string(y)},
                   "image " + to_string(y) + " is not in the extent of " + e.target.name());
      }
    }
    std::size_t inside = fn->size() - outside.size();
    if (!outside.empty() || inside != expected) {
      std::vector<std::string> elements{e.qualified_name()};
      if (e.source.is_simple()) {
        for (const auto& x : db.extent(e.source.attribute())) {
          if (!fn->at(x)) elements.push_back("missing:" + to_string(x));
        }
      }
      for (auto& o : outside) elements.push_back("extra:" + o);
      report.add("totality-violation", std::move(elements),
                 "function of " + e.qualified_name() + " is not total on the extent of " + e.source.name());
    }
  }
  return report;
}

}  // namespace contextdb
