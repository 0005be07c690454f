#pragma once

#include "contextdb/context.hpp"
#include "contextdb/value.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace contextdb {

using ValueSet = std::set<Value>;

/// A finite function between the extents of two nodes.
struct FiniteFunction {
  NodeRef domain_node;
  NodeRef target_node;
  std::map<Value, Value> map;

  const Value* at(const Value& x) const {
    auto it = map.find(x);
    return it == map.end() ? nullptr : &it->second;
  }
  std::size_t size() const noexcept { return map.size(); }
  ValueSet domain() const;
  ValueSet range() const;

  friend bool operator==(const FiniteFunction&, const FiniteFunction&) = default;
};

struct Partition {
  NodeRef base_node;
  std::vector<ValueSet> blocks;  // ordered by their image value
  ValueSet carrier;

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Blocks are the nonempty preimages fn^-1(y), y in range(fn).
Partition partition_of(const FiniteFunction& fn);

/// {x in domain(fn) | fn(x) in targets}.
ValueSet preimage(const FiniteFunction& fn, const ValueSet& targets);

/// An immutable database snapshot over a context. Extents of product nodes
/// are virtual: membership is checked componentwise and enumeration is
/// bounded.
class DatabaseInstance {
 public:
  DatabaseInstance(std::shared_ptr<const Context> ctx,
                   std::map<std::string, ValueSet> node_values,
                   std::map<Edge, FiniteFunction> functions);

  const Context& context() const noexcept { return *ctx_; }
  const std::shared_ptr<const Context>& context_ptr() const noexcept { return ctx_; }

  /// Extent of a simple node; T yields {⊤}; unknown attributes yield ∅.
  const ValueSet& extent(std::string_view attribute) const;
  const std::map<std::string, ValueSet, std::less<>>& node_values() const noexcept { return nodes_; }

  bool contains(const NodeRef& node, const Value& v) const;
  /// |δ(node)|, saturating at SIZE_MAX for large products.
  std::size_t extent_size(const NodeRef& node) const;
  /// Enumerates δ(node) in canonical order; throws EvalError above `limit`.
  std::vector<Value> enumerate(const NodeRef& node, std::size_t limit = kDefaultEnumerationLimit) const;

  /// Stored function of a plain edge, or nullptr.
  const FiniteFunction* function(const Edge& e) const;
  const std::map<Edge, FiniteFunction>& functions() const noexcept { return functions_; }

  /// Content hash (FNV-1a 64, hex) of the canonical serialization.
  const std::string& snapshot_id() const noexcept { return snapshot_id_; }

  static constexpr std::size_t kDefaultEnumerationLimit = 1'000'000;

 private:
  std::shared_ptr<const Context> ctx_;
  std::map<std::string, ValueSet, std::less<>> nodes_;
  std::map<Edge, FiniteFunction> functions_;
  std::string snapshot_id_;
};

class DatabaseBuilder {
 public:
  explicit DatabaseBuilder(std::shared_ptr<const Context> ctx) : ctx_(std::move(ctx)) {}

  DatabaseBuilder& value(const std::string& attribute, Value v);
  DatabaseBuilder& values(const std::string& attribute, std::initializer_list<Value> vs);
  /// Adds x -> y to the edge's function (replacing an earlier image).
  DatabaseBuilder& pair(const Edge& edge, Value x, Value y);
  /// Resolves `label` against the context; throws UnknownEdge/AmbiguousEdge.
  DatabaseBuilder& pair(std::string_view label, Value x, Value y);
  /// Drops x from the edge's function.
  DatabaseBuilder& erase(const Edge& edge, const Value& x);

  const std::map<std::string, ValueSet>& node_values() const noexcept { return nodes_; }
  DatabaseInstance build() const;

 private:
  std::shared_ptr<const Context> ctx_;
  std::map<std::string, ValueSet> nodes_;
  std::map<Edge, FiniteFunction> functions_;
};

/// Resolves a bare label, or a qualified name label@Source>Target, to its
/// plain edge.
Edge resolve_edge(const Context& ctx, std::string_view label);

/// Totality and domain checks for every plain edge and node extent. Codes:
/// domain-violation, unknown-node, missing-function, totality-violation,
/// image-violation.
ValidationReport validate_instance(const DatabaseInstance& db);

/// Canonical value text used by the snapshot hash and the JSON writer.
std::string canonical_text(const Value& v);

}  // namespace contextdb
