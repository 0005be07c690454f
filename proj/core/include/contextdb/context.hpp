#pragma once

#include "contextdb/node.hpp"
#include "contextdb/value.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace contextdb {

enum class EdgeKind { Plain, Identity, Terminal, Projection };

std::string_view to_string(EdgeKind kind);

/// A labeled edge. Identity is the (source, label, target) triple; the kind
/// is derived information. Identity, terminal and projection edges are
/// synthesized by Context on demand and never stored.
struct Edge {
  NodeRef source;
  std::string label;
  NodeRef target;
  EdgeKind kind = EdgeKind::Plain;

  /// "label@Source>Target", the unambiguous textual handle.
  std::string qualified_name() const;

  friend bool operator==(const Edge& a, const Edge& b) {
    return a.source == b.source && a.label == b.label && a.target == b.target;
  }
  friend auto operator<=>(const Edge& a, const Edge& b) {
    if (auto c = a.source <=> b.source; c != 0) return c;
    if (auto c = a.label <=> b.label; c != 0) return c;
    return a.target <=> b.target;
  }
};

struct DomainSpec {
  std::string attribute;
  BaseType base = BaseType::Text;
  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

/// Application constraint as declared in the context file. Expressions are
/// kept as query text; the constraint engine parses them.
struct ConstraintDecl {
  enum class Kind { Equality, Refinement };
  Kind kind = Kind::Equality;
  std::string lhs;
  std::string rhs;
  friend bool operator==(const ConstraintDecl&, const ConstraintDecl&) = default;
};

struct Violation {
  std::string code;
  std::vector<std::string> elements;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::size_t count(std::string_view code) const;
  void add(std::string code, std::vector<std::string> elements, std::string message);
  void append(const ValidationReport& other);
  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

class ContextBuilder;

/// The schema graph. Immutable once built; share it as `const Context&` or
/// `std::shared_ptr<const Context>` across concurrent evaluations.
class Context {
 public:
  Context();

  const std::vector<DomainSpec>& attributes() const noexcept { return attributes_; }
  std::optional<BaseType> base_type(std::string_view attribute) const;
  bool has_attribute(std::string_view attribute) const;

  /// Every node: attributes, declared product nodes, edge endpoints and T.
  const std::set<NodeRef>& nodes() const noexcept { return nodes_; }
  bool has_node(const NodeRef& n) const { return nodes_.contains(n); }
  /// Nodes exactly as listed in the source document (for round-tripping).
  const std::vector<NodeRef>& declared_nodes() const noexcept { return declared_nodes_; }

  /// Stored (plain) edges in declaration order.
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::vector<Edge> edges_labeled(std::string_view label) const;
  std::optional<Edge> find_edge(const NodeRef& source, std::string_view label,
                                const NodeRef& target) const;

  Edge identity_edge(const NodeRef& node) const;
  Edge terminal_edge(const NodeRef& node) const;
  /// Projection edges from a product node to each of its simple factors.
  std::vector<Edge> projection_edges(const NodeRef& product) const;

  /// Plain edges plus projection edges leaving `node`.
  std::vector<Edge> outgoing(const NodeRef& node) const;

  /// Nodes with no incoming plain or projection edge. A product node is not
  /// a root when some other node reaches all of its factors (the pairing of
  /// those paths reaches it).
  std::vector<NodeRef> roots() const;

  const std::vector<ConstraintDecl>& constraints() const noexcept { return constraints_; }

  /// Coalesced equivalence classes: representative -> members (sorted).
  const std::map<std::string, std::vector<std::string>>& classes() const noexcept {
    return classes_;
  }
  /// Representative of the class containing `attribute`, or the attribute.
  std::string representative(const std::string& attribute) const;

  /// Base type of a node value: simple -> attribute type, T -> unit,
  /// products -> nullopt.
  std::optional<BaseType> node_base_type(const NodeRef& node) const;

 private:
  friend class ContextBuilder;
  void rebuild_node_set();

  std::vector<DomainSpec> attributes_;
  std::map<std::string, BaseType, std::less<>> attribute_index_;
  std::vector<NodeRef> declared_nodes_;
  std::set<NodeRef> nodes_;
  std::vector<Edge> edges_;
  std::vector<ConstraintDecl> constraints_;
  std::map<std::string, std::vector<std::string>> classes_;
};

class ContextBuilder {
 public:
  ContextBuilder() = default;
  explicit ContextBuilder(Context base) : ctx_(std::move(base)) {}

  ContextBuilder& attribute(std::string name, BaseType base);
  ContextBuilder& node(NodeRef node);
  ContextBuilder& edge(NodeRef source, std::string label, NodeRef target);
  ContextBuilder& edge(std::string_view source, std::string label, std::string_view target);
  ContextBuilder& constraint(ConstraintDecl c);
  ContextBuilder& equivalence_class(std::string representative, std::vector<std::string> members);

  Context build() const;

 private:
  Context ctx_;
};

/// Structural validation; violations are data, never exceptions. Codes:
/// reserved-name, unknown-attribute, repeated-factor, duplicate-edge,
/// terminal-source, isolated-node, cycle, no-root, multiple-roots.
ValidationReport validate_context(const Context& ctx);

/// Replaces every strongly connected component of plain edges by its
/// lexicographically least member. Intra-class edges are dropped and class
/// membership is recorded in Context::classes().
Context coalesce_cycles(const Context& ctx);

/// Puts two single-rooted contexts under the product root root(c1)*root(c2).
/// Identical roots yield the union rooted at that node. Throws RootCollision
/// when one root already contains the other's factors.
Context join_contexts(const Context& c1, const Context& c2);

}  // namespace contextdb
