#pragma once

#include <compare>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace contextdb {

/// Reserved name of the terminal node T, whose domain is {⊤}.
inline constexpr std::string_view kTerminalName = "T";

/// A node of a context: a simple attribute, the terminal node, or a product
/// of attributes. Products are canonical: factors are kept sorted and nested
/// products are flattened, so A*B and B*A compare (and hash) equal.
///
/// Factors form a multiset. Context nodes never repeat a factor, but the
/// target of a pairing such as (r o b) & (h o s o p) is Region*Region.
class NodeRef {
 public:
  NodeRef() = default;

  static NodeRef terminal() { return NodeRef(std::vector<std::string>{std::string(kTerminalName)}); }
  static NodeRef simple(std::string attribute) { return NodeRef(std::vector<std::string>{std::move(attribute)}); }
  static NodeRef product(std::vector<std::string> factors) { return NodeRef(std::move(factors)); }
  static NodeRef product_of(std::span<const NodeRef> parts);
  static NodeRef product_of(std::initializer_list<NodeRef> parts) {
    return product_of(std::span<const NodeRef>(parts.begin(), parts.size()));
  }

  bool empty() const noexcept { return factors_.empty(); }
  bool is_terminal() const noexcept { return factors_.size() == 1 && factors_[0] == kTerminalName; }
  bool is_simple() const noexcept { return factors_.size() == 1; }
  bool is_product() const noexcept { return factors_.size() > 1; }
  bool has_repeated_factor() const noexcept;
  std::size_t arity() const noexcept { return factors_.size(); }
  const std::vector<std::string>& factors() const noexcept { return factors_; }
  const std::string& attribute() const { return factors_.front(); }

  /// "Inv", "Cat*Sup", "T".
  std::string name() const;

  /// Multiset inclusion of factors.
  bool is_sub_product_of(const NodeRef& whole) const;

  /// Positions in `whole`'s factor list that realize this sub-product.
  /// Repeated factors consume successive occurrences.
  std::vector<std::size_t> positions_in(const NodeRef& whole) const;

  friend bool operator==(const NodeRef&, const NodeRef&) = default;
  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;

 private:
  explicit NodeRef(std::vector<std::string> factors);
  std::vector<std::string> factors_;
};

/// Attribute and edge-label token: letters, digits, '_', '$', '\'', or any
/// non-ASCII byte; must not start with a digit.
bool is_identifier(std::string_view text);

/// Parses "A", "A*B" (any order); throws Error(SyntaxError) on empty factors.
NodeRef parse_node(std::string_view text);

/// Canonical merge layout for a list of parts whose product is formed:
/// entry k of the result says which part (and which factor inside it) lands
/// at canonical position k of the product.
struct LayoutSlot {
  std::size_t part;
  std::size_t factor;
};
std::vector<LayoutSlot> product_layout(std::span<const NodeRef> parts);

}  // namespace contextdb

template <>
struct std::hash<contextdb::NodeRef> {
  std::size_t operator()(const contextdb::NodeRef& n) const noexcept {
    return std::hash<std::string>{}(n.name());
  }
};
