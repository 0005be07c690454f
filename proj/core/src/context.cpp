#include "contextdb/context.hpp"

#include "contextdb/error.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace contextdb {

namespace {

constexpr std::string_view kReservedLabels[] = {"o", "id", "tau", "pi", "in", "analytic"};

bool is_reserved_label(std::string_view s) {
  return std::find(std::begin(kReservedLabels), std::end(kReservedLabels), s) !=
         std::end(kReservedLabels);
}

// Tarjan's SCC over an adjacency map.
std::vector<std::vector<NodeRef>> strongly_connected(
    const std::set<NodeRef>& nodes, const std::map<NodeRef, std::vector<NodeRef>>& adj) {
  std::map<NodeRef, int> index, low;
  std::set<NodeRef> on_stack;
  std::vector<NodeRef> stack;
  std::vector<std::vector<NodeRef>> out;
  int counter = 0;

  std::function<void(const NodeRef&)> visit = [&](const NodeRef& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    if (auto it = adj.find(v); it != adj.end()) {
      for (const auto& w : it->second) {
        if (!index.contains(w)) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.contains(w)) {
          low[v] = std::min(low[v], index[w]);
        }
      }
    }
    if (low[v] == index[v]) {
      std::vector<NodeRef> comp;
      while (true) {
        NodeRef w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp.push_back(w);
        if (w == v) break;
      }
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (const auto& n : nodes) {
    if (!index.contains(n)) visit(n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::set<NodeRef> touched_attributes(const Context& ctx) {
  std::set<NodeRef> out;
  for (const auto& e : ctx.edges()) {
    for (const auto& f : e.source.factors()) out.insert(NodeRef::simple(f));
    for (const auto& f : e.target.factors()) out.insert(NodeRef::simple(f));
  }
  return out;
}

}  // namespace

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Plain: return "plain";
    case EdgeKind::Identity: return "identity";
    case EdgeKind::Terminal: return "terminal";
    case EdgeKind::Projection: return "projection";
  }
  return "plain";
}

std::string Edge::qualified_name() const {
  return label + "@" + source.name() + ">" + target.name();
}

std::size_t ValidationReport::count(std::string_view code) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; }));
}

void ValidationReport::add(std::string code, std::vector<std::string> elements, std::string message) {
  violations.push_back({std::move(code), std::move(elements), std::move(message)});
}

void ValidationReport::append(const ValidationReport& other) {
  violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

Context::Context() { rebuild_node_set(); }

std::optional<BaseType> Context::base_type(std::string_view attribute) const {
  if (auto it = attribute_index_.find(attribute); it != attribute_index_.end()) return it->second;
  if (attribute == kTerminalName) return BaseType::Unit;
  return std::nullopt;
}

bool Context::has_attribute(std::string_view attribute) const {
  return attribute_index_.find(attribute) != attribute_index_.end();
}

std::vector<Edge> Context::edges_labeled(std::string_view label) const {
  std::vector<Edge> out;
  for (const auto& e : edges_) {
    if (e.label == label) out.push_back(e);
  }
  return out;
}

std::optional<Edge> Context::find_edge(const NodeRef& source, std::string_view label,
                                       const NodeRef& target) const {
  for (const auto& e : edges_) {
    if (e.source == source && e.label == label && e.target == target) return e;
  }
  return std::nullopt;
}

Edge Context::identity_edge(const NodeRef& node) const {
  return Edge{node, "id", node, EdgeKind::Identity};
}

Edge Context::terminal_edge(const NodeRef& node) const {
  return Edge{node, "tau", NodeRef::terminal(), EdgeKind::Terminal};
}

std::vector<Edge> Context::projection_edges(const NodeRef& product) const {
  std::vector<Edge> out;
  if (!product.is_product()) return out;
  std::string last;
  for (const auto& f : product.factors()) {
    if (f == last) continue;
    last = f;
    out.push_back(Edge{product, "pi[" + f + "]", NodeRef::simple(f), EdgeKind::Projection});
  }
  return out;
}

std::vector<Edge> Context::outgoing(const NodeRef& node) const {
  std::vector<Edge> out;
  for (const auto& e : edges_) {
    if (e.source == node) out.push_back(e);
  }
  auto proj = projection_edges(node);
  out.insert(out.end(), proj.begin(), proj.end());
  return out;
}

std::vector<NodeRef> Context::roots() const {
  const auto touched = touched_attributes(*this);
  std::set<NodeRef> has_incoming;
  for (const auto& e : edges_) {
    if (e.source != e.target) has_incoming.insert(e.target);
  }
  for (const auto& n : nodes_) {
    if (!n.is_product()) continue;
    for (const auto& other : nodes_) {
      if (other != n && other.is_sub_product_of(n)) has_incoming.insert(other);
    }
  }

  // Reachability through plain and projection edges.
  std::map<NodeRef, std::set<NodeRef>> reach;
  for (const auto& n : nodes_) {
    std::set<NodeRef> seen;
    std::deque<NodeRef> queue{n};
    while (!queue.empty()) {
      NodeRef cur = queue.front();
      queue.pop_front();
      for (const auto& e : outgoing(cur)) {
        if (seen.insert(e.target).second) queue.push_back(e.target);
      }
    }
    reach[n] = std::move(seen);
  }

  std::vector<NodeRef> out;
  for (const auto& n : nodes_) {
    if (n.is_terminal() || has_incoming.contains(n)) continue;
    if (n.is_simple() && !touched.contains(n)) continue;  // isolated, reported separately
    if (n.is_product()) {
      bool paired = false;
      for (const auto& [other, reached] : reach) {
        if (other == n) continue;
        bool all = std::all_of(n.factors().begin(), n.factors().end(), [&](const std::string& f) {
          return reached.contains(NodeRef::simple(f));
        });
        if (all) {
          paired = true;
          break;
        }
      }
      if (paired) continue;
    }
    out.push_back(n);
  }
  return out;
}

std::string Context::representative(const std::string& attribute) const {
  for (const auto& [rep, members] : classes_) {
    if (std::binary_search(members.begin(), members.end(), attribute)) return rep;
  }
  return attribute;
}

std::optional<BaseType> Context::node_base_type(const NodeRef& node) const {
  if (node.is_terminal()) return BaseType::Unit;
  if (!node.is_simple()) return std::nullopt;
  return base_type(node.attribute());
}

void Context::rebuild_node_set() {
  nodes_.clear();
  nodes_.insert(NodeRef::terminal());
  for (const auto& a : attributes_) nodes_.insert(NodeRef::simple(a.attribute));
  for (const auto& n : declared_nodes_) nodes_.insert(n);
  for (const auto& e : edges_) {
    nodes_.insert(e.source);
    nodes_.insert(e.target);
  }
}

ContextBuilder& ContextBuilder::attribute(std::string name, BaseType base) {
  if (auto it = ctx_.attribute_index_.find(name); it != ctx_.attribute_index_.end()) {
    if (it->second != base) {
      throw Error(ErrorCode::DomainConflict, "attribute " + name + " declared as both " +
                                                 std::string(to_string(it->second)) + " and " +
                                                 std::string(to_string(base)));
    }
    return *this;
  }
  ctx_.attribute_index_.emplace(name, base);
  ctx_.attributes_.push_back({std::move(name), base});
  return *this;
}

ContextBuilder& ContextBuilder::node(NodeRef node) {
  if (std::find(ctx_.declared_nodes_.begin(), ctx_.declared_nodes_.end(), node) ==
      ctx_.declared_nodes_.end()) {
    ctx_.declared_nodes_.push_back(std::move(node));
  }
  return *this;
}

ContextBuilder& ContextBuilder::edge(NodeRef source, std::string label, NodeRef target) {
  ctx_.edges_.push_back(Edge{std::move(source), std::move(label), std::move(target)});
  return *this;
}

ContextBuilder& ContextBuilder::edge(std::string_view source, std::string label,
                                     std::string_view target) {
  return edge(parse_node(source), std::move(label), parse_node(target));
}

ContextBuilder& ContextBuilder::constraint(ConstraintDecl c) {
  ctx_.constraints_.push_back(std::move(c));
  return *this;
}

ContextBuilder& ContextBuilder::equivalence_class(std::string representative,
                                                  std::vector<std::string> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  ctx_.classes_[std::move(representative)] = std::move(members);
  return *this;
}

Context ContextBuilder::build() const {
  Context out = ctx_;
  out.rebuild_node_set();
  return out;
}

ValidationReport validate_context(const Context& ctx) {
  ValidationReport report;

  for (const auto& a : ctx.attributes()) {
    if (a.attribute == kTerminalName || a.attribute == "o" || !is_identifier(a.attribute)) {
      report.add("reserved-name", {a.attribute}, "attribute name is reserved or not an identifier");
    }
  }

  for (const auto& n : ctx.nodes()) {
    if (n.is_terminal()) continue;
    for (const auto& f : n.factors()) {
      if (!ctx.has_attribute(f)) {
        report.add("unknown-attribute", {n.name(), f}, "node factor " + f + " is not a declared attribute");
      }
    }
    if (n.has_repeated_factor()) {
      report.add("repeated-factor", {n.name()}, "product node repeats a factor");
    }
  }

  std::set<Edge> seen_edges;
  for (const auto& e : ctx.edges()) {
    if (!is_identifier(e.label) || is_reserved_label(e.label)) {
      report.add("reserved-name", {e.label}, "edge label is reserved or not an identifier");
    }
    if (!seen_edges.insert(e).second) {
      report.add("duplicate-edge", {e.qualified_name()}, "edge declared twice");
    }
    if (e.source.is_terminal()) {
      report.add("terminal-source", {e.qualified_name()}, "the terminal node has no outgoing edges");
    }
  }

  const auto touched = touched_attributes(ctx);
  for (const auto& a : ctx.attributes()) {
    if (!touched.contains(NodeRef::simple(a.attribute))) {
      report.add("isolated-node", {a.attribute}, "attribute appears in no edge");
    }
  }

  std::map<NodeRef, std::vector<NodeRef>> adj;
  for (const auto& e : ctx.edges()) adj[e.source].push_back(e.target);
  for (const auto& comp : strongly_connected(ctx.nodes(), adj)) {
    bool self_loop = comp.size() == 1 && std::any_of(ctx.edges().begin(), ctx.edges().end(),
                                                     [&](const Edge& e) {
                                                       return e.source == comp[0] && e.target == comp[0];
                                                     });
    if (comp.size() > 1 || self_loop) {
      std::vector<std::string> names;
      for (const auto& n : comp) names.push_back(n.name());
      report.add("cycle", std::move(names), "nodes form a cycle of plain edges");
    }
  }

  const Context acyclic = report.count("cycle") ? coalesce_cycles(ctx) : ctx;
  auto roots = acyclic.roots();
  if (roots.empty() && !acyclic.edges().empty()) {
    report.add("no-root", {}, "context has no root");
  } else if (roots.size() > 1) {
    std::vector<std::string> names;
    for (const auto& r : roots) names.push_back(r.name());
    report.add("multiple-roots", std::move(names), "context must have a single root; join it under a product root");
  }
  return report;
}

Context coalesce_cycles(const Context& ctx) {
  std::map<NodeRef, std::vector<NodeRef>> adj;
  for (const auto& e : ctx.edges()) adj[e.source].push_back(e.target);

  std::map<NodeRef, NodeRef> rep;
  std::map<std::string, std::string> attr_rep;
  std::map<std::string, std::vector<std::string>> new_classes = ctx.classes();
  for (const auto& comp : strongly_connected(ctx.nodes(), adj)) {
    if (comp.size() < 2) continue;
    // comp is sorted, so front() is the lexicographically least member.
    const NodeRef& r = comp.front();
    std::vector<std::string> members;
    for (const auto& n : comp) {
      rep[n] = r;
      if (n.is_simple() && r.is_simple()) attr_rep[n.attribute()] = r.attribute();
      members.push_back(n.name());
      // Members that were themselves representatives bring their class along.
      if (auto it = new_classes.find(n.name()); it != new_classes.end() && n != r) {
        members.insert(members.end(), it->second.begin(), it->second.end());
        new_classes.erase(it);
      }
    }
    if (auto it = new_classes.find(r.name()); it != new_classes.end()) {
      members.insert(members.end(), it->second.begin(), it->second.end());
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    new_classes[r.name()] = std::move(members);
  }
  if (rep.empty()) return ctx;

  auto map_node = [&](const NodeRef& n) -> NodeRef {
    if (auto it = rep.find(n); it != rep.end()) return it->second;
    if (!n.is_product()) return n;
    std::vector<std::string> fs;
    for (const auto& f : n.factors()) {
      auto it = attr_rep.find(f);
      fs.push_back(it == attr_rep.end() ? f : it->second);
    }
    return NodeRef::product(std::move(fs));
  };

  ContextBuilder b;
  for (const auto& a : ctx.attributes()) {
    auto it = attr_rep.find(a.attribute);
    if (it == attr_rep.end() || it->second == a.attribute) b.attribute(a.attribute, a.base);
  }
  for (const auto& n : ctx.declared_nodes()) {
    auto m = map_node(n);
    if (!(m.is_simple() && attr_rep.contains(n.attribute()) && m != n)) b.node(m);
  }
  std::set<Edge> kept;
  for (const auto& e : ctx.edges()) {
    Edge m{map_node(e.source), e.label, map_node(e.target)};
    if (m.source == m.target) continue;  // intra-class edge or self-loop
    if (kept.insert(m).second) b.edge(m.source, m.label, m.target);
  }
  for (const auto& c : ctx.constraints()) b.constraint(c);
  for (auto& [r, members] : new_classes) b.equivalence_class(r, members);
  return b.build();
}

Context join_contexts(const Context& c1, const Context& c2) {
  auto r1 = c1.roots();
  auto r2 = c2.roots();
  if (r1.size() != 1 || r2.size() != 1) {
    throw Error(ErrorCode::RootCollision, "join_contexts requires single-rooted inputs");
  }
  const NodeRef& a = r1.front();
  const NodeRef& b = r2.front();

  ContextBuilder builder(c1);
  for (const auto& attr : c2.attributes()) builder.attribute(attr.attribute, attr.base);
  for (const auto& n : c2.declared_nodes()) builder.node(n);
  for (const auto& e : c2.edges()) {
    if (!c1.find_edge(e.source, e.label, e.target)) builder.edge(e.source, e.label, e.target);
  }
  for (const auto& c : c2.constraints()) {
    if (std::find(c1.constraints().begin(), c1.constraints().end(), c) == c1.constraints().end()) {
      builder.constraint(c);
    }
  }
  for (const auto& [r, members] : c2.classes()) builder.equivalence_class(r, members);

  if (a == b) return builder.build();

  if ((a.is_product() && b.is_sub_product_of(a)) || (b.is_product() && a.is_sub_product_of(b))) {
    throw Error(ErrorCode::RootCollision, "root " + a.name() + " and root " + b.name() + " collide",
                {{"left", a.name()}, {"right", b.name()}});
  }
  NodeRef root = NodeRef::product_of({a, b});
  if (root.has_repeated_factor()) {
    throw Error(ErrorCode::RootCollision, "roots " + a.name() + " and " + b.name() + " share a factor",
                {{"left", a.name()}, {"right", b.name()}});
  }
  builder.node(root);
  return builder.build();
}

}  // namespace contextdb
