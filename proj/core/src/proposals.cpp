#include "contextdb/proposals.hpp"

#include "contextdb/error.hpp"

#include <algorithm>
#include <set>

namespace contextdb {

namespace {

ExprPtr edge_expr(const Edge& e) {
  if (e.kind == EdgeKind::Projection) return make_projection(e.source, e.target);
  return make_edge(e);
}

// Every simple path of exactly `len` edges from `node` to `target`.
void paths_of_length(const Context& ctx, const NodeRef& node, const NodeRef& target, std::size_t len,
                     std::vector<Edge>& cur, std::set<NodeRef>& on_path, std::vector<std::vector<Edge>>& out) {
  if (cur.size() == len) {
    if (node == target) out.push_back(cur);
    return;
  }
  for (const auto& e : ctx.outgoing(node)) {
    if (on_path.contains(e.target)) continue;
    cur.push_back(e);
    on_path.insert(e.target);
    paths_of_length(ctx, e.target, target, len, cur, on_path, out);
    on_path.erase(e.target);
    cur.pop_back();
  }
}

std::vector<ExprPtr> expressions_between(const Context& ctx, const NodeRef& key, const NodeRef& target,
                                         const ProposalOptions& options) {
  std::vector<ExprPtr> out;
  for (std::size_t len = 1; len <= options.max_len && out.size() < options.max_per_pair; ++len) {
    std::vector<std::vector<Edge>> paths;
    std::vector<Edge> cur;
    std::set<NodeRef> on_path{key};
    paths_of_length(ctx, key, target, len, cur, on_path, paths);
    std::vector<std::pair<std::string, ExprPtr>> level;
    for (const auto& p : paths) {
      std::vector<ExprPtr> chain;
      for (auto it = p.rbegin(); it != p.rend(); ++it) chain.push_back(edge_expr(*it));
      ExprPtr e = make_compose_chain(chain);
      level.emplace_back(print(*e), e);
    }
    std::sort(level.begin(), level.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [text, e] : level) {
      if (out.size() == options.max_per_pair) break;
      out.push_back(std::move(e));
    }
  }
  return out;
}

// Shortest path length from `from` to every reachable node (>= 1 edge).
std::map<NodeRef, std::size_t> distances(const Context& ctx, const NodeRef& from) {
  std::map<NodeRef, std::size_t> dist;
  std::vector<NodeRef> frontier{from};
  for (std::size_t d = 1; !frontier.empty(); ++d) {
    std::vector<NodeRef> next;
    for (const auto& n : frontier) {
      for (const auto& e : ctx.outgoing(n)) {
        if (dist.emplace(e.target, d).second) next.push_back(e.target);
      }
    }
    frontier = std::move(next);
  }
  return dist;
}

}  // namespace

std::vector<Proposal> enumerate_proposals(const Context& ctx, const std::vector<NodeRef>& targets,
                                          const ProposalOptions& options) {
  if (targets.empty()) throw Error(ErrorCode::NoCandidateKey, "no target nodes given");
  for (const auto& t : targets) {
    if (!ctx.has_node(t)) throw Error(ErrorCode::UnknownNode, "unknown node " + t.name(), {{"node", t.name()}});
  }
  std::vector<Proposal> out;
  for (const auto& key : ctx.nodes()) {
    if (key.is_terminal()) continue;
    auto dist = distances(ctx, key);
    Proposal p;
    p.key = key;
    bool reaches_all = true;
    for (const auto& t : targets) {
      auto it = dist.find(t);
      if (it == dist.end() || it->second > options.max_len) {
        reaches_all = false;
        break;
      }
      p.distance += it->second;
    }
    if (!reaches_all) continue;
    for (const auto& t : targets) {
      p.targets.push_back(t);
      p.expressions.push_back(expressions_between(ctx, key, t, options));
    }
    out.push_back(std::move(p));
  }
  if (out.empty()) {
    std::string names;
    for (const auto& t : targets) names += (names.empty() ? "" : ", ") + t.name();
    throw Error(ErrorCode::NoCandidateKey, "no node reaches all of " + names, {{"targets", names}});
  }
  std::stable_sort(out.begin(), out.end(), [](const Proposal& a, const Proposal& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.key.name() < b.key.name();
  });
  return out;
}

}  // namespace contextdb
