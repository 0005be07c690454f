#pragma once

#include "contextdb/context.hpp"
#include "contextdb/expression.hpp"

#include <vector>

namespace contextdb {

struct ProposalOptions {
  std::size_t max_len = 8;
  std::size_t max_per_pair = 32;
};

/// A candidate key with, per requested target, the paths from the key to it.
struct Proposal {
  NodeRef key;
  std::vector<NodeRef> targets;
  std::vector<std::vector<ExprPtr>> expressions;  // parallel to `targets`
  std::size_t distance = 0;                       // sum of shortest path lengths
};

/// Keys are the nodes that reach every target through at least one plain or
/// projection edge. Paths are simple, at most max_len long, shortest first
/// then by text, capped at max_per_pair. Proposals closest to the targets
/// come first. Throws UnknownNode or NoCandidateKey.
std::vector<Proposal> enumerate_proposals(const Context& ctx, const std::vector<NodeRef>& targets,
                                          const ProposalOptions& options = {});

}  // namespace contextdb
