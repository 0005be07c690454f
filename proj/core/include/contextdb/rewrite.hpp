#pragma once

#include "contextdb/algebra.hpp"

#include <map>
#include <memory>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

namespace contextdb {

enum class RuleKind { Associative, Distributive, Grouping, RestrictionPropagation };

/// Associative rules regroup compositions: Left turns g o (f o e) into
/// (g o f) o e, Right does the converse.
enum class Assoc { Left, Right };

struct RewriteRule {
  RuleKind kind;
  Assoc direction = Assoc::Left;

  std::string name() const;
  static RewriteRule associative(Assoc d) { return {RuleKind::Associative, d}; }
  static RewriteRule distributive() { return {RuleKind::Distributive}; }
  static RewriteRule grouping() { return {RuleKind::Grouping}; }
  static RewriteRule restriction_propagation() { return {RuleKind::RestrictionPropagation}; }
};

std::optional<RewriteRule> parse_rule_name(std::string_view name);

/// Rewrites the subexpression at `path`. Throws NoMatch when the rule does
/// not apply there.
///   associative-left:         g o (f o e)            => (g o f) o e
///   associative-right:        (g o f) o e            => g o (f o e)
///   distributive:             (g1 & .. & gn) o f     => (g1 o f) & .. & (gn o f)
///   grouping:                 (g1 o f) & .. & (gn o f) => (g1 & .. & gn) o f
///   restriction-propagation:  e                      => push_restrictions(e)
ExprPtr apply_rule(const RewriteRule& rule, const ExprPtr& expr, const ExprPath& path);

struct RewriteStep {
  RewriteRule rule;
  ExprPath path;
  ExprPtr before;
  ExprPtr after;
};

struct RewriteTrace {
  std::vector<RewriteStep> steps;
  /// One line per step: "rule @ path : before => after".
  std::string to_string() const;
};

/// Re-applies the recorded steps to `start`.
ExprPtr replay(const RewriteTrace& trace, const ExprPtr& start);

/// Results of restriction-free expressions, keyed by canonical text and
/// snapshot id. Concurrent lookups, exclusive inserts, immutable entries.
class ResultCache {
 public:
  std::shared_ptr<const EvaluatedFunction> find(const std::string& text, const std::string& snapshot) const;
  bool contains(const std::string& text, const std::string& snapshot) const;
  void insert(const std::string& text, const std::string& snapshot, EvaluatedFunction value);
  /// Marks an expression as available without storing a value; used to
  /// plan rewrites against a list of expressions known to be cached.
  void declare(const std::string& text, const std::string& snapshot);
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  void clear();

 private:
  mutable std::shared_mutex mu_;
  std::map<std::pair<std::string, std::string>, std::shared_ptr<const EvaluatedFunction>> entries_;
};

/// Greedy rewriting towards cached subexpressions (at most 32 steps). A step
/// is taken only if it references more distinct cached subexpressions, or
/// as many (at least one) with a smaller tree. Ties go to the leftmost,
/// innermost match. An empty cache leaves the expression unchanged.
std::pair<ExprPtr, RewriteTrace> rewrite_for_cache(const ExprPtr& expr, const ResultCache& cache,
                                                   const std::string& snapshot);

/// Evaluation through the cache: restrictions are pushed to the top, the
/// unrestricted core is assembled from cached pieces (inserting what it
/// computes), and the restriction is applied afterwards.
EvaluatedFunction eval_cached(const ExprPtr& e, const DatabaseInstance& db, ResultCache& cache);

struct EquivalenceVerdict {
  bool equivalent_on_samples = true;
  std::size_t trials_run = 0;
  std::shared_ptr<const DatabaseInstance> counterexample_db;
  std::optional<Value> counterexample_key;
  std::string detail;
};

/// Compares both expressions on `trials` random databases (extents of at
/// most 8 values). Throws TypeError unless e1 and e2 are parallel.
EquivalenceVerdict check_equivalence(const std::shared_ptr<const Context>& ctx, const ExprPtr& e1,
                                     const ExprPtr& e2, std::size_t trials, std::uint64_t seed = 1);

}  // namespace contextdb
