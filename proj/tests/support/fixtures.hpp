#pragma once

#include <contextdb/database.hpp>
#include <contextdb/expression.hpp>

#include <memory>
#include <random>
#include <string>
#include <vector>

namespace contextdb::testkit {

std::string fixture_path(const std::string& name);
std::string golden_path(const std::string& name);

std::shared_ptr<const Context> inv_context();
/// Seven invoices with b, q, r as in the running example.
std::shared_ptr<const DatabaseInstance> inv7();

ExprPtr expr(const std::string& text, const Context& ctx);

/// K -> A1 -> ... -> Ad, K -> B1 -> ... -> Be, K -> M. Grouping attributes
/// get random text or integer types; M is integer or float.
struct ChainFixture {
  std::shared_ptr<const Context> ctx;
  std::vector<ExprPtr> chain;  // a1, a2, ... (application order)
  std::vector<ExprPtr> side;   // b1, b2, ...
  ExprPtr measure;
  bool float_measure = false;

  /// a_k o ... o a_1.
  ExprPtr chain_prefix(std::size_t k) const;
  ExprPtr side_prefix(std::size_t k) const;
};

ChainFixture random_chain(std::mt19937_64& rng, std::size_t depth, std::size_t side_depth, bool float_measure);

}  // namespace contextdb::testkit
