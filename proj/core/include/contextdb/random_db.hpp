#pragma once

#include "contextdb/database.hpp"
#include "contextdb/expression.hpp"

#include <map>
#include <memory>
#include <random>
#include <vector>

namespace contextdb {

struct RandomDbOptions {
  std::size_t min_size = 1;
  std::size_t max_size = 8;
  /// Values that should have a fair chance of appearing in an attribute's
  /// extent (typically literals mentioned by the expressions under test).
  std::map<std::string, std::vector<Value>> pools;
};

/// A valid database over `ctx` with random extents and random total
/// functions for every plain edge.
DatabaseInstance random_database(const std::shared_ptr<const Context>& ctx, std::mt19937_64& rng,
                                 const RandomDbOptions& options = {});

/// Literals appearing in restrictions of `e`, by the attribute they belong to.
void collect_literals(const Expr& e, std::map<std::string, std::vector<Value>>& pools);

}  // namespace contextdb
