#pragma once

#include "contextdb/algebra.hpp"
#include "contextdb/query.hpp"

#include <map>
#include <string>
#include <vector>

namespace contextdb {

/// Answer of a traversal query: key value -> one value per expression, in
/// query order.
struct TraversalAnswer {
  TraversalQueryAst query;
  std::map<Value, std::vector<Value>> rows;
};

TraversalAnswer answer(const TraversalQueryAst& q, const DatabaseInstance& db);

/// Equivalent query whose expressions all target simple nodes (pairings
/// are split, compositions distributed over pairings, products and edges
/// into product nodes projected).
TraversalQueryAst split_product_targets(const TraversalQueryAst& q);

/// No two expressions share a target and every target is simple, after
/// splitting.
bool is_tree(const TraversalQueryAst& q);

/// Groups of indices of parallel expressions (same target), after splitting.
std::vector<std::vector<std::size_t>> parallel_groups(const TraversalQueryAst& split);

struct RelationColumn {
  std::string name;
  std::string attribute;
  std::string expression;  // defining expression, printed
};

struct RelationSchema {
  std::string name;
  std::string key_name;
  std::string key_attribute;
  std::vector<RelationColumn> columns;
};

/// Key value first, then one value per column.
struct Relation {
  RelationSchema schema;
  std::vector<std::vector<Value>> rows;
};

enum class RelationMode { Alias, RequireEqualities };

std::optional<RelationMode> parse_relation_mode(std::string_view text);
std::string_view to_string(RelationMode mode);

/// Flattened relation of a traversal query. In alias mode parallel columns
/// are named after their query of origin ("Q'.Sup") when those differ, or
/// after their defining expression ("r o b.Region"). In require-equalities
/// mode parallel columns must agree extensionally and collapse to one;
/// otherwise EqualityViolation lists up to 10 witness keys.
Relation induced_relation(const TraversalQueryAst& q, const DatabaseInstance& db, RelationMode mode);

/// Key distinctness and K -> A_i for every column; returns the violations.
std::vector<std::string> check_key_dependencies(const Relation& r);

TraversalQueryAst restrict_query(const TraversalQueryAst& q, const RestrictionSpec& spec);
/// outer o inner: every expression of `outer` composed after the pairing of
/// `inner`. Requires outer.key = target of inner.
TraversalQueryAst compose_queries(const TraversalQueryAst& outer, const TraversalQueryAst& inner);
/// Concatenates expressions of queries with a common key, keeping
/// duplicates and remembering which query each came from.
TraversalQueryAst pair_queries(const std::vector<TraversalQueryAst>& queries, std::string name = "Q");

/// Q(X; id(X)).
TraversalQueryAst identity_query(const NodeRef& node);

}  // namespace contextdb
