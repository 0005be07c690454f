#pragma once

#include "contextdb/algebra.hpp"
#include "contextdb/analytic.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>

namespace contextdb {

/// Stored answers of a view's edges, tagged with the base snapshot.
struct Materialization {
  std::string snapshot;
  std::shared_ptr<const DatabaseInstance> instance;
};

/// A context whose edges are queries over a base context. Edges without a
/// definition pass the base edge of the same signature through. A view over
/// a view takes the parent's shape as its base.
struct View {
  std::shared_ptr<const Context> shape;
  std::shared_ptr<const Context> base;
  std::map<std::string, std::string> definitions;  // edge label -> query text over base
  std::shared_ptr<const View> parent;
  std::optional<Materialization> materialized;

  bool is_analytic(const std::string& label) const;
};

/// Checks that every definition types over the base with its edge's
/// signature, that undefined edges exist in the base, and that no
/// definition refers to a defined view edge. Throws ViewError.
View make_view(std::shared_ptr<const Context> shape, std::shared_ptr<const Context> base,
               std::map<std::string, std::string> definitions);
View make_view(std::shared_ptr<const Context> shape, std::shared_ptr<const View> parent,
               std::map<std::string, std::string> definitions);

/// Substitutes view edges by their definitions, down to the root base
/// context. Analytic edges cannot be unfolded (ViewError).
ExprPtr unfold(const ExprPtr& view_query, const View& view);

/// Evaluates every definition on `db` (an instance of the root base
/// context) and stores the answers as an instance of the view's shape.
View materialize(const View& view, const DatabaseInstance& db);

/// True when the view is not materialized or was materialized from a
/// different snapshot than `db`.
bool is_stale(const View& view, const DatabaseInstance& db);

/// Answers a query over the view from its materialized instance.
EvaluatedFunction eval_materialized(const ExprPtr& view_query, const View& view);

}  // namespace contextdb
