#include "contextdb/views.hpp"

#include "contextdb/error.hpp"
#include "contextdb/parser.hpp"

namespace contextdb {

namespace {

bool analytic_text(const std::string& text) {
  auto first = text.find_first_not_of(" \t\r\n");
  return first != std::string::npos && text.compare(first, 9, "analytic(") == 0;
}

[[noreturn]] void view_error(const std::string& label, const std::string& message) {
  throw Error(ErrorCode::ViewError, "view edge " + label + ": " + message, {{"edge", label}});
}

Edge view_edge(const Context& shape, const std::string& label) {
  auto edges = shape.edges_labeled(label);
  if (edges.empty()) view_error(label, "not an edge of the view");
  if (edges.size() > 1) view_error(label, "label is ambiguous in the view");
  return edges.front();
}

View build_view(std::shared_ptr<const Context> shape, std::shared_ptr<const Context> base,
                std::shared_ptr<const View> parent, std::map<std::string, std::string> definitions) {
  View v{std::move(shape), std::move(base), std::move(definitions), std::move(parent), std::nullopt};
  for (const auto& [label, text] : v.definitions) {
    Edge edge = view_edge(*v.shape, label);
    std::vector<Edge> used;
    try {
      if (analytic_text(text)) {
        AnalyticQueryAst q = parse_analytic(text, *v.base);
        if (q.grouping->target != edge.source) {
          view_error(label, "groups by " + q.grouping->target.name() + " but the edge starts at " + edge.source.name());
        }
        if (!edge.target.is_simple()) view_error(label, "analytic edges must end at a simple node");
        used = edges_of(*q.grouping);
        auto more = edges_of(*q.measuring);
        used.insert(used.end(), more.begin(), more.end());
      } else {
        ExprPtr e = parse_expression(text, *v.base);
        if (e->source != edge.source || e->target != edge.target) {
          view_error(label, "definition " + e->source.name() + " -> " + e->target.name() +
                                " does not match the edge " + edge.source.name() + " -> " + edge.target.name());
        }
        used = edges_of(*e);
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ViewError) throw;
      throw Error(ErrorCode::ViewError, "view edge " + label + ": " + e.what(),
                  {{"edge", label}, {"cause", std::string(to_string(e.code()))}});
    }
    for (const auto& u : used) {
      if (u.kind == EdgeKind::Plain && v.definitions.contains(u.label)) {
        view_error(label, "definition refers to the view edge " + u.label);
      }
    }
  }
  for (const auto& edge : v.shape->edges()) {
    if (v.definitions.contains(edge.label)) continue;
    if (!v.base->find_edge(edge.source, edge.label, edge.target)) {
      view_error(edge.label, "has no definition and no base edge of the same signature");
    }
  }
  return v;
}

RestrictionSpec unfold_spec(const RestrictionSpec& spec, const View& view);

ExprPtr unfold_one(const ExprPtr& e, const View& view) {
  switch (e->kind) {
    case ExprKind::Edge: {
      if (e->edge.kind != EdgeKind::Plain) return e;
      auto it = view.definitions.find(e->edge.label);
      if (it == view.definitions.end()) {
        auto base_edge = view.base->find_edge(e->source, e->edge.label, e->target);
        if (!base_edge) view_error(e->edge.label, "missing from the base context");
        return make_edge(*base_edge, e->qualified);
      }
      if (analytic_text(it->second)) view_error(e->edge.label, "analytic edges cannot be unfolded");
      return parse_expression(it->second, *view.base);
    }
    case ExprKind::Identity:
    case ExprKind::Terminal:
    case ExprKind::Projection:
      return e;
    case ExprKind::Restrict:
      return make_restrict(unfold_one(e->children[0], view), unfold_spec(e->restriction, view));
    default: {
      std::vector<ExprPtr> children;
      for (const auto& c : e->children) children.push_back(unfold_one(c, view));
      return with_children(*e, std::move(children));
    }
  }
}

RestrictionSpec unfold_spec(const RestrictionSpec& spec, const View& view) {
  RestrictionSpec out;
  out.values = spec.values;
  for (const auto& c : spec.conditions) {
    Condition d = c;
    d.lhs = unfold_one(c.lhs, view);
    if (c.rhs_expr) d.rhs_expr = unfold_one(c.rhs_expr, view);
    if (c.rhs_spec) d.rhs_spec = std::make_shared<RestrictionSpec>(unfold_spec(*c.rhs_spec, view));
    out.conditions.push_back(std::move(d));
  }
  return out;
}

}  // namespace

bool View::is_analytic(const std::string& label) const {
  auto it = definitions.find(label);
  return it != definitions.end() && analytic_text(it->second);
}

View make_view(std::shared_ptr<const Context> shape, std::shared_ptr<const Context> base,
               std::map<std::string, std::string> definitions) {
  return build_view(std::move(shape), std::move(base), nullptr, std::move(definitions));
}

View make_view(std::shared_ptr<const Context> shape, std::shared_ptr<const View> parent,
               std::map<std::string, std::string> definitions) {
  auto base = parent->shape;
  return build_view(std::move(shape), std::move(base), std::move(parent), std::move(definitions));
}

ExprPtr unfold(const ExprPtr& view_query, const View& view) {
  ExprPtr out = unfold_one(view_query, view);
  if (view.parent) return unfold(out, *view.parent);
  return out;
}

View materialize(const View& view, const DatabaseInstance& db) {
  std::shared_ptr<const DatabaseInstance> base_db;
  if (view.parent) {
    base_db = materialize(*view.parent, db).materialized->instance;
  } else {
    base_db = std::shared_ptr<const DatabaseInstance>(&db, [](const DatabaseInstance*) {});
  }
  std::map<Edge, FiniteFunction> functions;
  for (const auto& edge : view.shape->edges()) {
    FiniteFunction fn{edge.source, edge.target, {}};
    auto it = view.definitions.find(edge.label);
    if (it == view.definitions.end()) {
      auto base_edge = view.base->find_edge(edge.source, edge.label, edge.target);
      if (const FiniteFunction* stored = base_db->function(*base_edge)) fn.map = stored->map;
    } else if (analytic_text(it->second)) {
      fn.map = evaluate_analytic(parse_analytic(it->second, *view.base), *base_db).values;
    } else {
      fn.map = eval(parse_expression(it->second, *view.base), *base_db).function.map;
    }
    functions.emplace(edge, std::move(fn));
  }
  std::map<std::string, ValueSet> extents;
  for (const auto& attr : view.shape->attributes()) {
    auto& ext = extents[attr.attribute];
    if (view.base->has_attribute(attr.attribute)) {
      ext = base_db->extent(attr.attribute);
      continue;
    }
    for (const auto& [edge, fn] : functions) {
      if (edge.target.is_simple() && edge.target.attribute() == attr.attribute) {
        for (const auto& [x, y] : fn.map) ext.insert(y);
      }
      if (edge.source.is_simple() && edge.source.attribute() == attr.attribute) {
        for (const auto& [x, y] : fn.map) ext.insert(x);
      }
    }
  }
  View out = view;
  out.materialized = Materialization{
      db.snapshot_id(), std::make_shared<const DatabaseInstance>(view.shape, std::move(extents), std::move(functions))};
  return out;
}

bool is_stale(const View& view, const DatabaseInstance& db) {
  return !view.materialized || view.materialized->snapshot != db.snapshot_id();
}

EvaluatedFunction eval_materialized(const ExprPtr& view_query, const View& view) {
  if (!view.materialized) throw Error(ErrorCode::ViewError, "view is not materialized");
  return eval(view_query, *view.materialized->instance);
}

}  // namespace contextdb
