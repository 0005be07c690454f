#include "contextdb/expression.hpp"

#include "contextdb/error.hpp"

#include <algorithm>

namespace contextdb {

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::In: return "in";
  }
  return "=";
}

RestrictionSpec value_spec(std::vector<Value> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  RestrictionSpec s;
  s.values = std::move(values);
  return s;
}

RestrictionSpec conjoin(const RestrictionSpec& a, const RestrictionSpec& b) {
  RestrictionSpec out;
  if (a.values && b.values) {
    std::vector<Value> both;
    std::set_intersection(a.values->begin(), a.values->end(), b.values->begin(), b.values->end(),
                          std::back_inserter(both));
    out.values = std::move(both);
  } else if (a.values) {
    out.values = a.values;
  } else if (b.values) {
    out.values = b.values;
  }
  out.conditions = a.conditions;
  out.conditions.insert(out.conditions.end(), b.conditions.begin(), b.conditions.end());
  return out;
}

namespace {

[[noreturn]] void type_error(const std::string& msg, const NodeRef& expected, const NodeRef& got) {
  throw Error(ErrorCode::TypeError, msg, {{"expected", expected.name()}, {"actual", got.name()}});
}

void check_spec(const RestrictionSpec& spec, const NodeRef& node) {
  for (const auto& c : spec.conditions) {
    if (!c.lhs) throw Error(ErrorCode::TypeError, "condition without left-hand side");
    if (c.lhs->source != node) {
      type_error("condition operand " + print(*c.lhs) + " does not start at " + node.name(), node, c.lhs->source);
    }
    int sides = (c.rhs_expr ? 1 : 0) + (c.rhs_value ? 1 : 0) + (c.rhs_spec ? 1 : 0);
    if (sides != 1) throw Error(ErrorCode::TypeError, "condition needs exactly one right-hand side");
    if (c.op == CmpOp::In) {
      if (!c.rhs_spec) throw Error(ErrorCode::TypeError, "'in' needs a restriction on its right");
      check_spec(*c.rhs_spec, c.lhs->target);
    } else if (c.rhs_spec) {
      throw Error(ErrorCode::TypeError, "comparison against a set needs 'in'");
    }
    if (c.rhs_expr) {
      if (c.rhs_expr->source != node) {
        type_error("condition operand " + print(*c.rhs_expr) + " does not start at " + node.name(), node,
                   c.rhs_expr->source);
      }
    }
  }
}

std::shared_ptr<Expr> blank(ExprKind kind) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  return e;
}

bool equal_condition(const Condition& a, const Condition& b) {
  if (a.op != b.op || !equal(*a.lhs, *b.lhs)) return false;
  if (bool(a.rhs_expr) != bool(b.rhs_expr) || bool(a.rhs_spec) != bool(b.rhs_spec) || a.rhs_value != b.rhs_value) {
    return false;
  }
  if (a.rhs_expr && !equal(*a.rhs_expr, *b.rhs_expr)) return false;
  if (a.rhs_spec && !equal(*a.rhs_spec, *b.rhs_spec)) return false;
  return true;
}

}  // namespace

ExprPtr make_edge(const Edge& e, bool qualified) {
  auto x = blank(ExprKind::Edge);
  x->edge = e;
  x->edge.kind = EdgeKind::Plain;
  x->qualified = qualified;
  x->source = e.source;
  x->target = e.target;
  return x;
}

ExprPtr make_identity(const NodeRef& node) {
  auto x = blank(ExprKind::Identity);
  x->source = node;
  x->target = node;
  return x;
}

ExprPtr make_terminal(const NodeRef& node) {
  auto x = blank(ExprKind::Terminal);
  x->source = node;
  x->target = NodeRef::terminal();
  return x;
}

ExprPtr make_projection(const NodeRef& whole, const NodeRef& sub,
                        std::optional<std::vector<std::size_t>> positions) {
  if (!sub.is_sub_product_of(whole)) {
    throw Error(ErrorCode::TypeError, sub.name() + " is not a sub-product of " + whole.name(),
                {{"sub", sub.name()}, {"whole", whole.name()}});
  }
  auto x = blank(ExprKind::Projection);
  x->source = whole;
  x->target = sub;
  if (positions) {
    if (positions->size() != sub.arity()) {
      throw Error(ErrorCode::TypeError, "projection positions do not match " + sub.name());
    }
    std::vector<std::size_t> seen = *positions;
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      throw Error(ErrorCode::TypeError, "projection repeats a position");
    }
    for (std::size_t i = 0; i < positions->size(); ++i) {
      std::size_t p = (*positions)[i];
      if (p >= whole.arity() || whole.factors()[p] != sub.factors()[i]) {
        throw Error(ErrorCode::TypeError, "projection position " + std::to_string(p) + " is not " + sub.factors()[i]);
      }
    }
    x->positions = *positions;
    x->explicit_positions = *positions != sub.positions_in(whole);
  } else {
    x->positions = sub.positions_in(whole);
  }
  return x;
}

ExprPtr make_compose(ExprPtr outer, ExprPtr inner) {
  if (inner->target != outer->source) {
    throw Error(ErrorCode::TypeError,
                "cannot compose " + print(*outer) + " after " + print(*inner) + ": target(" + print(*inner) +
                    ")=" + inner->target.name() + " but source(" + print(*outer) + ")=" + outer->source.name(),
                {{"expected", outer->source.name()}, {"actual", inner->target.name()}});
  }
  auto x = blank(ExprKind::Compose);
  x->source = inner->source;
  x->target = outer->target;
  x->children = {std::move(outer), std::move(inner)};
  return x;
}

ExprPtr make_compose_chain(const std::vector<ExprPtr>& chain) {
  if (chain.empty()) throw Error(ErrorCode::TypeError, "empty composition");
  ExprPtr acc = chain.front();
  for (std::size_t i = 1; i < chain.size(); ++i) acc = make_compose(acc, chain[i]);
  return acc;
}

ExprPtr make_pair(std::vector<ExprPtr> members) {
  if (members.empty()) throw Error(ErrorCode::TypeError, "empty pairing");
  if (members.size() == 1) return members.front();
  for (const auto& m : members) {
    if (m->source != members.front()->source) {
      throw Error(ErrorCode::KeyMismatch,
                  "pairing members start at different nodes: " + members.front()->source.name() + " and " +
                      m->source.name(),
                  {{"left", members.front()->source.name()}, {"right", m->source.name()}});
    }
  }
  auto x = blank(ExprKind::Pair);
  x->source = members.front()->source;
  std::vector<NodeRef> targets;
  for (const auto& m : members) targets.push_back(m->target);
  x->target = NodeRef::product_of(targets);
  x->children = std::move(members);
  return x;
}

ExprPtr make_restrict(ExprPtr e, RestrictionSpec spec) {
  check_spec(spec, e->source);
  if (spec.values) {
    auto& v = *spec.values;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  auto x = blank(ExprKind::Restrict);
  x->source = e->source;
  x->target = e->target;
  x->children = {std::move(e)};
  x->restriction = std::move(spec);
  return x;
}

ExprPtr make_product(std::vector<ExprPtr> members) {
  if (members.empty()) throw Error(ErrorCode::TypeError, "empty product");
  if (members.size() == 1) return members.front();
  std::vector<NodeRef> sources, targets;
  for (const auto& m : members) {
    sources.push_back(m->source);
    targets.push_back(m->target);
  }
  auto x = blank(ExprKind::Product);
  x->source = NodeRef::product_of(sources);
  x->target = NodeRef::product_of(targets);
  x->children = std::move(members);
  return x;
}

ExprPtr with_children(const Expr& e, std::vector<ExprPtr> children) {
  switch (e.kind) {
    case ExprKind::Compose: return make_compose(children.at(0), children.at(1));
    case ExprKind::Pair: return make_pair(std::move(children));
    case ExprKind::Product: return make_product(std::move(children));
    case ExprKind::Restrict: return make_restrict(children.at(0), e.restriction);
    default: return std::make_shared<Expr>(e);
  }
}

bool equal(const RestrictionSpec& a, const RestrictionSpec& b) {
  if (a.values != b.values || a.conditions.size() != b.conditions.size()) return false;
  for (std::size_t i = 0; i < a.conditions.size(); ++i) {
    if (!equal_condition(a.conditions[i], b.conditions[i])) return false;
  }
  return true;
}

bool equal(const Expr& a, const Expr& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.source != b.source || a.target != b.target) return false;
  switch (a.kind) {
    case ExprKind::Edge:
      if (a.edge.label != b.edge.label) return false;
      break;
    case ExprKind::Projection:
      if (a.positions != b.positions) return false;
      break;
    case ExprKind::Restrict:
      if (!equal(a.restriction, b.restriction)) return false;
      break;
    default: break;
  }
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

std::string print_literal(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Text:
    case Value::Kind::Date: {
      std::string out = "\"";
      for (char c : to_string(v)) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
    case Value::Kind::Tuple: {
      std::string out = "(";
      for (std::size_t i = 0; i < v.as_tuple().size(); ++i) {
        if (i) out += ", ";
        out += print_literal(v.as_tuple()[i]);
      }
      return out + ")";
    }
    case Value::Kind::Float: {
      std::string s = to_string(v);
      if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos) s += ".0";
      return s;
    }
    default: return to_string(v);
  }
}

namespace {

enum class Level { Pair, ProductMember, ComposeLeft, ComposeRight, Atom };

bool needs_parens(const Expr& e, Level level) {
  switch (e.kind) {
    case ExprKind::Pair: return level != Level::Pair;
    case ExprKind::Product: return level != Level::Pair;
    case ExprKind::Compose: return level == Level::ComposeRight || level == Level::Atom;
    default: return false;
  }
}

std::string print_at(const Expr& e, Level level);

std::string print_node_positions(const Expr& e) {
  if (!e.explicit_positions) return e.target.name();
  std::string out;
  for (std::size_t i = 0; i < e.target.arity(); ++i) {
    if (i) out += '*';
    out += e.target.factors()[i] + ":" + std::to_string(e.positions[i]);
  }
  return out;
}

std::string print_bare(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Edge:
      if (e.qualified) return e.edge.label + "@" + e.edge.source.name() + ">" + e.edge.target.name();
      return e.edge.label;
    case ExprKind::Identity: return "id(" + e.source.name() + ")";
    case ExprKind::Terminal: return "tau(" + e.source.name() + ")";
    case ExprKind::Projection: return "pi[" + print_node_positions(e) + "](" + e.source.name() + ")";
    case ExprKind::Compose:
      return print_at(*e.children[0], Level::ComposeLeft) + " o " + print_at(*e.children[1], Level::ComposeRight);
    case ExprKind::Pair:
    case ExprKind::Product: {
      std::string sep = e.kind == ExprKind::Pair ? " & " : " * ";
      std::string out;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += sep;
        out += print_at(*e.children[i], Level::ProductMember);
      }
      return out;
    }
    case ExprKind::Restrict: return print_at(*e.children[0], Level::Atom) + "/" + print(e.restriction);
  }
  return {};
}

std::string print_at(const Expr& e, Level level) {
  if (needs_parens(e, level)) return "(" + print_bare(e) + ")";
  return print_bare(e);
}

}  // namespace

std::string print(const Expr& e) { return print_bare(e); }

std::string print(const RestrictionSpec& spec) {
  std::string out;
  if (spec.values) {
    out += "{";
    for (std::size_t i = 0; i < spec.values->size(); ++i) {
      if (i) out += ", ";
      out += print_literal((*spec.values)[i]);
    }
    out += "}";
  }
  if (!spec.conditions.empty() || !spec.values) {
    out += "[";
    for (std::size_t i = 0; i < spec.conditions.size(); ++i) {
      const auto& c = spec.conditions[i];
      if (i) out += " && ";
      out += print(*c.lhs) + " " + std::string(to_string(c.op)) + " ";
      if (c.rhs_expr) out += print(*c.rhs_expr);
      if (c.rhs_value) out += print_literal(*c.rhs_value);
      if (c.rhs_spec) out += print(*c.rhs_spec);
    }
    out += "]";
  }
  return out;
}

bool well_typed(const Expr& e) {
  for (const auto& c : e.children) {
    if (!c || !well_typed(*c)) return false;
  }
  switch (e.kind) {
    case ExprKind::Edge: return e.source == e.edge.source && e.target == e.edge.target;
    case ExprKind::Identity: return e.source == e.target;
    case ExprKind::Terminal: return e.target.is_terminal();
    case ExprKind::Projection: {
      if (e.positions.size() != e.target.arity()) return false;
      for (std::size_t i = 0; i < e.positions.size(); ++i) {
        if (e.positions[i] >= e.source.arity() || e.source.factors()[e.positions[i]] != e.target.factors()[i]) {
          return false;
        }
      }
      return true;
    }
    case ExprKind::Compose:
      return e.children.size() == 2 && e.children[1]->target == e.children[0]->source &&
             e.source == e.children[1]->source && e.target == e.children[0]->target;
    case ExprKind::Pair: {
      if (e.children.size() < 2) return false;
      std::vector<NodeRef> ts;
      for (const auto& c : e.children) {
        if (c->source != e.source) return false;
        ts.push_back(c->target);
      }
      return e.target == NodeRef::product_of(ts);
    }
    case ExprKind::Product: {
      if (e.children.size() < 2) return false;
      std::vector<NodeRef> ss, ts;
      for (const auto& c : e.children) {
        ss.push_back(c->source);
        ts.push_back(c->target);
      }
      return e.source == NodeRef::product_of(ss) && e.target == NodeRef::product_of(ts);
    }
    case ExprKind::Restrict: {
      if (e.children.size() != 1 || e.source != e.children[0]->source || e.target != e.children[0]->target) {
        return false;
      }
      for (const auto& c : e.restriction.conditions) {
        if (c.lhs->source != e.source || !well_typed(*c.lhs)) return false;
        if (c.rhs_expr && (c.rhs_expr->source != e.source || !well_typed(*c.rhs_expr))) return false;
      }
      return true;
    }
  }
  return false;
}

bool has_restriction(const Expr& e) {
  if (e.kind == ExprKind::Restrict) return true;
  return std::any_of(e.children.begin(), e.children.end(), [](const ExprPtr& c) { return has_restriction(*c); });
}

std::size_t node_count(const Expr& e) {
  std::size_t n = 1;
  for (const auto& c : e.children) n += node_count(*c);
  return n;
}

std::vector<Edge> edges_of(const Expr& e) {
  std::vector<Edge> out;
  if (e.kind == ExprKind::Edge) out.push_back(e.edge);
  for (const auto& c : e.children) {
    auto sub = edges_of(*c);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  for (const auto& cond : e.restriction.conditions) {
    auto sub = edges_of(*cond.lhs);
    out.insert(out.end(), sub.begin(), sub.end());
    if (cond.rhs_expr) {
      sub = edges_of(*cond.rhs_expr);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  }
  return out;
}

std::string print_path(const ExprPath& path) {
  if (path.empty()) return "root";
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(path[i]);
  }
  return out;
}

const ExprPtr& subexpression(const ExprPtr& root, const ExprPath& path) {
  const ExprPtr* cur = &root;
  for (std::size_t idx : path) {
    if (idx >= (*cur)->children.size()) throw Error(ErrorCode::NoMatch, "no subexpression at " + print_path(path));
    cur = &(*cur)->children[idx];
  }
  return *cur;
}

namespace {

ExprPtr replace_rec(const ExprPtr& node, const ExprPath& path, std::size_t depth, ExprPtr replacement) {
  if (depth == path.size()) return replacement;
  std::size_t idx = path[depth];
  if (idx >= node->children.size()) throw Error(ErrorCode::NoMatch, "no subexpression at " + print_path(path));
  auto children = node->children;
  children[idx] = replace_rec(children[idx], path, depth + 1, std::move(replacement));
  return with_children(*node, std::move(children));
}

void collect_paths(const ExprPtr& node, ExprPath& cur, std::vector<ExprPath>& out) {
  out.push_back(cur);
  for (std::size_t i = 0; i < node->children.size(); ++i) {
    cur.push_back(i);
    collect_paths(node->children[i], cur, out);
    cur.pop_back();
  }
}

}  // namespace

ExprPtr replace_at(const ExprPtr& root, const ExprPath& path, ExprPtr replacement) {
  return replace_rec(root, path, 0, std::move(replacement));
}

std::vector<ExprPath> all_paths(const ExprPtr& root) {
  std::vector<ExprPath> out;
  ExprPath cur;
  collect_paths(root, cur, out);
  return out;
}

std::vector<NodeRef> display_targets(const Expr& e) {
  if (e.kind == ExprKind::Pair) {
    std::vector<NodeRef> out;
    for (const auto& c : e.children) out.push_back(c->target);
    return out;
  }
  return {e.target};
}

}  // namespace contextdb
