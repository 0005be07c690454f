#include "contextdb/relational.hpp"

#include "contextdb/error.hpp"
#include "contextdb/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace contextdb {

std::size_t Table::column_index(std::string_view column) const {
  auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) {
    throw Error(ErrorCode::FormatError, "table " + name + " has no column " + std::string(column),
                {{"table", name}, {"column", std::string(column)}});
  }
  return static_cast<std::size_t>(it - columns.begin());
}

namespace {

Value parse_cell(const std::string& cell, const NodeRef& node, const Context& ctx, const Table& t, std::size_t row,
                 const std::string& column) {
  auto base = ctx.node_base_type(node);
  if (!base) {
    throw Error(ErrorCode::FormatError, "column " + column + " maps to product node " + node.name(),
                {{"column", column}});
  }
  auto v = parse_value(cell, *base);
  if (!v) {
    throw Error(ErrorCode::FormatError,
                "table " + t.name + " row " + std::to_string(row + 1) + ": '" + cell + "' is not a " +
                    std::string(to_string(*base)),
                {{"table", t.name}, {"row", std::to_string(row + 1)}, {"column", column}});
  }
  return *v;
}

std::string row_text(const std::vector<std::string>& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
  return out;
}

}  // namespace

Ingested ingest_relation(const Table& table, const std::string& key_column,
                         const std::map<std::string, std::string>& column_edges, const Context& ctx) {
  const std::size_t key_idx = table.column_index(key_column);
  Ingested out;
  std::optional<NodeRef> key_node;
  if (ctx.has_attribute(key_column)) key_node = NodeRef::simple(key_column);
  std::vector<std::tuple<std::size_t, Edge, std::string>> mapped;
  for (const auto& [column, label] : column_edges) {
    Edge e = resolve_edge(ctx, label);
    if (key_node && e.source != *key_node) {
      throw Error(ErrorCode::FormatError, "edge " + label + " does not start at the key node " + key_node->name(),
                  {{"edge", label}});
    }
    key_node = e.source;
    mapped.emplace_back(table.column_index(column), e, column);
    out.functions.emplace(e, FiniteFunction{e.source, e.target, {}});
    if (e.target.is_simple() && !e.target.is_terminal()) out.extents[e.target.attribute()];
  }
  if (!key_node) {
    throw Error(ErrorCode::FormatError, "key column " + key_column + " is not an attribute and no edges are mapped",
                {{"column", key_column}});
  }
  if (!key_node->is_simple()) {
    throw Error(ErrorCode::FormatError, "key node " + key_node->name() + " must be simple", {{"column", key_column}});
  }
  auto& key_extent = out.extents[key_node->attribute()];

  std::map<Value, std::size_t> seen;  // key -> first row
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.columns.size()) {
      throw Error(ErrorCode::FormatError, "table " + table.name + " row " + std::to_string(r + 1) + " has " +
                                              std::to_string(row.size()) + " cells",
                  {{"table", table.name}, {"row", std::to_string(r + 1)}});
    }
    Value key = parse_cell(row[key_idx], *key_node, ctx, table, r, key_column);
    auto [it, fresh] = seen.emplace(key, r);
    if (!fresh) {
      if (table.rows[it->second] == row) continue;
      throw Error(ErrorCode::KeyViolation, "key " + to_string(key) + " identifies two different rows",
                  {{"key", to_string(key)}, {"row", row_text(table.rows[it->second])}, {"row", row_text(row)}});
    }
    key_extent.insert(key);
    for (const auto& [idx, edge, column] : mapped) {
      if (row[idx].empty()) continue;
      Value y = parse_cell(row[idx], edge.target, ctx, table, r, column);
      out.extents[edge.target.attribute()].insert(y);
      out.functions[edge].map.emplace(key, std::move(y));
    }
  }
  return out;
}

DatabaseInstance assemble_database(std::shared_ptr<const Context> ctx, const std::vector<Ingested>& parts) {
  std::map<std::string, ValueSet> extents;
  for (const auto& a : ctx->attributes()) extents[a.attribute];
  std::map<Edge, FiniteFunction> functions;
  for (const auto& e : ctx->edges()) functions.emplace(e, FiniteFunction{e.source, e.target, {}});
  for (const auto& p : parts) {
    for (const auto& [attr, vs] : p.extents) extents[attr].insert(vs.begin(), vs.end());
    for (const auto& [e, fn] : p.functions) {
      auto& dst = functions[e];
      dst.domain_node = e.source;
      dst.target_node = e.target;
      for (const auto& [x, y] : fn.map) dst.map.insert_or_assign(x, y);
    }
  }
  return DatabaseInstance(std::move(ctx), std::move(extents), std::move(functions));
}

std::vector<Relation> export_database(const RelationalViewDef& defs, const DatabaseInstance& db) {
  std::vector<Relation> out;
  for (const auto& d : defs.queries) {
    TraversalQueryAst q = parse_traversal(d.query, db.context());
    q.name = d.name;
    out.push_back(induced_relation(q, db, d.mode));
  }
  return out;
}

std::string sql_identifier(const std::string& name) {
  bool plain = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0]));
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') plain = false;
  }
  if (plain) return name;
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string sql_literal(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Integer:
    case Value::Kind::Float:
      return print_literal(v);
    case Value::Kind::Date:
      return "DATE '" + to_string(v) + "'";
    case Value::Kind::Text: {
      std::string out = "'";
      for (char c : v.as_text()) {
        if (c == '\'') out += '\'';
        out += c;
      }
      return out + "'";
    }
    default:
      throw Error(ErrorCode::UnsupportedForSql, "no SQL literal for " + to_string(v), {{"value", to_string(v)}});
  }
}

namespace {

struct Ref {
  std::string alias;
  std::string column;
  std::string text() const { return sql_identifier(alias) + "." + sql_identifier(column); }
};

class SqlBuilder {
 public:
  explicit SqlBuilder(const BackingMap& backing) : backing_(backing) {}

  // Column holding the value of `e` for the current key row.
  std::optional<Ref> value_of(const ExprPtr& e, const Ref& in) {
    switch (e->kind) {
      case ExprKind::Identity: return in;
      case ExprKind::Terminal: return std::nullopt;
      case ExprKind::Edge: return step(e, in);
      case ExprKind::Compose: {
        auto mid = value_of(e->children[1], in);
        if (!mid) unsupported(e, "composition after the terminal node");
        return value_of(e->children[0], *mid);
      }
      default: unsupported(e, "only compositions of edges translate to a column");
    }
  }

  // Table row reached from `in` through the edge: same row when the edge is
  // stored next to `in`, else a join.
  Ref step(const ExprPtr& e, const Ref& in) {
    if (e->edge.kind == EdgeKind::Identity) return in;
    if (e->edge.kind != EdgeKind::Plain) unsupported(e, "projection edges");
    const EdgeBacking& b = backing_for(e->edge.label);
    auto home = alias_table_.find(in.alias);
    if (home != alias_table_.end() && home->second == b.table && in.column == b.key_col) {
      return {in.alias, b.val_col};
    }
    const std::string join_key = b.table + "\x1f" + in.text() + "\x1f" + b.key_col;
    auto it = joins_.find(join_key);
    if (it != joins_.end()) return {it->second, b.val_col};
    std::string alias = fresh_alias(b.table);
    joins_.emplace(join_key, alias);
    std::string clause = "JOIN " + sql_identifier(b.table);
    if (alias != b.table) clause += " AS " + sql_identifier(alias);
    clause += " ON " + in.text() + " = " + Ref{alias, b.key_col}.text();
    join_clauses_.push_back(std::move(clause));
    return {alias, b.val_col};
  }

  // FROM table: the table of the first plain edge leaving the key.
  void anchor(const ExprPtr& e) {
    if (from_) return;
    if (auto first = first_edge(e)) {
      const EdgeBacking& b = backing_for(first->edge.label);
      from_ = b.table;
      alias_table_[b.table] = b.table;
      used_aliases_.insert(b.table);
      key_ref_ = Ref{b.table, b.key_col};
    }
  }

  const Ref& key_ref(const AnalyticQueryAst& q) const {
    if (!key_ref_) {
      throw Error(ErrorCode::UnsupportedForSql, "no backed edge leaves " + q.grouping->source.name(),
                  {{"node", q.grouping->source.name()}});
    }
    return *key_ref_;
  }

  void where(const RestrictionSpec& spec, const Ref& at) {
    if (spec.values) {
      std::string list;
      for (const auto& v : *spec.values) list += (list.empty() ? "" : ", ") + sql_literal(v);
      wheres_.push_back(at.text() + " IN (" + list + ")");
    }
    for (const auto& c : spec.conditions) {
      auto lhs = value_of(c.lhs, at);
      if (!lhs) unsupported(c.lhs, "conditions on the terminal node");
      if (c.op == CmpOp::In) {
        where(*c.rhs_spec, *lhs);
        continue;
      }
      std::string rhs;
      if (c.rhs_expr) {
        auto r = value_of(c.rhs_expr, at);
        if (!r) unsupported(c.rhs_expr, "conditions on the terminal node");
        rhs = r->text();
      } else {
        rhs = sql_literal(*c.rhs_value);
      }
      wheres_.push_back(lhs->text() + " " + sql_op(c.op) + " " + rhs);
    }
  }

  std::string assemble(const std::vector<std::string>& groups, const std::string& aggregate) const {
    std::string select;
    for (const auto& g : groups) select += g + ", ";
    std::string out = "SELECT " + select + aggregate + " FROM " + sql_identifier(*from_);
    for (const auto& j : join_clauses_) out += " " + j;
    for (std::size_t i = 0; i < wheres_.size(); ++i) out += (i ? " AND " : " WHERE ") + wheres_[i];
    for (std::size_t i = 0; i < groups.size(); ++i) out += (i ? ", " : " GROUP BY ") + groups[i];
    return out;
  }

 private:
  [[noreturn]] static void unsupported(const ExprPtr& e, const std::string& what) {
    throw Error(ErrorCode::UnsupportedForSql, "cannot translate " + print(*e) + ": " + what,
                {{"expression", print(*e)}});
  }

  static std::string sql_op(CmpOp op) {
    switch (op) {
      case CmpOp::Eq: return "=";
      case CmpOp::Ne: return "<>";
      case CmpOp::Lt: return "<";
      case CmpOp::Le: return "<=";
      case CmpOp::Gt: return ">";
      case CmpOp::Ge: return ">=";
      case CmpOp::In: return "IN";
    }
    return "=";
  }

  static const Expr* first_edge_raw(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Edge: return e.edge.kind == EdgeKind::Plain ? &e : nullptr;
      case ExprKind::Compose: return first_edge_raw(*e.children[1]);
      case ExprKind::Restrict: return first_edge_raw(*e.children[0]);
      case ExprKind::Pair:
        for (const auto& c : e.children) {
          if (const Expr* f = first_edge_raw(*c)) return f;
        }
        return nullptr;
      default: return nullptr;
    }
  }

  static std::optional<Expr> first_edge(const ExprPtr& e) {
    if (const Expr* f = first_edge_raw(*e)) return *f;
    return std::nullopt;
  }

  const EdgeBacking& backing_for(const std::string& label) const {
    auto it = backing_.find(label);
    if (it == backing_.end()) throw Error(ErrorCode::UnbackedEdge, "edge " + label + " has no backing table", {{"edge", label}});
    return it->second;
  }

  std::string fresh_alias(const std::string& table) {
    std::string alias = table;
    for (int n = 2; used_aliases_.contains(alias); ++n) alias = table + "_" + std::to_string(n);
    used_aliases_.insert(alias);
    alias_table_[alias] = table;
    return alias;
  }

  const BackingMap& backing_;
  std::optional<std::string> from_;
  std::optional<Ref> key_ref_;
  std::map<std::string, std::string> alias_table_;
  std::set<std::string> used_aliases_;
  std::map<std::string, std::string> joins_;
  std::vector<std::string> join_clauses_;
  std::vector<std::string> wheres_;
};

std::string aggregate_sql(const std::string& op, const std::string& column) {
  if (op == "sum") return "SUM(" + column + ")";
  if (op == "min") return "MIN(" + column + ")";
  if (op == "max") return "MAX(" + column + ")";
  if (op == "count") return "COUNT(" + column + ")";
  if (op == "countd") return "COUNT(DISTINCT " + column + ")";
  if (op == "avg") return "AVG(" + column + ")";
  throw Error(ErrorCode::UnsupportedForSql, "no SQL aggregate for " + op, {{"op", op}});
}

}  // namespace

std::string emit_sql(const AnalyticQueryAst& q, const BackingMap& backing) {
  for (const auto& part : {q.grouping, q.measuring}) {
    for (const auto& e : edges_of(*part)) {
      if (e.kind == EdgeKind::Plain && !backing.contains(e.label)) {
        throw Error(ErrorCode::UnbackedEdge, "edge " + e.label + " has no backing table", {{"edge", e.label}});
      }
    }
  }
  ExprPtr g = push_restrictions(q.grouping);
  ExprPtr m = push_restrictions(q.measuring);
  auto core = [](const ExprPtr& e) { return e->kind == ExprKind::Restrict ? e->children[0] : e; };

  SqlBuilder sql(backing);
  sql.anchor(core(g));
  sql.anchor(core(m));
  const Ref key = sql.key_ref(q);

  std::vector<std::string> groups;
  ExprPtr gc = core(g);
  std::vector<ExprPtr> members = gc->kind == ExprKind::Pair ? gc->children : std::vector<ExprPtr>{gc};
  for (const auto& member : members) {
    if (auto ref = sql.value_of(member, key)) groups.push_back(ref->text());
  }
  ExprPtr mc = core(m);
  std::string aggregate;
  if (mc->kind == ExprKind::Terminal) {
    if (q.op != "count") {
      throw Error(ErrorCode::UnsupportedForSql, q.op + " over the terminal node", {{"op", q.op}});
    }
    aggregate = "COUNT(*)";
  } else {
    auto ref = sql.value_of(mc, key);
    aggregate = aggregate_sql(q.op, ref->text());
  }
  if (g->kind == ExprKind::Restrict) sql.where(g->restriction, key);
  if (m->kind == ExprKind::Restrict) sql.where(m->restriction, key);
  return sql.assemble(groups, aggregate);
}

}  // namespace contextdb
