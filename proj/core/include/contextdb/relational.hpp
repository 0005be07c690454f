#pragma once

#include "contextdb/analytic.hpp"
#include "contextdb/traversal.hpp"

#include <map>
#include <string>
#include <vector>

namespace contextdb {

/// Raw relation as read from CSV: every cell is text.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(std::string_view column) const;  // throws FormatError
};

/// Node extents and edge functions contributed by one relation.
struct Ingested {
  std::map<std::string, ValueSet> extents;
  std::map<Edge, FiniteFunction> functions;
};

/// Projects the relation onto (key, column) for every mapped column: each
/// mapped column becomes the function of the given edge label. Values are
/// parsed with the types of the edge endpoints. Throws KeyViolation when a
/// key repeats with different rows.
Ingested ingest_relation(const Table& table, const std::string& key_column,
                         const std::map<std::string, std::string>& column_edges, const Context& ctx);

/// Union of contributions as a database; edges with no contribution get
/// empty functions.
DatabaseInstance assemble_database(std::shared_ptr<const Context> ctx, const std::vector<Ingested>& parts);

struct RelationalQueryDef {
  std::string name;
  std::string query;
  RelationMode mode = RelationMode::Alias;
};

struct RelationalViewDef {
  std::string name;
  std::vector<RelationalQueryDef> queries;
};

/// One induced relation per query, named after the query definition.
std::vector<Relation> export_database(const RelationalViewDef& defs, const DatabaseInstance& db);

struct EdgeBacking {
  std::string table;
  std::string key_col;
  std::string val_col;
};

using BackingMap = std::map<std::string, EdgeBacking>;

/// SQL-92 GROUP BY text for an analytic query, e.g.
/// SELECT R1.Region, SUM(R.Qty) FROM R JOIN R1 ON R.Branch = R1.Branch GROUP BY R1.Region
/// The first backed edge of the grouping (else the measuring) gives the
/// FROM table; later edges join on the column of the value they consume,
/// unless the value already sits in the same row. Throws UnbackedEdge or
/// UnsupportedForSql.
std::string emit_sql(const AnalyticQueryAst& q, const BackingMap& backing);

/// Identifier quoted with double quotes unless it is alphanumeric.
std::string sql_identifier(const std::string& name);
std::string sql_literal(const Value& v);

}  // namespace contextdb
