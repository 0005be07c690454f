#pragma once

#include "contextdb/database.hpp"
#include "contextdb/relational.hpp"
#include "contextdb/views.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace contextdb {

// Context documents (JSON):
//   {"attributes": [{"name": "Inv", "base": "integer"}, ...],
//    "nodes": ["Cat*Sup"],
//    "edges": [{"source": "Inv", "label": "b", "target": "Branch"}, ...],
//    "constraints": [{"kind": "eq" | "ref", "lhs": "...", "rhs": "..."}],
//    "classes": {"Price": ["DollarPrice", "EuroPrice"]}}
// Node names may also be given as arrays of factors.
//
// Database documents (JSON):
//   {"nodes": {"Inv": [1, 2]}, "edges": {"b": [[1, "Branch-1"], ...]}}
// Edge keys are labels or qualified names "label@Source>Target". Product
// values are arrays in canonical factor order; the unit value is "⊤".
//
// Parse failures throw FormatError; I/O failures throw IoError.

Context parse_context(std::string_view json_text);
std::string context_to_json(const Context& ctx);

DatabaseInstance parse_database(std::string_view json_text, std::shared_ptr<const Context> ctx);
std::string database_to_json(const DatabaseInstance& db);

/// {"shape": <context document>, "definitions": {"e": "r o b", ...}}.
View parse_view(std::string_view json_text, std::shared_ptr<const Context> base);

/// {"b": {"table": "R", "key_col": "Inv", "val_col": "Branch"}, ...}.
BackingMap parse_backing(std::string_view json_text);

/// {"name": "...", "queries": [{"name": "R2", "query": "Q(Prod; s; c)", "mode": "alias"}]}.
RelationalViewDef parse_viewdefs(std::string_view json_text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

std::shared_ptr<const Context> load_context(const std::string& path);
std::shared_ptr<const DatabaseInstance> load_database(const std::string& path, std::shared_ptr<const Context> ctx);

}  // namespace contextdb
