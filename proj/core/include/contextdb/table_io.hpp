#pragma once

#include "contextdb/analytic.hpp"
#include "contextdb/relational.hpp"
#include "contextdb/traversal.hpp"

#include <string>
#include <string_view>

namespace contextdb {

/// RFC 4180 CSV: the first record is the header. Throws FormatError.
Table parse_csv(std::string_view text, std::string name);
std::string write_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

// Tables exported to files and over HTTP share one JSON form:
//   {"schema": {"name": ..., "key": [factor, ...],
//               "columns": [{"name", "attribute", "expression"}, ...]},
//    "rows": [[key factors..., column values...], ...]}
// Product keys are flattened into one cell per factor.

std::string relation_to_json(const Relation& r);
std::string relation_to_csv(const Relation& r);

std::string answer_to_json(const AnalyticAnswer& a);
/// Two columns (group key, aggregate), or one per factor of a product key.
std::string answer_to_csv(const AnalyticAnswer& a);

/// Header plus one row per key, as the CLI prints a traversal answer.
std::string traversal_answer_to_csv(const TraversalAnswer& a);

}  // namespace contextdb
