#pragma once

#include <contextdb/relational.hpp>
#include <contextdb/value.hpp>

#include <map>
#include <string>
#include <vector>

namespace contextdb::testkit {

/// Brute-force interpreter for the GROUP BY subset the SQL emitter uses:
///   SELECT cols, AGG(col) FROM t [JOIN t2 [AS a] ON x = y]* [WHERE c AND ...] [GROUP BY cols]
/// Cells are text; numeric literals and aggregates read them as numbers.
/// Result: group cells -> aggregate value.
using SqlResult = std::map<std::vector<std::string>, Value>;

SqlResult run_sql(const std::string& sql, const std::map<std::string, Table>& tables);

}  // namespace contextdb::testkit
