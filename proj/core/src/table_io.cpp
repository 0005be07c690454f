#include "contextdb/table_io.hpp"

#include "contextdb/error.hpp"

#include <json.hpp>

namespace contextdb {

using nlohmann::json;

Table parse_csv(std::string_view text, std::string name) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started || !field.empty()) {
          throw Error(ErrorCode::FormatError, "stray quote in " + name + " line " + std::to_string(line),
                      {{"line", std::to_string(line)}});
        }
        quoted = true;
        field_started = true;
        break;
      case ',': end_field(); break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default: field += c;
    }
  }
  if (quoted) throw Error(ErrorCode::FormatError, "unterminated quote in " + name, {{"line", std::to_string(line)}});
  if (field_started || !field.empty() || !record.empty()) end_record();
  if (records.empty()) throw Error(ErrorCode::FormatError, name + " has no header");
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != records.front().size()) {
      throw Error(ErrorCode::FormatError,
                  name + " record " + std::to_string(i + 1) + " has " + std::to_string(records[i].size()) +
                      " fields, the header has " + std::to_string(records.front().size()),
                  {{"record", std::to_string(i + 1)}});
    }
  }
  Table t{std::move(name), std::move(records.front()), {}};
  t.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
  return t;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json value_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Unit: return std::string(kUnitLiteral);
    case Value::Kind::Integer: return v.as_integer();
    case Value::Kind::Float: return v.as_float();
    case Value::Kind::Text: return v.as_text();
    case Value::Kind::Date: return to_string(v);
    case Value::Kind::Tuple: {
      json arr = json::array();
      for (const auto& c : v.as_tuple()) arr.push_back(value_json(c));
      return arr;
    }
  }
  return nullptr;
}

// Key cells: one per factor of the key node.
std::vector<Value> flatten_key(const Value& key, const NodeRef& node) {
  if (node.is_product() && key.is_tuple()) return key.as_tuple();
  return {key};
}

std::vector<std::string> key_header(const NodeRef& node) { return node.factors(); }

json schema_json(const std::string& name, const NodeRef& key, const std::vector<RelationColumn>& columns) {
  json cols = json::array();
  for (const auto& c : columns) cols.push_back({{"name", c.name}, {"attribute", c.attribute}, {"expression", c.expression}});
  return {{"name", name}, {"key", key_header(key)}, {"columns", cols}};
}

NodeRef relation_key(const Relation& r) { return parse_node(r.schema.key_attribute); }

}  // namespace

std::string write_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_field(cells[i]);
    out += "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::string relation_to_json(const Relation& r) {
  NodeRef key = relation_key(r);
  json rows = json::array();
  for (const auto& row : r.rows) {
    json cells = json::array();
    for (const auto& k : flatten_key(row.front(), key)) cells.push_back(value_json(k));
    for (std::size_t i = 1; i < row.size(); ++i) cells.push_back(value_json(row[i]));
    rows.push_back(std::move(cells));
  }
  json doc{{"schema", schema_json(r.schema.name, key, r.schema.columns)}, {"rows", rows}};
  return doc.dump(2);
}

std::string relation_to_csv(const Relation& r) {
  NodeRef key = relation_key(r);
  std::vector<std::string> header = key_header(key);
  for (const auto& c : r.schema.columns) header.push_back(c.name);
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : r.rows) {
    std::vector<std::string> cells;
    for (const auto& k : flatten_key(row.front(), key)) cells.push_back(to_string(k));
    for (std::size_t i = 1; i < row.size(); ++i) cells.push_back(to_string(row[i]));
    rows.push_back(std::move(cells));
  }
  return write_csv(header, rows);
}

std::string answer_to_json(const AnalyticAnswer& a) {
  std::vector<RelationColumn> cols{{a.result_name, a.result_name, "(" + a.grouping + ", " + a.measuring + ", " + a.op + ")"}};
  json rows = json::array();
  for (const auto& [k, v] : a.values) {
    json cells = json::array();
    for (const auto& f : flatten_key(k, a.group_node)) cells.push_back(value_json(f));
    cells.push_back(value_json(v));
    rows.push_back(std::move(cells));
  }
  json doc{{"schema", schema_json(a.result_name, a.group_node, cols)}, {"rows", rows}};
  return doc.dump(2);
}

std::string answer_to_csv(const AnalyticAnswer& a) {
  std::vector<std::string> header = key_header(a.group_node);
  header.push_back(a.result_name);
  std::vector<std::vector<std::string>> rows;
  for (const auto& [k, v] : a.values) {
    std::vector<std::string> cells;
    for (const auto& f : flatten_key(k, a.group_node)) cells.push_back(to_string(f));
    cells.push_back(to_string(v));
    rows.push_back(std::move(cells));
  }
  return write_csv(header, rows);
}

std::string traversal_answer_to_csv(const TraversalAnswer& a) {
  std::vector<std::string> header = key_header(a.query.key);
  for (const auto& e : a.query.expressions) header.push_back(print(*e));
  std::vector<std::vector<std::string>> rows;
  for (const auto& [k, vals] : a.rows) {
    std::vector<std::string> cells;
    for (const auto& f : flatten_key(k, a.query.key)) cells.push_back(to_string(f));
    for (const auto& v : vals) cells.push_back(to_string(v));
    rows.push_back(std::move(cells));
  }
  return write_csv(header, rows);
}

}  // namespace contextdb
