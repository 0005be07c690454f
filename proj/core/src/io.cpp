#include "contextdb/io.hpp"

#include "contextdb/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace contextdb {

using nlohmann::json;

namespace {

[[noreturn]] void format_error(const std::string& message, const std::string& where = {}) {
  std::vector<std::pair<std::string, std::string>> details;
  if (!where.empty()) details.emplace_back("at", where);
  throw Error(ErrorCode::FormatError, message, std::move(details));
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::FormatError, std::string("invalid JSON: ") + e.what(),
                {{"position", std::to_string(e.byte)}});
  }
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) format_error(std::string("missing \"") + key + "\"", where);
  return obj.at(key);
}

std::string text_of(const json& j, const std::string& where) {
  if (!j.is_string()) format_error("expected a string", where);
  return j.get<std::string>();
}

NodeRef node_of(const json& j, const std::string& where) {
  if (j.is_string()) return parse_node(j.get<std::string>());
  if (j.is_array()) {
    std::vector<std::string> factors;
    for (const auto& f : j) factors.push_back(text_of(f, where));
    if (factors.empty()) format_error("empty node", where);
    return NodeRef::product(std::move(factors));
  }
  format_error("expected a node name or an array of factors", where);
}

json node_json(const NodeRef& n) { return n.name(); }

Value scalar_of(const json& j, BaseType base, const std::string& where) {
  switch (base) {
    case BaseType::Integer:
      if (j.is_number_integer()) return Value(j.get<std::int64_t>());
      break;
    case BaseType::Float:
      if (j.is_number()) return Value(j.get<double>());
      break;
    case BaseType::Text:
      if (j.is_string()) return Value(j.get<std::string>());
      if (j.is_number_integer()) return Value(std::to_string(j.get<std::int64_t>()));
      break;
    case BaseType::Date:
    case BaseType::Unit:
      if (j.is_string()) {
        if (auto v = parse_value(j.get<std::string>(), base)) return *v;
      }
      break;
  }
  format_error("value " + j.dump() + " is not a " + std::string(to_string(base)), where);
}

Value value_of(const json& j, const NodeRef& node, const Context& ctx, const std::string& where) {
  if (node.is_terminal()) return scalar_of(j, BaseType::Unit, where);
  if (node.is_simple()) {
    auto base = ctx.base_type(node.attribute());
    if (!base) format_error("unknown attribute " + node.attribute(), where);
    return scalar_of(j, *base, where);
  }
  if (!j.is_array() || j.size() != node.arity()) format_error("expected a tuple of " + node.name(), where);
  Value::Tuple t;
  for (std::size_t i = 0; i < node.arity(); ++i) {
    t.push_back(value_of(j[i], NodeRef::simple(node.factors()[i]), ctx, where));
  }
  return Value(std::move(t));
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

Context context_from(const json& doc) {
  ContextBuilder b;
  if (!doc.is_object()) format_error("context document must be an object");
  for (const auto& a : member(doc, "attributes", "context")) {
    std::string name = text_of(member(a, "name", "attributes"), "attributes");
    std::string base_name = a.contains("base") ? text_of(a.at("base"), name) : "text";
    auto base = parse_base_type(base_name);
    if (!base) format_error("unknown base type " + base_name, name);
    b.attribute(name, *base);
  }
  if (doc.contains("nodes")) {
    for (const auto& n : doc.at("nodes")) b.node(node_of(n, "nodes"));
  }
  if (doc.contains("edges")) {
    for (const auto& e : doc.at("edges")) {
      std::string label = text_of(member(e, "label", "edges"), "edges");
      b.edge(node_of(member(e, "source", label), label), label, node_of(member(e, "target", label), label));
    }
  }
  if (doc.contains("constraints")) {
    for (const auto& c : doc.at("constraints")) {
      std::string kind = text_of(member(c, "kind", "constraints"), "constraints");
      ConstraintDecl d;
      if (kind == "eq") d.kind = ConstraintDecl::Kind::Equality;
      else if (kind == "ref") d.kind = ConstraintDecl::Kind::Refinement;
      else format_error("constraint kind must be eq or ref", kind);
      d.lhs = text_of(member(c, "lhs", "constraints"), "constraints");
      d.rhs = text_of(member(c, "rhs", "constraints"), "constraints");
      b.constraint(std::move(d));
    }
  }
  if (doc.contains("classes")) {
    for (const auto& [rep, members] : doc.at("classes").items()) {
      std::vector<std::string> ms;
      for (const auto& m : members) ms.push_back(text_of(m, rep));
      b.equivalence_class(rep, std::move(ms));
    }
  }
  return b.build();
}

json context_json(const Context& ctx) {
  json doc;
  doc["attributes"] = json::array();
  for (const auto& a : ctx.attributes()) {
    doc["attributes"].push_back({{"name", a.attribute}, {"base", std::string(to_string(a.base))}});
  }
  doc["nodes"] = json::array();
  for (const auto& n : ctx.declared_nodes()) doc["nodes"].push_back(node_json(n));
  doc["edges"] = json::array();
  for (const auto& e : ctx.edges()) {
    doc["edges"].push_back({{"source", node_json(e.source)}, {"label", e.label}, {"target", node_json(e.target)}});
  }
  doc["constraints"] = json::array();
  for (const auto& c : ctx.constraints()) {
    doc["constraints"].push_back(
        {{"kind", c.kind == ConstraintDecl::Kind::Equality ? "eq" : "ref"}, {"lhs", c.lhs}, {"rhs", c.rhs}});
  }
  doc["classes"] = json::object();
  for (const auto& [rep, members] : ctx.classes()) doc["classes"][rep] = members;
  return doc;
}

}  // namespace

Context parse_context(std::string_view json_text) {
  try {
    return context_from(parse_json(json_text));
  } catch (const json::exception& e) {
    format_error(std::string("malformed context: ") + e.what());
  }
}

std::string context_to_json(const Context& ctx) { return context_json(ctx).dump(2); }

DatabaseInstance parse_database(std::string_view json_text, std::shared_ptr<const Context> ctx) {
  json doc = parse_json(json_text);
  try {
    DatabaseBuilder b(ctx);
    if (doc.contains("nodes")) {
      for (const auto& [name, values] : doc.at("nodes").items()) {
        if (!ctx->has_attribute(name)) {
          throw Error(ErrorCode::UnknownNode, "unknown node " + name, {{"node", name}});
        }
        for (const auto& v : values) b.value(name, value_of(v, NodeRef::simple(name), *ctx, name));
      }
    }
    if (doc.contains("edges")) {
      for (const auto& [key, pairs] : doc.at("edges").items()) {
        Edge edge = resolve_edge(*ctx, key);
        for (const auto& p : pairs) {
          if (!p.is_array() || p.size() != 2) format_error("edge entries are [x, y] pairs", key);
          b.pair(edge, value_of(p[0], edge.source, *ctx, key), value_of(p[1], edge.target, *ctx, key));
        }
      }
    }
    return b.build();
  } catch (const json::exception& e) {
    format_error(std::string("malformed database: ") + e.what());
  }
}

std::string database_to_json(const DatabaseInstance& db) {
  json doc;
  doc["nodes"] = json::object();
  for (const auto& [name, values] : db.node_values()) {
    json arr = json::array();
    for (const auto& v : values) arr.push_back(value_json(v));
    doc["nodes"][name] = arr;
  }
  doc["edges"] = json::object();
  for (const auto& [edge, fn] : db.functions()) {
    json arr = json::array();
    for (const auto& [x, y] : fn.map) arr.push_back(json::array({value_json(x), value_json(y)}));
    doc["edges"][edge.qualified_name()] = arr;
  }
  return doc.dump(2);
}

View parse_view(std::string_view json_text, std::shared_ptr<const Context> base) {
  json doc = parse_json(json_text);
  try {
    auto shape = std::make_shared<const Context>(context_from(member(doc, "shape", "view")));
    std::map<std::string, std::string> defs;
    if (doc.contains("definitions")) {
      for (const auto& [label, text] : doc.at("definitions").items()) defs.emplace(label, text_of(text, label));
    }
    return make_view(std::move(shape), std::move(base), std::move(defs));
  } catch (const json::exception& e) {
    format_error(std::string("malformed view: ") + e.what());
  }
}

BackingMap parse_backing(std::string_view json_text) {
  json doc = parse_json(json_text);
  if (!doc.is_object()) format_error("backing document must be an object");
  BackingMap out;
  for (const auto& [label, b] : doc.items()) {
    out.emplace(label, EdgeBacking{text_of(member(b, "table", label), label), text_of(member(b, "key_col", label), label),
                                   text_of(member(b, "val_col", label), label)});
  }
  return out;
}

RelationalViewDef parse_viewdefs(std::string_view json_text) {
  json doc = parse_json(json_text);
  RelationalViewDef out;
  if (doc.contains("name")) out.name = text_of(doc.at("name"), "name");
  for (const auto& q : member(doc, "queries", "viewdefs")) {
    RelationalQueryDef d;
    d.name = text_of(member(q, "name", "queries"), "queries");
    d.query = text_of(member(q, "query", d.name), d.name);
    if (q.contains("mode")) {
      std::string mode = text_of(q.at("mode"), d.name);
      auto m = parse_relation_mode(mode);
      if (!m) format_error("unknown mode " + mode, d.name);
      d.mode = *m;
    }
    out.queries.push_back(std::move(d));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path, {{"path", path}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path, {{"path", path}});
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path, {{"path", path}});
}

std::shared_ptr<const Context> load_context(const std::string& path) {
  return std::make_shared<const Context>(parse_context(read_file(path)));
}

std::shared_ptr<const DatabaseInstance> load_database(const std::string& path, std::shared_ptr<const Context> ctx) {
  return std::make_shared<const DatabaseInstance>(parse_database(read_file(path), std::move(ctx)));
}

}  // namespace contextdb
