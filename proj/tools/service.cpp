#include "service.hpp"

#include <contextdb/aggregate.hpp>
#include <contextdb/analytic.hpp>
#include <contextdb/error.hpp>
#include <contextdb/io.hpp>
#include <contextdb/parser.hpp>
#include <contextdb/proposals.hpp>
#include <contextdb/table_io.hpp>

#include <json.hpp>

namespace contextdb::tools {

using nlohmann::json;

namespace {

Response json_response(int status, const json& body) { return {status, body.dump(2), "application/json"}; }

Response error_response(const Error& e) {
  json details = json::array();
  for (const auto& [k, v] : e.details()) details.push_back({{"key", k}, {"value", v}});
  int status = (e.code() == ErrorCode::UnknownNode || e.code() == ErrorCode::UnknownEdge) ? 404 : 400;
  return json_response(status, {{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"details", details}}}});
}

Response not_found(const std::string& what) {
  return json_response(404, {{"error", {{"code", "NotFound"}, {"message", what}, {"details", json::array()}}}});
}

json parse_body(const std::string& body) {
  try {
    json j = json::parse(body.empty() ? "{}" : body);
    if (!j.is_object()) throw Error(ErrorCode::FormatError, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::FormatError, std::string("invalid JSON body: ") + e.what());
  }
}

std::string field(const json& body, std::initializer_list<const char*> names, bool required = true) {
  for (const char* n : names) {
    if (body.contains(n)) {
      if (!body.at(n).is_string()) throw Error(ErrorCode::FormatError, std::string("\"") + n + "\" must be a string");
      return body.at(n).get<std::string>();
    }
  }
  if (required) throw Error(ErrorCode::FormatError, std::string("missing \"") + *names.begin() + "\"");
  return {};
}

std::string query_param(const std::string& query, const std::string& name) {
  std::size_t pos = 0;
  while (pos <= query.size()) {
    std::size_t amp = query.find('&', pos);
    std::string kv = query.substr(pos, amp == std::string::npos ? std::string::npos : amp - pos);
    auto eq = kv.find('=');
    if (kv.substr(0, eq) == name) {
      std::string raw = eq == std::string::npos ? "" : kv.substr(eq + 1);
      std::string out;
      for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '+') {
          out += ' ';
        } else if (raw[i] == '%' && i + 2 < raw.size()) {
          out += static_cast<char>(std::stoi(raw.substr(i + 1, 2), nullptr, 16));
          i += 2;
        } else {
          out += raw[i];
        }
      }
      return out;
    }
    if (amp == std::string::npos) break;
    pos = amp + 1;
  }
  return {};
}

json context_doc(const Snapshot& s) {
  json doc = json::parse(context_to_json(*s.ctx));
  doc["roots"] = json::array();
  for (const auto& r : s.ctx->roots()) doc["roots"].push_back(r.name());
  doc["snapshot"] = s.db->snapshot_id();
  return doc;
}

Response proposals(const Snapshot& s, const json& body) {
  if (!body.contains("targets") || !body.at("targets").is_array()) {
    throw Error(ErrorCode::FormatError, "\"targets\" must be an array of node names");
  }
  std::vector<NodeRef> targets;
  for (const auto& t : body.at("targets")) {
    if (!t.is_string()) throw Error(ErrorCode::FormatError, "targets must be strings");
    targets.push_back(parse_node(t.get<std::string>()));
  }
  ProposalOptions opts;
  if (body.contains("max_len")) opts.max_len = body.at("max_len").get<std::size_t>();
  if (body.contains("max_per_pair")) opts.max_per_pair = body.at("max_per_pair").get<std::size_t>();
  json out = json::array();
  for (const auto& p : enumerate_proposals(*s.ctx, targets, opts)) {
    json per = json::array();
    for (std::size_t i = 0; i < p.targets.size(); ++i) {
      json exprs = json::array();
      for (const auto& e : p.expressions[i]) exprs.push_back(print(*e));
      per.push_back({{"target", p.targets[i].name()}, {"expressions", exprs}});
    }
    out.push_back({{"key", p.key.name()}, {"distance", p.distance}, {"targets", per}});
  }
  return json_response(200, {{"proposals", out}});
}

Response traversal(const Snapshot& s, const json& body) {
  TraversalQueryAst q = parse_traversal(field(body, {"query"}), *s.ctx);
  RelationMode mode = RelationMode::Alias;
  if (std::string m = field(body, {"mode"}, false); !m.empty()) {
    auto parsed = parse_relation_mode(m);
    if (!parsed) throw Error(ErrorCode::FormatError, "unknown mode " + m, {{"mode", m}});
    mode = *parsed;
  }
  Relation r = induced_relation(q, *s.db, mode);
  return json_response(200, {{"table", json::parse(relation_to_json(r))}});
}

AnalyticAnswer run_analytic(const Snapshot& s, const std::string& g, const std::string& m, const std::string& op,
                            const std::string& name) {
  ExprPtr ge = parse_expression(g, *s.ctx);
  ExprPtr me = parse_expression(m, *s.ctx);
  AnalyticQueryAst q = make_analytic(ge, me, op, *s.ctx);
  if (!name.empty()) q.result_name = name;
  return evaluate_analytic(q, *s.db);
}

Response analytic(const Snapshot& s, const json& body) {
  const std::string g = field(body, {"grouping", "g"});
  const std::string m = field(body, {"measuring", "m"});
  const std::string op = field(body, {"op"});
  const std::string name = field(body, {"name"}, false);
  AnalyticAnswer ans = run_analytic(s, g, m, op, name);
  if (std::string filter = field(body, {"restrict", "restrictions"}, false); !filter.empty()) {
    ans = restrict_answer(ans, parse_answer_filter(filter, ans.group_node, *s.ctx));
  }
  if (body.contains("combine")) {
    const json& c = body.at("combine");
    std::string arith = field(c, {"op"});
    auto aop = parse_arith_op(arith);
    if (!aop) throw Error(ErrorCode::FormatError, "unknown arithmetic operation " + arith, {{"op", arith}});
    if (c.contains("scalar")) {
      const json& v = c.at("scalar");
      Value scalar = v.is_number_integer() ? Value(v.get<std::int64_t>()) : Value(v.get<double>());
      ans = combine_answers(ans, scalar, *aop);
    } else {
      AnalyticAnswer rhs = run_analytic(s, field(c, {"grouping", "g"}), field(c, {"measuring", "m"}),
                                        field(c, {"aggregate"}), "");
      ans = combine_answers(ans, rhs, *aop);
    }
  }
  json out{{"table", json::parse(answer_to_json(ans))}};
  if (body.value("sql", false)) {
    if (!s.backing) throw Error(ErrorCode::UnbackedEdge, "the service has no backing map");
    AnalyticQueryAst q = make_analytic(parse_expression(g, *s.ctx), parse_expression(m, *s.ctx), op, *s.ctx);
    out["sql"] = emit_sql(q, *s.backing);
  }
  return json_response(200, out);
}

Response aggregates(const Snapshot& s, const std::string& query) {
  std::string node_text = query_param(query, "node");
  if (node_text.empty()) throw Error(ErrorCode::FormatError, "missing node parameter");
  NodeRef node = parse_node(node_text);
  if (!s.ctx->has_node(node)) throw Error(ErrorCode::UnknownNode, "unknown node " + node_text, {{"node", node_text}});
  return json_response(200, applicable_aggregates(*s.ctx, node));
}

}  // namespace

Service::Service(Snapshot snapshot) : snapshot_(std::make_shared<const Snapshot>(std::move(snapshot))) {}

void Service::swap(Snapshot snapshot) {
  auto next = std::make_shared<const Snapshot>(std::move(snapshot));
  std::lock_guard lock(mu_);
  snapshot_ = std::move(next);
}

std::shared_ptr<const Snapshot> Service::current() const {
  std::lock_guard lock(mu_);
  return snapshot_;
}

Response Service::handle(const std::string& method, const std::string& target, const std::string& body) const {
  auto snap = current();
  auto qpos = target.find('?');
  std::string path = target.substr(0, qpos);
  std::string query = qpos == std::string::npos ? "" : target.substr(qpos + 1);
  try {
    if (method == "GET" && path == "/health") {
      return json_response(200, {{"status", "ok"}, {"snapshot", snap->db->snapshot_id()}});
    }
    if (method == "GET" && path == "/context") return json_response(200, context_doc(*snap));
    if (method == "GET" && path == "/aggregates") return aggregates(*snap, query);
    if (method == "POST" && path == "/proposals") return proposals(*snap, parse_body(body));
    if (method == "POST" && path == "/traversal") return traversal(*snap, parse_body(body));
    if (method == "POST" && path == "/analytic") return analytic(*snap, parse_body(body));
    return not_found("no route for " + method + " " + path);
  } catch (const Error& e) {
    return error_response(e);
  } catch (const json::exception& e) {
    return error_response(Error(ErrorCode::FormatError, std::string("malformed request: ") + e.what()));
  }
}

}  // namespace contextdb::tools
