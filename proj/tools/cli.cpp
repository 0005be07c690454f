#include "cli.hpp"

#include "service.hpp"

#include <contextdb/analytic.hpp>
#include <contextdb/constraints.hpp>
#include <contextdb/error.hpp>
#include <contextdb/io.hpp>
#include <contextdb/parser.hpp>
#include <contextdb/rewrite.hpp>
#include <contextdb/table_io.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace contextdb::tools {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownEdge:
    case ErrorCode::UnknownNode:
    case ErrorCode::AmbiguousEdge:
    case ErrorCode::TypeError:
    case ErrorCode::KeyMismatch:
    case ErrorCode::OpNotApplicable:
    case ErrorCode::PredicateTypeError:
    case ErrorCode::FormatError:
    case ErrorCode::IoError:
      return 2;
    default:
      return 1;
  }
}

void print_error(const Error& e, std::ostream& err) {
  err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
  for (const auto& [k, v] : e.details()) err << "  " << k << ": " << v << "\n";
}

void print_report(const ValidationReport& r, std::ostream& out) {
  for (const auto& v : r.violations) {
    out << v.code << ": " << v.message;
    if (!v.elements.empty()) {
      out << " [";
      for (std::size_t i = 0; i < v.elements.size(); ++i) out << (i ? ", " : "") << v.elements[i];
      out << "]";
    }
    out << "\n";
  }
}

// Prints the service's response body; maps HTTP status to an exit code.
int print_response(const Response& r, std::ostream& out) {
  out << r.body << "\n";
  if (r.status == 200) return 0;
  json body = json::parse(r.body);
  std::string code = body["error"]["code"].get<std::string>();
  for (int c = 0; c <= static_cast<int>(ErrorCode::IoError); ++c) {
    if (to_string(static_cast<ErrorCode>(c)) == code) return exit_code(Error(static_cast<ErrorCode>(c), ""));
  }
  return 2;
}

Snapshot load(const std::string& ctx_path, const std::string& db_path, const std::string& backing_path = {}) {
  Snapshot s;
  s.ctx = load_context(ctx_path);
  s.db = load_database(db_path, s.ctx);
  if (!backing_path.empty()) s.backing = parse_backing(read_file(backing_path));
  return s;
}

void load_cache(const std::string& path, const Context& ctx, ResultCache& cache) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.path().extension() == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.emplace_back(path);
  }
  for (const auto& f : files) {
    std::istringstream lines(read_file(f.string()));
    std::string line;
    while (std::getline(lines, line)) {
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      cache.declare(print(*parse_expression(line, ctx)), "");
    }
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Query engine for context databases"};
  app.require_subcommand(1);

  std::string ctx_path, db_path, text, grouping, measuring, op, mode = "alias", csv_out, restrict_text, name,
                                                                   cache_path, backing_path, viewdefs_path, outdir,
                                                                   rule_name, at_path = "root", key_col, into_path;
  std::vector<std::string> mappings;
  bool as_json = false, explain = false;
  int port = 0;
  std::string host = "127.0.0.1";

  auto* validate = app.add_subcommand("validate", "Check a context and optionally a database over it");
  validate->add_option("context", ctx_path, "Context file")->required();
  validate->add_option("database", db_path, "Database file");

  auto* query = app.add_subcommand("query", "Evaluate a traversal query and print its relation");
  query->add_option("context", ctx_path)->required();
  query->add_option("database", db_path)->required();
  query->add_option("query", text, "Q(Key; E1; ...) or an expression")->required();
  query->add_option("--mode", mode, "alias | eq")->check(CLI::IsMember({"alias", "eq", "require_equalities"}));
  query->add_option("--csv", csv_out, "Write the relation to this CSV file");
  query->add_flag("--json", as_json, "Print the service's JSON response");

  auto* analytic = app.add_subcommand("analytic", "Evaluate an analytic query (g, m, op)");
  analytic->add_option("context", ctx_path)->required();
  analytic->add_option("database", db_path)->required();
  analytic->add_option("grouping", grouping)->required();
  analytic->add_option("measuring", measuring)->required();
  analytic->add_option("op", op)->required();
  analytic->add_option("--restrict", restrict_text, "Answer filter, e.g. \"[ans > 500]\"");
  analytic->add_option("--name", name, "Result attribute name");
  analytic->add_option("--backing", backing_path, "Backing map; adds the SQL text to --json output");
  analytic->add_flag("--explain", explain, "Print the evaluation plans");
  analytic->add_flag("--json", as_json, "Print the service's JSON response");

  auto* rewrite = app.add_subcommand("rewrite", "Rewrite an expression to reuse cached results");
  rewrite->add_option("context", ctx_path)->required();
  rewrite->add_option("expression", text)->required();
  rewrite->add_option("--cache", cache_path, "File or directory of *.txt files listing cached expressions");
  rewrite->add_option("--rule", rule_name, "Apply one rule instead of the cache-driven search");
  rewrite->add_option("--at", at_path, "Subexpression path for --rule (root, 0, 1.0, ...)");
  rewrite->add_flag("--explain", explain, "Print the rewrite trace");

  auto* check = app.add_subcommand("check", "Check the context's equality and refinement constraints");
  check->add_option("context", ctx_path)->required();
  check->add_option("database", db_path)->required();

  auto* exp = app.add_subcommand("export", "Export the relations defined by a set of traversal queries");
  exp->add_option("context", ctx_path)->required();
  exp->add_option("database", db_path)->required();
  exp->add_option("viewdefs", viewdefs_path)->required();
  exp->add_option("--outdir", outdir)->required();

  auto* sql = app.add_subcommand("emit-sql", "Translate an analytic query to SQL");
  sql->add_option("context", ctx_path)->required();
  sql->add_option("analytic", text, "analytic(g; m; op)")->required();
  sql->add_option("backing", backing_path)->required();

  auto* ingest = app.add_subcommand("ingest", "Build edge functions from a CSV relation");
  ingest->add_option("context", ctx_path)->required();
  ingest->add_option("csv", text)->required();
  ingest->add_option("--key", key_col, "Key column")->required();
  ingest->add_option("--map", mappings, "COLUMN=edge, repeatable")->required();
  ingest->add_option("--into", into_path, "Merge into this database");
  ingest->add_option("-o,--output", csv_out, "Write the database here instead of stdout");

  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
  serve_cmd->add_option("context", ctx_path)->required();
  serve_cmd->add_option("database", db_path)->required();
  serve_cmd->add_option("--port", port, "Port (default $CONTEXTDB_PORT or 8080)");
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--backing", backing_path);

  std::vector<const char*> argv{"contextdb"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) {
      auto ctx = load_context(ctx_path);
      ValidationReport report = validate_context(*ctx);
      if (!db_path.empty()) report.append(validate_instance(*load_database(db_path, ctx)));
      print_report(report, out);
      if (report.ok()) out << "ok\n";
      return report.ok() ? 0 : 1;
    }
    if (query->parsed()) {
      Service service(load(ctx_path, db_path));
      if (as_json) {
        return print_response(service.handle("POST", "/traversal", json{{"query", text}, {"mode", mode}}.dump()), out);
      }
      auto snap = service.current();
      Relation r = induced_relation(parse_traversal(text, *snap->ctx), *snap->db, *parse_relation_mode(mode));
      std::string csv = relation_to_csv(r);
      if (!csv_out.empty()) write_file(csv_out, csv);
      else out << csv;
      std::vector<std::string> fd = check_key_dependencies(r);
      for (const auto& v : fd) err << "key dependency violated: " << v << "\n";
      return fd.empty() ? 0 : 1;
    }
    if (analytic->parsed()) {
      Service service(load(ctx_path, db_path, backing_path));
      if (as_json) {
        json body{{"grouping", grouping}, {"measuring", measuring}, {"op", op}};
        if (!name.empty()) body["name"] = name;
        if (!restrict_text.empty()) body["restrict"] = restrict_text;
        if (!backing_path.empty()) body["sql"] = true;
        return print_response(service.handle("POST", "/analytic", body.dump()), out);
      }
      auto snap = service.current();
      AnalyticQueryAst q = make_analytic(parse_expression(grouping, *snap->ctx), parse_expression(measuring, *snap->ctx),
                                         op, *snap->ctx);
      if (!name.empty()) q.result_name = name;
      AnalyticAnswer ans = evaluate_analytic(q, *snap->db);
      if (!restrict_text.empty()) ans = restrict_answer(ans, parse_answer_filter(restrict_text, ans.group_node, *snap->ctx));
      out << answer_to_csv(ans);
      if (explain) {
        out << "direct: " << print(AnalyticPlan::direct(q)) << "\n";
        try {
          AnalyticPlan nested = unfold_composition(q);
          AnalyticAnswer via = evaluate_plan(nested, *snap->db);
          AnalyticAnswer direct = evaluate_analytic(q, *snap->db);
          out << "nested: " << print(nested) << "\n";
          out << "routes agree: " << (via.values == direct.values ? "yes" : "no") << "\n";
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NotAssociative) throw;
          out << "nested: refused, " << e.what() << "\n";
        }
      }
      return 0;
    }
    if (rewrite->parsed()) {
      auto ctx = load_context(ctx_path);
      ExprPtr e = parse_expression(text, *ctx);
      if (!rule_name.empty()) {
        auto rule = parse_rule_name(rule_name);
        if (!rule) throw Error(ErrorCode::FormatError, "unknown rule " + rule_name, {{"rule", rule_name}});
        ExprPath path;
        if (at_path != "root") {
          std::stringstream ss(at_path);
          std::string part;
          while (std::getline(ss, part, '.')) path.push_back(std::stoul(part));
        }
        ExprPtr after = apply_rule(*rule, e, path);
        if (explain) out << rule->name() << " @ " << print_path(path) << " : " << print(*e) << " => " << print(*after) << "\n";
        out << print(*after) << "\n";
        return 0;
      }
      ResultCache cache;
      if (!cache_path.empty()) load_cache(cache_path, *ctx, cache);
      auto [result, trace] = rewrite_for_cache(e, cache, "");
      if (explain) out << trace.to_string();
      out << print(*result) << "\n";
      return 0;
    }
    if (check->parsed()) {
      auto ctx = load_context(ctx_path);
      ValidationReport report = check_all(*load_database(db_path, ctx));
      print_report(report, out);
      if (report.ok()) out << "ok\n";
      return report.ok() ? 0 : 1;
    }
    if (exp->parsed()) {
      Snapshot s = load(ctx_path, db_path);
      auto rels = export_database(parse_viewdefs(read_file(viewdefs_path)), *s.db);
      fs::create_directories(outdir);
      int status = 0;
      for (const auto& r : rels) {
        std::string base = (fs::path(outdir) / r.schema.name).string();
        write_file(base + ".csv", relation_to_csv(r));
        write_file(base + ".json", relation_to_json(r) + "\n");
        out << base << ".csv\n";
        for (const auto& v : check_key_dependencies(r)) {
          err << r.schema.name << ": key dependency violated: " << v << "\n";
          status = 1;
        }
      }
      return status;
    }
    if (sql->parsed()) {
      auto ctx = load_context(ctx_path);
      out << emit_sql(parse_analytic(text, *ctx), parse_backing(read_file(backing_path))) << "\n";
      return 0;
    }
    if (ingest->parsed()) {
      auto ctx = load_context(ctx_path);
      std::map<std::string, std::string> columns;
      for (const auto& m : mappings) {
        auto eq = m.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::FormatError, "--map expects COLUMN=edge", {{"map", m}});
        columns.emplace(m.substr(0, eq), m.substr(eq + 1));
      }
      Table t = parse_csv(read_file(text), fs::path(text).stem().string());
      std::vector<Ingested> parts;
      if (!into_path.empty()) {
        auto base = load_database(into_path, ctx);
        parts.push_back(Ingested{{base->node_values().begin(), base->node_values().end()}, base->functions()});
      }
      parts.push_back(ingest_relation(t, key_col, columns, *ctx));
      std::string doc = database_to_json(assemble_database(ctx, parts)) + "\n";
      if (!csv_out.empty()) write_file(csv_out, doc);
      else out << doc;
      return 0;
    }
    if (serve_cmd->parsed()) {
      if (port == 0) {
        const char* env = std::getenv("CONTEXTDB_PORT");
        port = env ? std::atoi(env) : 8080;
      }
      Service service(load(ctx_path, db_path, backing_path));
      return serve(service, host, port);
    }
  } catch (const Error& e) {
    print_error(e, err);
    return exit_code(e);
  }
  return 2;
}

}  // namespace contextdb::tools
