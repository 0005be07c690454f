#include "fixtures.hpp"

#include <cli.hpp>
#include <service.hpp>

#include <contextdb/io.hpp>

#include <httplib.h>
#include <json.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <sstream>
#include <thread>

using namespace contextdb;
using contextdb::testkit::fixture_path;
using nlohmann::json;
using tools::Service;

namespace {

tools::Snapshot inv_snapshot() {
  tools::Snapshot s;
  s.ctx = testkit::inv_context();
  s.db = testkit::inv7();
  s.backing = parse_backing(read_file(fixture_path("star.backing.json")));
  return s;
}

json body_of(const tools::Response& r) { return json::parse(r.body); }

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = tools::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Service, Health) {
  Service s(inv_snapshot());
  auto r = s.handle("GET", "/health", "");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(body_of(r)["status"], "ok");
  EXPECT_EQ(body_of(r)["snapshot"], testkit::inv7()->snapshot_id());
}

TEST(Service, Context) {
  Service s(inv_snapshot());
  auto j = body_of(s.handle("GET", "/context", ""));
  EXPECT_EQ(j["roots"], json::array({"Inv"}));
  EXPECT_EQ(j["edges"].size(), 9u);
}

TEST(Service, Aggregates) {
  Service s(inv_snapshot());
  EXPECT_EQ(body_of(s.handle("GET", "/aggregates?node=Qty", "")),
            json::array({"sum", "min", "max", "count", "countd", "avg"}));
  EXPECT_EQ(s.handle("GET", "/aggregates?node=Nope", "").status, 404);
  EXPECT_EQ(s.handle("GET", "/aggregates", "").status, 400);
}

TEST(Service, Proposals) {
  Service s(inv_snapshot());
  auto r = s.handle("POST", "/proposals", R"j({"targets": ["Region"]})j");
  ASSERT_EQ(r.status, 200);
  bool found = false;
  json body = body_of(r);
  for (const auto& p : body["proposals"]) {
    if (p["key"] == "Inv") {
      found = true;
      EXPECT_EQ(p["targets"][0]["expressions"], json::array({"r o b", "h o s o p"}));
    }
  }
  EXPECT_TRUE(found);
}

TEST(Service, Traversal) {
  Service s(inv_snapshot());
  auto r = s.handle("POST", "/traversal", R"j({"query": "Q(Inv; b; q)"})j");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(body_of(r)["table"]["rows"].size(), 7u);
  auto bad = s.handle("POST", "/traversal", R"j({"query": "Q(Inv; r o b; h o s o p)", "mode": "require_equalities"})j");
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(body_of(bad)["error"]["code"], "EqualityViolation");
}

TEST(Service, AnalyticWithSql) {
  Service s(inv_snapshot());
  auto r = s.handle("POST", "/analytic", R"j({"g": "r o b", "m": "q", "op": "sum", "sql": true})j");
  ASSERT_EQ(r.status, 200);
  auto j = body_of(r);
  EXPECT_EQ(j["table"]["rows"], json::parse(R"j([["North", 300], ["South", 1200]])j"));
  EXPECT_EQ(j["sql"], "SELECT R1.Region, SUM(R.Qty) FROM R JOIN R1 ON R.Branch = R1.Branch GROUP BY R1.Region");
}

TEST(Service, AnalyticRestrictAndCombine) {
  Service s(inv_snapshot());
  auto r = s.handle("POST", "/analytic",
                    R"j({"grouping": "b", "measuring": "q", "op": "sum", "restrict": "[ans >= 600]",
                        "combine": {"op": "divide", "grouping": "tau(Inv)", "measuring": "q", "aggregate": "sum"}})j");
  ASSERT_EQ(r.status, 200);
  auto rows = body_of(r)["table"]["rows"];
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[0][1].get<double>(), 0.4);
}

TEST(Service, ErrorBodies) {
  Service s(inv_snapshot());
  auto r = s.handle("POST", "/analytic", R"j({"g": "zz", "m": "q", "op": "sum"})j");
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(body_of(r)["error"]["code"], "UnknownEdge");
  auto t = s.handle("POST", "/analytic", R"j({"g": "b", "m": "b", "op": "sum"})j");
  EXPECT_EQ(t.status, 400);
  EXPECT_EQ(body_of(t)["error"]["code"], "OpNotApplicable");
  EXPECT_EQ(s.handle("POST", "/analytic", "not json").status, 400);
  EXPECT_EQ(s.handle("GET", "/nowhere", "").status, 404);
}

TEST(Service, SnapshotSwap) {
  Service s(inv_snapshot());
  auto before = s.current();
  tools::Snapshot next = inv_snapshot();
  DatabaseBuilder b(next.ctx);
  b.values("Inv", {1});
  next.db = std::make_shared<const DatabaseInstance>(b.build());
  s.swap(next);
  EXPECT_NE(body_of(s.handle("GET", "/health", ""))["snapshot"], before->db->snapshot_id());
  EXPECT_EQ(before->db->snapshot_id(), testkit::inv7()->snapshot_id());
}

TEST(Http, RealServerOnEphemeralPort) {
  Service s(inv_snapshot());
  tools::HttpServer server(s);
  int port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread loop([&] { server.listen(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  auto res = client.Post("/analytic", R"j({"g": "r o b", "m": "q", "op": "sum"})j", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, s.handle("POST", "/analytic", R"j({"g": "r o b", "m": "q", "op": "sum"})j").body);
  auto missing = client.Get("/aggregates?node=Nope");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  server.stop();
  loop.join();
}

TEST(Cli, JsonMatchesService) {
  Service s(inv_snapshot());
  auto run = cli({"analytic", fixture_path("inv.ctx"), fixture_path("inv7.db"), "r o b", "q", "sum", "--json",
                  "--backing", fixture_path("star.backing.json")});
  EXPECT_EQ(run.code, 0);
  auto direct = s.handle("POST", "/analytic", json{{"grouping", "r o b"}, {"measuring", "q"}, {"op", "sum"}, {"sql", true}}.dump());
  EXPECT_EQ(run.out, direct.body + "\n");
  auto q = cli({"query", fixture_path("inv.ctx"), fixture_path("inv7.db"), "Q(Inv; b; q)", "--json"});
  EXPECT_EQ(q.out, s.handle("POST", "/traversal", json{{"query", "Q(Inv; b; q)"}, {"mode", "alias"}}.dump()).body + "\n");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({"validate", fixture_path("inv.ctx"), fixture_path("inv7.db")}).code, 0);
  EXPECT_EQ(cli({"check", fixture_path("emp.ctx"), fixture_path("emp_bad.db")}).code, 1);
  EXPECT_EQ(cli({"check", fixture_path("emp.ctx"), fixture_path("emp_ok.db")}).code, 0);
  EXPECT_EQ(cli({"analytic", fixture_path("inv.ctx"), fixture_path("inv7.db"), "r o", "q", "sum"}).code, 2);
  EXPECT_EQ(cli({"analytic", fixture_path("inv.ctx"), fixture_path("inv7.db"), "b", "q", "sum", "--json"}).code, 0);
  EXPECT_EQ(cli({"bogus"}).code, 2);
}

TEST(Cli, AnalyticCsvAndExplain) {
  auto run = cli({"analytic", fixture_path("inv.ctx"), fixture_path("inv7.db"), "b", "q", "sum", "--explain"});
  EXPECT_EQ(run.code, 0);
  EXPECT_EQ(run.out.rfind("Branch,sum(Qty)\nBranch-1,300\nBranch-2,600\nBranch-3,600\n", 0), 0u);
  EXPECT_NE(run.out.find("routes agree: yes"), std::string::npos);
}

TEST(Cli, EmitSqlAndRewrite) {
  auto sql = cli({"emit-sql", fixture_path("inv.ctx"), "analytic(b; q; sum)", fixture_path("star.backing.json")});
  EXPECT_EQ(sql.code, 0);
  EXPECT_EQ(sql.out, "SELECT R.Branch, SUM(R.Qty) FROM R GROUP BY R.Branch\n");
  auto rw = cli({"rewrite", fixture_path("inv.ctx"), "(c o p) & (s o p)", "--rule", "grouping"});
  EXPECT_EQ(rw.code, 0);
  EXPECT_NE(rw.out.find("(c & s) o p"), std::string::npos);
}

TEST(Cli, BinaryPrintsSameJson) {
  std::string cmd = std::string(CONTEXTDB_CLI_PATH) + " analytic " + fixture_path("inv.ctx") + " " +
                    fixture_path("inv7.db") + " b q sum --json";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  EXPECT_EQ(pclose(pipe), 0);
  Service s(inv_snapshot());
  EXPECT_EQ(out, s.handle("POST", "/analytic", json{{"grouping", "b"}, {"measuring", "q"}, {"op", "sum"}}.dump()).body + "\n");
}
