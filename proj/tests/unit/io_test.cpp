#include "fixtures.hpp"

#include <contextdb/error.hpp>
#include <contextdb/io.hpp>
#include <contextdb/parser.hpp>
#include <contextdb/table_io.hpp>

#include <json.hpp>

#include <gtest/gtest.h>

#include <functional>

using namespace contextdb;
using contextdb::testkit::fixture_path;
using contextdb::testkit::inv7;
using contextdb::testkit::inv_context;

TEST(Io, ContextRoundTrip) {
  auto ctx = inv_context();
  Context again = parse_context(context_to_json(*ctx));
  EXPECT_EQ(again.edges(), ctx->edges());
  EXPECT_EQ(again.attributes(), ctx->attributes());
  EXPECT_EQ(again.declared_nodes(), ctx->declared_nodes());
}

TEST(Io, ConstraintsAndClassesRoundTrip) {
  auto ctx = load_context(fixture_path("emp.ctx"));
  Context again = parse_context(context_to_json(*ctx));
  EXPECT_EQ(again.constraints(), ctx->constraints());
}

TEST(Io, DatabaseRoundTrip) {
  auto db = inv7();
  DatabaseInstance again = parse_database(database_to_json(*db), inv_context());
  EXPECT_EQ(again.snapshot_id(), db->snapshot_id());
  EXPECT_EQ(again.functions(), db->functions());
}

TEST(Io, FormatErrors) {
  auto code = [](const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::EvalError;
  };
  EXPECT_EQ(code([] { parse_context("{"); }), ErrorCode::FormatError);
  EXPECT_EQ(code([] { parse_context(R"({"attributes": [{"name": "A", "base": "blob"}]})"); }), ErrorCode::FormatError);
  EXPECT_EQ(code([] { parse_database(R"({"nodes": {"Inv": ["x"]}})", inv_context()); }), ErrorCode::FormatError);
  EXPECT_EQ(code([] { read_file("/nonexistent/file"); }), ErrorCode::IoError);
}

TEST(Io, AnswerTableJson) {
  auto ans = evaluate_analytic(parse_analytic("analytic(r o b; q; sum)", *inv_context()), *inv7());
  auto j = nlohmann::json::parse(answer_to_json(ans));
  EXPECT_EQ(j["schema"]["key"], nlohmann::json::array({"Region"}));
  EXPECT_EQ(j["schema"]["columns"][0]["expression"], "(r o b, q, sum)");
  EXPECT_EQ(j["rows"], nlohmann::json::parse(R"([["North", 300], ["South", 1200]])"));
  EXPECT_EQ(answer_to_csv(ans), "Region,sum(Qty)\nNorth,300\nSouth,1200\n");
}

TEST(Io, ProductKeysAreFlattened) {
  auto ans = evaluate_analytic(parse_analytic("analytic((c o p) & (s o p); q; sum)", *inv_context()), *inv7());
  auto j = nlohmann::json::parse(answer_to_json(ans));
  EXPECT_EQ(j["schema"]["key"], nlohmann::json::array({"Cat", "Sup"}));
  EXPECT_EQ(j["rows"][0], nlohmann::json::parse(R"(["C1", "S1", 600])"));
}

TEST(Io, RelationTables) {
  auto q = parse_traversal("R2(Prod; s; c)", *inv_context());
  Relation r = induced_relation(q, *inv7(), RelationMode::Alias);
  EXPECT_EQ(relation_to_csv(r), "Prod,Sup,Cat\nP1,S1,C1\nP2,S2,C2\n");
  auto j = nlohmann::json::parse(relation_to_json(r));
  EXPECT_EQ(j["schema"]["name"], "R2");
  EXPECT_EQ(j["rows"].size(), 2u);
}
