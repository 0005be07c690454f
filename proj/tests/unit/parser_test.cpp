#include "fixtures.hpp"

#include <contextdb/error.hpp>
#include <contextdb/parser.hpp>

#include <gtest/gtest.h>

using namespace contextdb;
using contextdb::testkit::inv_context;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    parse_expression(text, *inv_context());
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorCode::EvalError;
}

}  // namespace

TEST(Parser, CompositionTypes) {
  auto e = parse_expression("r o b", *inv_context());
  EXPECT_EQ(e->kind, ExprKind::Compose);
  EXPECT_EQ(e->source.name(), "Inv");
  EXPECT_EQ(e->target.name(), "Region");
  EXPECT_TRUE(well_typed(*e));
}

TEST(Parser, CompositionIsLeftAssociative) {
  auto e = parse_expression("h o s o p", *inv_context());
  ASSERT_EQ(e->kind, ExprKind::Compose);
  EXPECT_EQ(e->children[0]->kind, ExprKind::Compose);
  EXPECT_EQ(e->children[1]->edge.label, "p");
}

TEST(Parser, PairingAndProjection) {
  auto ctx = inv_context();
  auto e = parse_expression("u o ((c o p) & (s o p))", *ctx);
  EXPECT_EQ(e->target.name(), "Unitprice");
  auto rr = parse_expression("(r o b) & (h o s o p)", *ctx);
  EXPECT_EQ(rr->target.name(), "Region*Region");
  auto pi = parse_expression("pi[Cat](Cat*Sup)", *ctx);
  EXPECT_EQ(pi->source.name(), "Cat*Sup");
  EXPECT_EQ(pi->target.name(), "Cat");
}

TEST(Parser, IdentityTerminalQualified) {
  auto ctx = inv_context();
  EXPECT_EQ(parse_expression("id(Inv)", *ctx)->kind, ExprKind::Identity);
  EXPECT_EQ(parse_expression("tau(Inv)", *ctx)->target, NodeRef::terminal());
  auto q = parse_expression("r@Branch>Region", *ctx);
  EXPECT_TRUE(q->qualified);
  EXPECT_EQ(q->edge.label, "r");
}

TEST(Parser, Restrictions) {
  auto ctx = inv_context();
  auto e = parse_expression("q/{1, 2, 3}", *ctx);
  ASSERT_EQ(e->kind, ExprKind::Restrict);
  ASSERT_TRUE(e->restriction.values);
  EXPECT_EQ(e->restriction.values->size(), 3u);
  auto c = parse_expression("q/[r o b = \"North\" && q >= 200]", *ctx);
  ASSERT_EQ(c->restriction.conditions.size(), 2u);
  EXPECT_EQ(c->restriction.conditions[1].op, CmpOp::Ge);
  auto in = parse_expression("q/[b in {Branch-1, Branch-2}]", *ctx);
  ASSERT_EQ(in->restriction.conditions.size(), 1u);
  EXPECT_EQ(in->restriction.conditions[0].op, CmpOp::In);
  auto dates = parse_expression("q/[d >= \"2023-01-07\"]", *ctx);
  EXPECT_EQ(dates->restriction.conditions[0].rhs_value, Value(Date{"2023-01-07"}));
}

TEST(Parser, PrintRoundTrips) {
  auto ctx = inv_context();
  for (const std::string text :
       {"r o b", "h o s o p", "(r o b) & (h o s o p)", "u o ((c o p) & (s o p))", "q/{1, 2}",
        "q/[r o b = \"North\" && q > 100]", "tau(Inv)", "id(Branch)", "pi[Cat](Cat*Sup)", "r * c",
        "r o (b/[q in {100, 200}])", "r@Branch>Region o b"}) {
    auto e = parse_expression(text, *ctx);
    auto again = parse_expression(print(e), *ctx);
    EXPECT_TRUE(equal(e, again)) << text << " printed as " << print(e);
  }
}

TEST(Parser, ErrorTaxonomy) {
  EXPECT_EQ(code_of("r o"), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of("zz"), ErrorCode::UnknownEdge);
  EXPECT_EQ(code_of("id(Nope)"), ErrorCode::UnknownNode);
  EXPECT_EQ(code_of("b o r"), ErrorCode::TypeError);
  EXPECT_EQ(code_of("b & r"), ErrorCode::KeyMismatch);
  EXPECT_EQ(code_of("q/[q > \"North\"]"), ErrorCode::PredicateTypeError);
}

TEST(Parser, SyntaxErrorCarriesPosition) {
  try {
    parse_expression("r o (b", *inv_context());
    FAIL();
  } catch (const Error& e) {
    bool has_position = false;
    for (const auto& [k, v] : e.details()) has_position = has_position || k == "position";
    EXPECT_TRUE(has_position);
  }
}

TEST(Parser, AmbiguousLabel) {
  ContextBuilder b;
  b.attribute("K", BaseType::Integer).attribute("A", BaseType::Text).attribute("B", BaseType::Text);
  b.edge("K", "f", "A").edge("K", "f", "B");
  Context ctx = b.build();
  try {
    parse_expression("f", ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AmbiguousEdge);
  }
  EXPECT_EQ(parse_expression("f@K>B", ctx)->target.name(), "B");
}

TEST(Parser, TraversalQueries) {
  auto ctx = inv_context();
  auto q = parse_traversal("Q(Inv; r o b; c o p)", *ctx);
  EXPECT_EQ(q.name, "Q");
  EXPECT_EQ(q.key.name(), "Inv");
  EXPECT_EQ(q.expressions.size(), 2u);
  EXPECT_EQ(print(q), "Q(Inv; r o b; c o p)");
  auto bare = parse_traversal("b & q", *ctx);
  EXPECT_EQ(bare.expressions.size(), 2u);
  auto restricted = parse_traversal("Q(Inv/{1, 2}; b)", *ctx);
  ASSERT_TRUE(restricted.key_restriction);
  EXPECT_THROW(parse_traversal("Q(Branch; b)", *ctx), Error);
}

TEST(Parser, AnalyticQueries) {
  auto ctx = inv_context();
  auto a = parse_analytic("analytic(r o b; q; sum)", *ctx);
  EXPECT_EQ(a.op, "sum");
  EXPECT_EQ(a.result_attribute(), "sum(Qty)");
  EXPECT_EQ(print(a), "analytic(r o b; q; sum)");
  auto named = parse_analytic("analytic(b; q; sum; Total)/[ans > 300]", *ctx);
  EXPECT_EQ(named.result_attribute(), "Total");
  ASSERT_TRUE(named.filter);
  EXPECT_EQ(named.filter->conditions.size(), 1u);
  try {
    parse_analytic("analytic(b; r o b; sum)", *ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OpNotApplicable);
  }
}

TEST(Parser, AnswerFilterWithAggregateComparand) {
  auto ctx = inv_context();
  auto f = parse_answer_filter("{Branch-1, Branch-3}[ans <= 1000 && ans > avg(ans)]", parse_node("Branch"), *ctx);
  ASSERT_TRUE(f.keys);
  EXPECT_EQ(f.keys->size(), 2u);
  ASSERT_EQ(f.conditions.size(), 2u);
  EXPECT_EQ(f.conditions[1].aggregate, "avg");
}
