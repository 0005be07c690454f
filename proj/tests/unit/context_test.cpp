#include "fixtures.hpp"

#include <contextdb/context.hpp>
#include <contextdb/error.hpp>

#include <gtest/gtest.h>

using namespace contextdb;
using contextdb::testkit::inv_context;

TEST(Context, InvoiceContextIsValid) {
  auto ctx = inv_context();
  EXPECT_TRUE(validate_context(*ctx).ok());
  auto roots = ctx->roots();
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_EQ(roots[0].name(), "Inv");
  EXPECT_TRUE(ctx->has_node(NodeRef::terminal()));
  EXPECT_TRUE(ctx->has_node(parse_node("Cat*Sup")));
}

TEST(Context, SynthesizedEdges) {
  auto ctx = inv_context();
  auto inv = NodeRef::simple("Inv");
  EXPECT_EQ(ctx->identity_edge(inv).kind, EdgeKind::Identity);
  EXPECT_EQ(ctx->terminal_edge(inv).target, NodeRef::terminal());
  auto proj = ctx->projection_edges(parse_node("Cat*Sup"));
  ASSERT_EQ(proj.size(), 2u);
  EXPECT_EQ(proj[0].target.name(), "Cat");
  EXPECT_EQ(proj[1].target.name(), "Sup");
  EXPECT_EQ(ctx->outgoing(inv).size(), 4u);
}

TEST(Context, QualifiedNames) {
  auto ctx = inv_context();
  auto e = ctx->edges_labeled("r");
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].qualified_name(), "r@Branch>Region");
}

TEST(Context, DetectsCycleAndMultipleRoots) {
  ContextBuilder b;
  b.attribute("A", BaseType::Text).attribute("B", BaseType::Text).attribute("C", BaseType::Text);
  b.edge("A", "f", "B").edge("B", "g", "A").edge("C", "k", "A");
  auto report = validate_context(b.build());
  EXPECT_GE(report.count("cycle"), 1u);

  ContextBuilder m;
  m.attribute("A", BaseType::Text).attribute("B", BaseType::Text).attribute("C", BaseType::Text);
  m.edge("A", "f", "C").edge("B", "g", "C");
  EXPECT_GE(validate_context(m.build()).count("multiple-roots"), 1u);
}

TEST(Context, DetectsStructuralViolations) {
  ContextBuilder b;
  b.attribute("A", BaseType::Text).attribute("B", BaseType::Text).attribute("Iso", BaseType::Text);
  b.edge("A", "f", "B").edge("A", "f", "B").edge("T", "t", "A");
  auto report = validate_context(b.build());
  EXPECT_GE(report.count("duplicate-edge"), 1u);
  EXPECT_GE(report.count("terminal-source"), 1u);
  EXPECT_GE(report.count("isolated-node"), 1u);
}

TEST(Context, UnknownAttributeReported) {
  ContextBuilder b;
  b.attribute("A", BaseType::Text);
  b.edge("A", "f", "Missing");
  EXPECT_GE(validate_context(b.build()).count("unknown-attribute"), 1u);
}

TEST(Context, CoalesceCyclesKeepsLeastMember) {
  ContextBuilder b;
  b.attribute("K", BaseType::Integer).attribute("Price", BaseType::Float).attribute("EuroPrice", BaseType::Float);
  b.edge("K", "p", "Price").edge("Price", "toEuro", "EuroPrice").edge("EuroPrice", "toDollar", "Price");
  Context c = coalesce_cycles(b.build());
  EXPECT_TRUE(validate_context(c).ok());
  ASSERT_EQ(c.classes().size(), 1u);
  EXPECT_EQ(c.classes().begin()->first, "EuroPrice");
  EXPECT_EQ(c.representative("Price"), "EuroPrice");
  EXPECT_EQ(c.edges().size(), 1u);
  EXPECT_EQ(c.edges()[0].target.name(), "EuroPrice");
}

TEST(Context, JoinUnderProductRoot) {
  ContextBuilder a;
  a.attribute("Emp", BaseType::Text).attribute("Dept", BaseType::Text).edge("Emp", "w", "Dept");
  ContextBuilder b;
  b.attribute("Proj", BaseType::Text).attribute("Budget", BaseType::Integer).edge("Proj", "bud", "Budget");
  Context j = join_contexts(a.build(), b.build());
  auto roots = j.roots();
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_EQ(roots[0].name(), "Emp*Proj");
  EXPECT_TRUE(validate_context(j).ok());
}

TEST(Context, JoinWithSameRootIsUnion) {
  ContextBuilder a;
  a.attribute("K", BaseType::Integer).attribute("A", BaseType::Text).edge("K", "f", "A");
  ContextBuilder b;
  b.attribute("K", BaseType::Integer).attribute("B", BaseType::Text).edge("K", "g", "B");
  Context j = join_contexts(a.build(), b.build());
  ASSERT_EQ(j.roots().size(), 1u);
  EXPECT_EQ(j.roots()[0].name(), "K");
  EXPECT_EQ(j.edges().size(), 2u);
}

TEST(Context, ProductRootNotAddedWhenReachable) {
  auto ctx = inv_context();
  for (const auto& r : ctx->roots()) EXPECT_NE(r.name(), "Cat*Sup");
}
