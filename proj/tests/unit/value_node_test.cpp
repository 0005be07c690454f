#include <contextdb/error.hpp>
#include <contextdb/node.hpp>
#include <contextdb/value.hpp>

#include <gtest/gtest.h>

using namespace contextdb;

TEST(Value, DisplayForms) {
  EXPECT_EQ(to_string(Value(42)), "42");
  EXPECT_EQ(to_string(Value(10.5)), "10.5");
  EXPECT_EQ(to_string(Value("North")), "North");
  EXPECT_EQ(to_string(Value(Date{"2023-01-05"})), "2023-01-05");
  EXPECT_EQ(to_string(Value::unit()), std::string(kUnitLiteral));
  EXPECT_EQ(to_string(Value::tuple({Value("C1"), Value("S1")})), "(C1, S1)");
}

TEST(Value, ParseByBaseType) {
  EXPECT_EQ(parse_value("17", BaseType::Integer), Value(17));
  EXPECT_FALSE(parse_value("1.5", BaseType::Integer));
  EXPECT_EQ(parse_value("1.5", BaseType::Float), Value(1.5));
  EXPECT_EQ(parse_value("2023-02-28", BaseType::Date), Value(Date{"2023-02-28"}));
  EXPECT_FALSE(parse_value("2023-02-30", BaseType::Date));
  EXPECT_FALSE(parse_value("2023-2-3", BaseType::Date));
  EXPECT_EQ(parse_value("abc", BaseType::Text), Value("abc"));
}

TEST(Value, LeapYears) {
  EXPECT_TRUE(is_valid_iso_date("2024-02-29"));
  EXPECT_FALSE(is_valid_iso_date("2023-02-29"));
  EXPECT_TRUE(is_valid_iso_date("2000-02-29"));
  EXPECT_FALSE(is_valid_iso_date("1900-02-29"));
}

TEST(Value, CompareAcrossNumericKinds) {
  auto c = compare_values(Value(2), Value(2.0));
  ASSERT_TRUE(c);
  EXPECT_TRUE(*c == 0);
  EXPECT_TRUE(*compare_values(Value(1), Value(1.5)) < 0);
  EXPECT_FALSE(compare_values(Value(1), Value("1")));
  EXPECT_TRUE(*compare_values(Value(Date{"2023-01-01"}), Value(Date{"2023-01-02"})) < 0);
}

TEST(Value, StorageOrderIsTotal) {
  EXPECT_NE(Value(1), Value(1.0));
  EXPECT_TRUE(Value(1) < Value(2));
  EXPECT_TRUE(Value("a") < Value("b"));
}

TEST(Value, Conformance) {
  EXPECT_TRUE(conforms(Value(1), BaseType::Integer));
  EXPECT_FALSE(conforms(Value("x"), BaseType::Integer));
  EXPECT_TRUE(conforms(Value::unit(), BaseType::Unit));
}

TEST(Value, HashMatchesEquality) {
  EXPECT_EQ(Value(3).hash(), Value(3).hash());
  EXPECT_EQ(Value::tuple({Value(1), Value("a")}).hash(), Value::tuple({Value(1), Value("a")}).hash());
}

TEST(Node, ProductsAreCanonical) {
  EXPECT_EQ(parse_node("Sup*Cat"), parse_node("Cat*Sup"));
  EXPECT_EQ(parse_node("Cat*Sup").name(), "Cat*Sup");
  auto nested = NodeRef::product_of({parse_node("B*A"), NodeRef::simple("C")});
  EXPECT_EQ(nested.name(), "A*B*C");
  EXPECT_TRUE(NodeRef::terminal().is_terminal());
}

TEST(Node, RepeatedFactorsAndPositions) {
  NodeRef rr = NodeRef::product({"Region", "Region"});
  EXPECT_TRUE(rr.has_repeated_factor());
  EXPECT_EQ(rr.arity(), 2u);
  auto pos = NodeRef::simple("Region").positions_in(rr);
  EXPECT_EQ(pos, (std::vector<std::size_t>{0}));
  EXPECT_TRUE(parse_node("A*C").is_sub_product_of(parse_node("A*B*C")));
  EXPECT_FALSE(parse_node("A*D").is_sub_product_of(parse_node("A*B*C")));
}

TEST(Node, SyntaxErrors) {
  EXPECT_THROW(parse_node("A**B"), Error);
  EXPECT_THROW(parse_node(""), Error);
}

TEST(Node, Identifiers) {
  EXPECT_TRUE(is_identifier("Unit_price"));
  EXPECT_TRUE(is_identifier("q'"));
  EXPECT_FALSE(is_identifier("1abc"));
  EXPECT_FALSE(is_identifier("a b"));
}

TEST(Node, ProductLayoutMergesParts) {
  std::vector<NodeRef> parts{NodeRef::simple("Sup"), NodeRef::simple("Cat")};
  auto layout = product_layout(parts);
  ASSERT_EQ(layout.size(), 2u);
  EXPECT_EQ(layout[0].part, 1u);  // Cat sorts first
  EXPECT_EQ(layout[1].part, 0u);
}
