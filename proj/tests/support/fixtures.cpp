#include "fixtures.hpp"

#include <contextdb/io.hpp>
#include <contextdb/parser.hpp>

namespace contextdb::testkit {

std::string fixture_path(const std::string& name) { return std::string(CONTEXTDB_FIXTURE_DIR) + "/" + name; }
std::string golden_path(const std::string& name) { return std::string(CONTEXTDB_GOLDEN_DIR) + "/" + name; }

std::shared_ptr<const Context> inv_context() {
  static auto ctx = load_context(fixture_path("inv.ctx"));
  return ctx;
}

std::shared_ptr<const DatabaseInstance> inv7() {
  static auto db = load_database(fixture_path("inv7.db"), inv_context());
  return db;
}

ExprPtr expr(const std::string& text, const Context& ctx) { return parse_expression(text, ctx); }

namespace {

ExprPtr compose_prefix(const std::vector<ExprPtr>& edges, std::size_t k) {
  std::vector<ExprPtr> outer_first(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(k));
  std::reverse(outer_first.begin(), outer_first.end());
  return make_compose_chain(outer_first);
}

}  // namespace

ExprPtr ChainFixture::chain_prefix(std::size_t k) const { return compose_prefix(chain, k); }
ExprPtr ChainFixture::side_prefix(std::size_t k) const { return compose_prefix(side, k); }

ChainFixture random_chain(std::mt19937_64& rng, std::size_t depth, std::size_t side_depth, bool float_measure) {
  std::bernoulli_distribution coin(0.5);
  ContextBuilder b;
  b.attribute("K", BaseType::Integer);
  b.attribute("M", float_measure ? BaseType::Float : BaseType::Integer);
  b.edge("K", "m", "M");
  auto add_chain = [&](const std::string& prefix, std::size_t n) {
    std::string prev = "K";
    for (std::size_t i = 1; i <= n; ++i) {
      std::string node = prefix + std::to_string(i);
      b.attribute(node, coin(rng) ? BaseType::Text : BaseType::Integer);
      std::string label = prefix;
      label[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(label[0])));
      b.edge(prev, label + std::to_string(i), node);
      prev = node;
    }
  };
  add_chain("A", depth);
  add_chain("B", side_depth);
  ChainFixture f;
  f.ctx = std::make_shared<const Context>(b.build());
  f.float_measure = float_measure;
  for (std::size_t i = 1; i <= depth; ++i) f.chain.push_back(parse_expression("a" + std::to_string(i), *f.ctx));
  for (std::size_t i = 1; i <= side_depth; ++i) f.side.push_back(parse_expression("b" + std::to_string(i), *f.ctx));
  f.measure = parse_expression("m", *f.ctx);
  return f;
}

}  // namespace contextdb::testkit
