#include <contextdb/analytic.hpp>
#include <contextdb/io.hpp>
#include <contextdb/parser.hpp>
#include <contextdb/proposals.hpp>
#include <contextdb/relational.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace contextdb;

namespace {

std::string fixture(const std::string& name) { return std::string(CONTEXTDB_FIXTURE_DIR) + "/" + name; }

struct Invoices {
  std::shared_ptr<const Context> ctx = load_context(fixture("inv.ctx"));
  std::shared_ptr<const DatabaseInstance> small = load_database(fixture("inv7.db"), ctx);
};

const Invoices& invoices() {
  static Invoices inv;
  return inv;
}

std::string label(const char* prefix, std::size_t i) { return prefix + std::to_string(i); }

// n invoices over 64 branches in 4 regions and 128 products from 8
// categories and 16 suppliers.
DatabaseInstance scaled(std::size_t n) {
  std::mt19937_64 rng(n);
  DatabaseBuilder b(invoices().ctx);
  for (std::size_t i = 0; i < 4; ++i) b.value("Region", label("R", i));
  for (std::size_t i = 0; i < 64; ++i) b.value("Branch", label("B", i)).pair("r", label("B", i), label("R", i % 4));
  for (std::size_t i = 0; i < 8; ++i) b.value("Cat", label("C", i));
  for (std::size_t i = 0; i < 16; ++i) b.value("Sup", label("S", i)).pair("h", label("S", i), label("R", i % 4));
  for (std::size_t i = 0; i < 128; ++i) {
    b.value("Prod", label("P", i)).pair("c", label("P", i), label("C", i % 8)).pair("s", label("P", i), label("S", i % 16));
  }
  for (std::size_t c = 0; c < 8; ++c) {
    for (std::size_t s = 0; s < 16; ++s) {
      double price = 1.0 + static_cast<double>((c * 16 + s) % 37) / 4;
      b.value("Unitprice", price).pair("u", Value::tuple({Value(label("C", c)), Value(label("S", s))}), price);
    }
  }
  std::uniform_int_distribution<std::size_t> branch(0, 63), prod(0, 127), day(10, 28);
  std::uniform_int_distribution<int> qty(1, 500);
  for (std::size_t i = 0; i < n; ++i) {
    Value inv(static_cast<std::int64_t>(i));
    Value date(Date{"2023-02-" + std::to_string(day(rng))});
    Value q(qty(rng));
    b.value("Inv", inv).value("Date", date).value("Qty", q);
    b.pair("d", inv, date).pair("b", inv, label("B", branch(rng))).pair("p", inv, label("P", prod(rng))).pair("q", inv, q);
  }
  return b.build();
}

void BM_BranchTotals(benchmark::State& state) {
  const auto& inv = invoices();
  auto q = parse_analytic("analytic(b; q; sum)", *inv.ctx);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_analytic(q, *inv.small));
}
BENCHMARK(BM_BranchTotals);

void BM_RegionTotalsDirect(benchmark::State& state) {
  DatabaseInstance db = scaled(static_cast<std::size_t>(state.range(0)));
  auto q = parse_analytic("analytic(r o b; q; sum)", *invoices().ctx);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_analytic(q, db));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RegionTotalsDirect)->Arg(1 << 10)->Arg(1 << 16);

void BM_RegionTotalsNested(benchmark::State& state) {
  DatabaseInstance db = scaled(static_cast<std::size_t>(state.range(0)));
  auto plan = rewrite_composition(parse_analytic("analytic(r o b; q; sum)", *invoices().ctx));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_plan(plan, db));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RegionTotalsNested)->Arg(1 << 10)->Arg(1 << 16);

void BM_RestrictedPairing(benchmark::State& state) {
  DatabaseInstance db = scaled(static_cast<std::size_t>(state.range(0)));
  auto e = parse_expression("u o ((c o p) & (s o p))/[q > 0]", *invoices().ctx);
  for (auto _ : state) benchmark::DoNotOptimize(eval(e, db));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RestrictedPairing)->Arg(1 << 10)->Arg(1 << 16);

void BM_Proposals(benchmark::State& state) {
  const auto& inv = invoices();
  std::vector<NodeRef> targets{NodeRef::simple("Region"), NodeRef::simple("Cat")};
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_proposals(*inv.ctx, targets));
}
BENCHMARK(BM_Proposals);

void BM_EmitSql(benchmark::State& state) {
  const auto& inv = invoices();
  BackingMap backing = parse_backing(read_file(fixture("star.backing.json")));
  auto q = parse_analytic("analytic(r o b; q/[d >= \"2023-01-07\"]; sum)", *inv.ctx);
  for (auto _ : state) benchmark::DoNotOptimize(emit_sql(q, backing));
}
BENCHMARK(BM_EmitSql);

}  // namespace

BENCHMARK_MAIN();
