// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures, so ctest fails when any criterion does.

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sql_oracle.hpp"

#include <cli.hpp>
#include <service.hpp>

#include <contextdb/analytic.hpp>
#include <contextdb/constraints.hpp>
#include <contextdb/error.hpp>
#include <contextdb/io.hpp>
#include <contextdb/parser.hpp>
#include <contextdb/proposals.hpp>
#include <contextdb/random_db.hpp>
#include <contextdb/rewrite.hpp>
#include <contextdb/table_io.hpp>

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

using namespace contextdb;
using namespace contextdb::testkit;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kFloatTol = 1e-9;
constexpr std::size_t kTrials = 100;

struct Failure {
  std::string why;
};

void require(bool ok, const std::string& why) {
  if (!ok) throw Failure{why};
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool same_answers(const std::map<Value, Value>& a, const std::map<Value, Value>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it == b.end() || !numerically_equal(v, it->second, tol)) return false;
  }
  return true;
}

std::string dump(const std::map<Value, Value>& m) {
  std::string out = "{";
  for (const auto& [k, v] : m) out += (out.size() > 1 ? ", " : "") + to_string(k) + "->" + to_string(v);
  return out + "}";
}

RandomDbOptions db_options(std::mt19937_64& rng) {
  RandomDbOptions o;
  o.min_size = 1;
  o.max_size = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
  return o;
}

// --- Fig. 6 -----------------------------------------------------------------

std::string figure6() {
  auto q = parse_analytic("analytic(b; q; sum)", *inv_context());
  auto db = inv7();
  auto t0 = Clock::now();
  AnalyticAnswer a = evaluate_analytic(q, *db);
  double ms = ms_since(t0);
  std::map<Value, Value> want{{"Branch-1", 300}, {"Branch-2", 600}, {"Branch-3", 600}};
  require(a.values == want, "got " + dump(a.values));
  for (const auto& [k, v] : a.values) require(v.is_integer(), "non-integer total " + to_string(v));
  require(ms < 10.0, "took " + std::to_string(ms) + " ms");
  return "exact; " + std::to_string(ms) + " ms (limit 10 ms)";
}

// --- identity / terminal ----------------------------------------------------

std::string idioms() {
  auto ctx = inv_context();
  auto db = inv7();
  auto by_id = evaluate_analytic(parse_analytic("analytic(id(Inv); q; sum)", *ctx), *db);
  require(by_id.values == eval(parse_expression("q", *ctx), *db).function.map, "(id, q, sum) != q");
  auto count = evaluate_analytic(parse_analytic("analytic(tau(Inv); id(Inv); count)", *ctx), *db);
  require(count.values == std::map<Value, Value>{{Value::unit(), 7}}, "(tau, id, count) = " + dump(count.values));
  auto total = evaluate_analytic(parse_analytic("analytic(tau(Inv); q; sum)", *ctx), *db);
  require(total.values == std::map<Value, Value>{{Value::unit(), 1500}}, "(tau, q, sum) = " + dump(total.values));
  return "exact";
}

// --- composition rule ---------------------------------------------------------

std::string composition_rule() {
  std::mt19937_64 rng(20240101);
  auto t0 = Clock::now();
  std::size_t comparisons = 0;
  for (std::size_t trial = 0; trial < kTrials; ++trial) {
    std::size_t depth = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    bool floats = trial % 2 == 1;
    ChainFixture f = random_chain(rng, depth, 1, floats);
    DatabaseInstance db = random_database(f.ctx, rng, db_options(rng));
    for (const std::string op : {"sum", "count", "min", "max"}) {
      for (std::size_t k = 1; k <= depth; ++k) {
        AnalyticQueryAst q = make_analytic(f.chain_prefix(k), f.measure, op, *f.ctx);
        auto direct = evaluate_analytic(q, db).values;
        auto one_step = evaluate_plan(rewrite_composition(q), db).values;
        auto unfolded = evaluate_plan(unfold_composition(q), db).values;
        auto oracle = group_by(eval(q.grouping, db).function.map, eval(q.measuring, db).function.map, op);
        double tol = floats ? kFloatTol : 0.0;
        require(same_answers(direct, oracle, tol), "direct vs oracle, trial " + std::to_string(trial) + " " + op);
        require(same_answers(direct, one_step, tol), "direct vs nested, trial " + std::to_string(trial) + " " + op);
        require(same_answers(direct, unfolded, tol), "direct vs unfolded, trial " + std::to_string(trial) + " " + op);
        ++comparisons;
      }
    }
  }
  double s = ms_since(t0) / 1000.0;
  require(s < 30.0, "took " + std::to_string(s) + " s");
  return std::to_string(kTrials) + " databases, " + std::to_string(comparisons) + " queries; " + std::to_string(s) +
         " s (limit 30 s)";
}

// --- pairing rule ---------------------------------------------------------------

std::string pairing_rule() {
  std::mt19937_64 rng(777);
  std::size_t comparisons = 0;
  for (std::size_t trial = 0; trial < kTrials; ++trial) {
    std::size_t depth = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    std::size_t side = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    bool floats = trial % 2 == 0;
    ChainFixture f = random_chain(rng, depth, side, floats);
    DatabaseInstance db = random_database(f.ctx, rng, db_options(rng));
    std::size_t i = std::uniform_int_distribution<std::size_t>(1, depth)(rng);
    std::size_t j = std::uniform_int_distribution<std::size_t>(1, side)(rng);
    std::vector<ExprPtr> members{f.chain_prefix(i), f.side_prefix(j)};
    for (const std::string op : {"sum", "count", "min", "max"}) {
      AnalyticQueryAst paired = make_analytic(make_pair(members), f.measure, op, *f.ctx);
      for (std::size_t c = 0; c < members.size(); ++c) {
        AnalyticQueryAst single = make_analytic(members[c], f.measure, op, *f.ctx);
        auto direct = evaluate_analytic(single, db).values;
        auto via = evaluate_plan(rewrite_pairing(c, paired), db).values;
        require(same_answers(direct, via, floats ? kFloatTol : 0.0),
                "trial " + std::to_string(trial) + " " + op + " component " + std::to_string(c));
        ++comparisons;
      }
    }
  }
  return std::to_string(kTrials) + " databases, " + std::to_string(comparisons) + " queries";
}

// --- avg ------------------------------------------------------------------------

std::string avg_counterexample() {
  ContextBuilder b;
  b.attribute("K", BaseType::Integer).attribute("G", BaseType::Text).attribute("M", BaseType::Integer);
  b.edge("K", "g", "G").edge("K", "m", "M");
  auto ctx = std::make_shared<const Context>(b.build());
  DatabaseBuilder d(ctx);
  for (int k = 1; k <= 5; ++k) {
    d.value("K", k).value("M", k).pair("m", k, k);
    d.value("G", k <= 2 ? "a" : "b").pair("g", k, k <= 2 ? "a" : "b");
  }
  DatabaseInstance db = d.build();

  AnalyticQueryAst overall = parse_analytic("analytic(tau(K); m; avg)", *ctx);
  Value direct = evaluate_analytic(overall, db).values.at(Value::unit());
  require(direct == Value(3.0), "avg(1..5) = " + to_string(direct));

  // Nesting by hand: avg over the per-group averages {1.5, 4}.
  AnalyticPlan inner;
  inner.kind = AnalyticPlan::Kind::Base;
  inner.grouping = parse_expression("g", *ctx);
  inner.measuring = parse_expression("m", *ctx);
  inner.op = "avg";
  AnalyticPlan nested;
  nested.kind = AnalyticPlan::Kind::Nested;
  nested.grouping = parse_expression("tau(G)", *ctx);
  nested.inner = std::make_shared<const AnalyticPlan>(inner);
  nested.op = "avg";
  Value wrong = evaluate_plan(nested, db).values.at(Value::unit());
  require(wrong == Value(2.75), "nested avg = " + to_string(wrong));

  AnalyticQueryAst composed = make_analytic(make_compose(parse_expression("tau(G)", *ctx), parse_expression("g", *ctx)),
                                            parse_expression("m", *ctx), "avg", *ctx);
  try {
    rewrite_composition(composed);
    throw Failure{"composition rewrite accepted avg"};
  } catch (const Error& e) {
    require(e.code() == ErrorCode::NotAssociative, std::string("wrong error ") + std::string(to_string(e.code())));
  }
  return "avg = 3, nested = 2.75, rewrite refused";
}

// --- rewrite soundness --------------------------------------------------------

std::string rewrite_soundness() {
  auto ctx = inv_context();
  struct Case {
    RewriteRule rule;
    std::string expr;
    ExprPath at;
  };
  std::vector<Case> cases{
      {RewriteRule::associative(Assoc::Left), "h o (s o p)", {}},
      {RewriteRule::associative(Assoc::Right), "(h o s) o p", {}},
      {RewriteRule::associative(Assoc::Left), "h o (s o (p/[q > 150]))", {}},
      {RewriteRule::distributive(), "(c & s) o p", {}},
      {RewriteRule::distributive(), "u o ((c & s) o p)", {1}},
      {RewriteRule::grouping(), "(c o p) & (s o p)", {}},
      {RewriteRule::grouping(), "u o ((c o p) & (s o p))", {1}},
      {RewriteRule::restriction_propagation(), "(r/{North}) o (b/[q > 150])", {}},
      {RewriteRule::restriction_propagation(), "((c o p)/[q < 300]) & (s o (p/[d >= \"2023-01-07\"]))", {}},
  };
  std::mt19937_64 rng(4242);
  std::map<std::string, std::size_t> per_rule;
  for (const auto& c : cases) {
    ExprPtr before = parse_expression(c.expr, *ctx);
    ExprPtr after = apply_rule(c.rule, before, c.at);
    require(!equal(before, after), c.rule.name() + " left " + c.expr + " unchanged");
    RandomDbOptions opts;
    collect_literals(*before, opts.pools);
    for (std::size_t t = 0; t < kTrials; ++t) {
      DatabaseInstance db = random_database(ctx, rng, opts);
      require(eval(before, db).function.map == eval(after, db).function.map,
              c.rule.name() + " changed the value of " + c.expr);
    }
    per_rule[c.rule.kind == RuleKind::Associative ? "associative" : c.rule.name()] += kTrials;
  }
  std::string summary;
  for (const auto& [rule, n] : per_rule) summary += (summary.empty() ? "" : ", ") + rule + " " + std::to_string(n);
  for (const auto& [rule, n] : per_rule) require(n >= kTrials, rule + " ran " + std::to_string(n));
  require(per_rule.size() == 4, "not every rule was exercised");
  return summary + " databases";
}

// --- restriction pushing ------------------------------------------------------

RestrictionSpec random_spec(std::mt19937_64& rng, const NodeRef& node, const DatabaseInstance& db) {
  const ValueSet& ext = db.extent(node.attribute());
  std::vector<Value> pick;
  std::bernoulli_distribution keep(0.6);
  for (const auto& v : ext) {
    if (keep(rng)) pick.push_back(v);
  }
  RestrictionSpec spec = value_spec(pick);
  if (node.attribute() == "Inv" && std::bernoulli_distribution(0.5)(rng)) {
    int bound = std::uniform_int_distribution<int>(-5, 5)(rng);
    spec = conjoin(spec, parse_restriction("[q >= " + std::to_string(bound) + "]", node, db.context()));
  }
  return spec;
}

ExprPtr random_restricted_path(std::mt19937_64& rng, const DatabaseInstance& db) {
  static const std::vector<std::vector<std::string>> paths{{"b", "r"}, {"p", "s", "h"}, {"p", "c"}, {"q"}, {"d"}};
  const auto& path = paths[std::uniform_int_distribution<std::size_t>(0, paths.size() - 1)(rng)];
  std::bernoulli_distribution restrict(0.5);
  ExprPtr cur;
  for (const auto& label : path) {
    ExprPtr step = make_edge(resolve_edge(db.context(), label));
    if (restrict(rng)) step = make_restrict(step, random_spec(rng, step->source, db));
    cur = cur ? make_compose(step, cur) : step;
  }
  if (restrict(rng)) cur = make_restrict(cur, random_spec(rng, cur->source, db));
  return cur;
}

std::string restriction_pushing() {
  auto ctx = inv_context();
  std::mt19937_64 rng(99);
  std::size_t nontrivial = 0;
  for (std::size_t t = 0; t < kTrials; ++t) {
    DatabaseInstance db = random_database(ctx, rng, db_options(rng));
    ExprPtr e = random_restricted_path(rng, db);
    if (std::bernoulli_distribution(0.3)(rng)) e = make_pair({e, random_restricted_path(rng, db)});
    ExprPtr pushed = push_restrictions(e);
    ExprPtr core = pushed->kind == ExprKind::Restrict ? pushed->children[0] : pushed;
    require(!has_restriction(*core), "restriction left inside " + print(pushed));
    auto want = eval(e, db).function.map;
    require(eval(pushed, db).function.map == want, "value changed for " + print(e));
    if (want.size() < db.extent("Inv").size()) ++nontrivial;
  }

  // (g/T) o (f/S) is defined exactly on W = S ∩ f^-1(T).
  for (std::size_t t = 0; t < kTrials; ++t) {
    DatabaseInstance db = random_database(ctx, rng, db_options(rng));
    const FiniteFunction& f = *db.function(resolve_edge(*ctx, "b"));
    RestrictionSpec s = random_spec(rng, NodeRef::simple("Inv"), db);
    RestrictionSpec tspec = random_spec(rng, NodeRef::simple("Branch"), db);
    ExprPtr e = make_compose(make_restrict(parse_expression("r", *ctx), tspec),
                             make_restrict(parse_expression("b", *ctx), s));
    ValueSet S = restriction_carrier(s, NodeRef::simple("Inv"), db);
    ValueSet T = restriction_carrier(tspec, NodeRef::simple("Branch"), db);
    ValueSet W;
    for (const auto& x : preimage(f, T)) {
      if (S.contains(x)) W.insert(x);
    }
    require(eval(e, db).function.domain() == W, "carrier differs from S ∩ f^-1(T)");
    require(eval(push_restrictions(e), db).function.domain() == W, "pushed carrier differs from S ∩ f^-1(T)");
  }
  return std::to_string(kTrials) + " random expressions (" + std::to_string(nontrivial) + " with proper carriers), " +
         std::to_string(kTrials) + " two-step checks";
}

// --- projection of pairings / distribution ---------------------------------------

std::string lemmas_1_5() {
  auto ctx = inv_context();
  std::mt19937_64 rng(5150);
  ExprPtr cp = parse_expression("c o p", *ctx);
  ExprPtr sp = parse_expression("s o p", *ctx);
  ExprPtr pairing = make_pair({cp, sp});
  NodeRef cs = parse_node("Cat*Sup");
  ExprPtr pi_cat = make_compose(make_projection(cs, NodeRef::simple("Cat")), pairing);
  ExprPtr pi_sup = make_compose(make_projection(cs, NodeRef::simple("Sup")), pairing);
  ExprPtr grouped = parse_expression("(c & s) o p", *ctx);
  ExprPtr rr = parse_expression("(r o b) & (h o s o p)", *ctx);
  ExprPtr first = make_compose(make_projection(rr->target, NodeRef::simple("Region"), std::vector<std::size_t>{0}), rr);
  ExprPtr second = make_compose(make_projection(rr->target, NodeRef::simple("Region"), std::vector<std::size_t>{1}), rr);
  for (std::size_t t = 0; t < kTrials; ++t) {
    DatabaseInstance db = random_database(ctx, rng, db_options(rng));
    require(eval(pi_cat, db).function.map == eval(cp, db).function.map, "pi[Cat] o (c o p & s o p) != c o p");
    require(eval(pi_sup, db).function.map == eval(sp, db).function.map, "pi[Sup] o (c o p & s o p) != s o p");
    require(eval(first, db).function.map == eval(parse_expression("r o b", *ctx), db).function.map,
            "first projection of the Region pair");
    require(eval(second, db).function.map == eval(parse_expression("h o s o p", *ctx), db).function.map,
            "second projection of the Region pair");
    require(eval(grouped, db).function.map == eval(pairing, db).function.map, "(c & s) o p != (c o p) & (s o p)");
  }
  for (std::size_t t = 0; t < kTrials; ++t) {
    ChainFixture f = random_chain(rng, 2, 2, false);
    DatabaseInstance db = random_database(f.ctx, rng, db_options(rng));
    ExprPtr p = make_pair({f.chain_prefix(2), f.side_prefix(2)});
    for (std::size_t k = 0; k < 2; ++k) {
      ExprPtr member = k == 0 ? f.chain_prefix(2) : f.side_prefix(2);
      ExprPtr proj = make_compose(make_projection(p->target, member->target), p);
      require(eval(proj, db).function.map == eval(member, db).function.map, "projection on a random chain");
    }
  }
  return std::to_string(2 * kTrials) + " databases";
}

// --- refinement lemma ------------------------------------------------------------

std::string refinement_lemma() {
  std::mt19937_64 rng(31337);
  std::size_t refined = 0, unrefined = 0, perturbed = 0;
  for (std::size_t t = 0; t < 4 * kTrials; ++t) {
    std::size_t nx = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    std::size_t ny = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    std::size_t nz = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    FiniteFunction f{NodeRef::simple("X"), NodeRef::simple("Y"), {}};
    FiniteFunction g{NodeRef::simple("X"), NodeRef::simple("Z"), {}};
    std::uniform_int_distribution<int> y(0, static_cast<int>(ny) - 1), z(0, static_cast<int>(nz) - 1);
    bool make_refined = t % 2 == 0;
    std::map<Value, Value> h0;
    for (int v = 0; v < static_cast<int>(ny); ++v) h0[Value("y" + std::to_string(v))] = Value(z(rng));
    for (std::size_t x = 0; x < nx; ++x) {
      Value fx("y" + std::to_string(y(rng)));
      f.map[Value(static_cast<int>(x))] = fx;
      g.map[Value(static_cast<int>(x))] = make_refined ? h0.at(fx) : Value(z(rng));
    }
    auto oracle = search_factorization(f.map, g.map);
    bool engine = check_refinement(f, g).satisfied;
    require(engine == oracle.has_value(), "refinement verdict disagrees with exhaustive search, trial " + std::to_string(t));
    if (!engine) {
      ++unrefined;
      try {
        refinement_witness(f, g);
        throw Failure{"witness built for an unrefined pair"};
      } catch (const Error& e) {
        require(e.code() == ErrorCode::NotRefined, "wrong error for unrefined pair");
      }
      continue;
    }
    ++refined;
    FiniteFunction h = refinement_witness(f, g);
    require(h.map == *oracle, "witness differs from the searched factorization");
    for (const auto& [x, fx] : f.map) require(h.at(fx) && *h.at(fx) == g.map.at(x), "h o f != g");
    // Changing h at any point of range(f) breaks h o f = g.
    auto it = h.map.begin();
    std::advance(it, std::uniform_int_distribution<std::size_t>(0, h.map.size() - 1)(rng));
    FiniteFunction bad = h;
    bad.map[it->first] = Value(it->second.as_integer() + 1000);
    bool still_equal = true;
    for (const auto& [x, fx] : f.map) still_equal = still_equal && *bad.at(fx) == g.map.at(x);
    require(!still_equal, "perturbed witness still factors g");
    ++perturbed;
  }
  require(refined >= kTrials && unrefined > 0, "too few refined cases: " + std::to_string(refined));
  return std::to_string(refined) + " refined, " + std::to_string(unrefined) + " unrefined, " + std::to_string(perturbed) +
         " perturbed witnesses rejected";
}

// --- relational round trip --------------------------------------------------------

std::string relational_round_trip() {
  auto ctx = inv_context();
  Table table = parse_csv(read_file(fixture_path("invoices.csv")), "R");
  Ingested part = ingest_relation(table, "Inv", {{"Date", "d"}, {"Branch", "b"}, {"Prod", "p"}, {"Qty", "q"}}, *ctx);
  DatabaseInstance db = assemble_database(ctx, {part});
  ExprPtr pairing = parse_expression("d & b & p & q", *ctx);
  FiniteFunction r = eval(pairing, db).function;
  const auto& factors = r.target_node.factors();
  std::set<std::vector<std::string>> got;
  for (const auto& [inv, tuple] : r.map) {
    std::vector<std::string> row(table.columns.size());
    row[table.column_index("Inv")] = to_string(inv);
    for (std::size_t i = 0; i < factors.size(); ++i) row[table.column_index(factors[i])] = to_string(tuple.as_tuple()[i]);
    got.insert(row);
  }
  std::set<std::vector<std::string>> want(table.rows.begin(), table.rows.end());
  require(got == want, "recovered " + std::to_string(got.size()) + " rows, expected " + std::to_string(want.size()));
  return std::to_string(got.size()) + " rows recovered exactly";
}

// --- key dependencies ----------------------------------------------------------------

std::string fd_satisfaction() {
  auto ctx = inv_context();
  std::map<std::string, std::vector<std::string>> by_target{
      {"Date", {"d"}},         {"Branch", {"b"}},        {"Prod", {"p"}},
      {"Qty", {"q"}},          {"Region", {"r o b", "h o s o p"}},
      {"Cat", {"c o p"}},      {"Sup", {"s o p"}},      {"Unitprice", {"u o ((c o p) & (s o p))"}}};
  std::mt19937_64 rng(1234);
  std::size_t checked = 0;
  for (std::size_t t = 0; t < kTrials; ++t) {
    DatabaseInstance db = random_database(ctx, rng, db_options(rng));
    std::vector<ExprPtr> exprs;
    for (const auto& [target, options] : by_target) {
      if (!std::bernoulli_distribution(0.5)(rng)) continue;
      const auto& pick = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
      exprs.push_back(parse_expression(pick, *ctx));
    }
    if (exprs.empty()) exprs.push_back(parse_expression("q", *ctx));
    std::optional<RestrictionSpec> key_restriction;
    if (std::bernoulli_distribution(0.3)(rng)) key_restriction = random_spec(rng, NodeRef::simple("Inv"), db);
    TraversalQueryAst q = make_traversal("Q", exprs, key_restriction);
    require(is_tree(q), "generated query is not a tree: " + print(q));
    Relation r = induced_relation(q, db, RelationMode::Alias);
    require(check_key_dependencies(r).empty(), "key dependency violated by " + print(q));
    std::set<Value> keys;
    for (const auto& row : r.rows) keys.insert(row.front());
    require(keys.size() == r.rows.size(), "duplicate keys in " + print(q));
    ++checked;
  }
  for (std::size_t t = 0; t < kTrials; ++t) {
    ChainFixture f = random_chain(rng, 3, 2, t % 2 == 0);
    DatabaseInstance db = random_database(f.ctx, rng, db_options(rng));
    TraversalQueryAst q = make_traversal("Q", {f.chain_prefix(3), f.side_prefix(2), f.measure});
    Relation r = induced_relation(q, db, RelationMode::Alias);
    require(check_key_dependencies(r).empty(), "key dependency violated on a random chain");
    ++checked;
  }
  return std::to_string(checked) + " random tree queries";
}

// --- SQL ---------------------------------------------------------------------------------

std::string sql_equivalence() {
  auto ctx = inv_context();
  BackingMap backing = parse_backing(read_file(fixture_path("star.backing.json")));
  std::map<std::string, Table> tables{{"R", parse_csv(read_file(fixture_path("invoices.csv")), "R")},
                                      {"R1", parse_csv(read_file(fixture_path("regions.csv")), "R1")}};
  std::vector<std::pair<std::string, std::string>> cases{{"analytic(b; q; sum)", "b_q_sum.sql"},
                                                         {"analytic(r o b; q; sum)", "rb_q_sum.sql"}};
  for (const auto& [text, golden] : cases) {
    AnalyticQueryAst q = parse_analytic(text, *ctx);
    std::string sql = emit_sql(q, backing);
    require(sql == read_file(golden_path(golden)), "SQL for " + text + " differs from " + golden + ": " + sql);
    SqlResult rows = run_sql(sql, tables);
    auto engine = evaluate_analytic(q, *inv7()).values;
    require(rows.size() == engine.size(), "group count differs for " + text);
    for (const auto& [k, v] : engine) {
      auto it = rows.find({to_string(k)});
      require(it != rows.end() && it->second == v, "group " + to_string(k) + " differs for " + text);
    }
  }
  return "2 queries, golden text byte-identical";
}

// --- proposals --------------------------------------------------------------------------

std::string proposal_completeness() {
  auto ctx = inv_context();
  auto props = enumerate_proposals(*ctx, {NodeRef::simple("Region")});
  auto it = std::find_if(props.begin(), props.end(), [](const Proposal& p) { return p.key.name() == "Inv"; });
  require(it != props.end(), "no proposal under Inv");
  std::set<std::string> got;
  for (const auto& e : it->expressions[0]) got.insert(print(e));
  std::set<std::string> oracle;
  for (const auto& path : dfs_paths(*ctx, NodeRef::simple("Inv"), NodeRef::simple("Region"), 16)) {
    std::string text;
    for (auto l = path.rbegin(); l != path.rend(); ++l) text += (text.empty() ? "" : " o ") + *l;
    oracle.insert(text);
  }
  std::set<std::string> want{"r o b", "h o s o p"};
  require(oracle == want, "DFS oracle found a different path set");
  require(got == want, "proposals under Inv differ");
  require(it->expressions[0].size() == 2, "duplicate expressions");
  return "{r o b, h o s o p}";
}

// --- service / CLI without a UI --------------------------------------------------------

std::string no_ui_suite() {
  tools::Snapshot snap{inv_context(), inv7(), parse_backing(read_file(fixture_path("star.backing.json")))};
  tools::Service service(snap);
  const std::string request = R"j({"g": "r o b", "m": "q", "op": "sum"})j";
  tools::Response direct = service.handle("POST", "/analytic", request);
  auto body = nlohmann::json::parse(direct.body);
  require(direct.status == 200, "service status " + std::to_string(direct.status));
  require(body["table"]["rows"] == nlohmann::json::parse(R"j([["North", 300], ["South", 1200]])j"),
          "service rows " + body["table"]["rows"].dump());

  tools::HttpServer server(service);
  int port = server.bind("127.0.0.1", 0);
  require(port > 0, "could not bind");
  std::thread loop([&] { server.listen(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  auto res = client.Post("/analytic", request, "application/json");
  server.stop();
  loop.join();
  require(res && res->status == 200 && res->body == direct.body, "HTTP response differs from the handler");

  std::ostringstream out, err;
  int code = tools::run_cli({"analytic", fixture_path("inv.ctx"), fixture_path("inv7.db"), "r o b", "q", "sum", "--json"},
                            out, err);
  require(code == 0 && out.str() == direct.body + "\n", "CLI JSON differs from the handler");
  return "handler, HTTP and CLI agree";
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
      {"figure-6 branch totals", figure6},
      {"identity and terminal idioms", idioms},
      {"composition rule", composition_rule},
      {"pairing rule", pairing_rule},
      {"avg counterexample", avg_counterexample},
      {"rewrite soundness", rewrite_soundness},
      {"restriction pushing", restriction_pushing},
      {"pairing projection and distribution", lemmas_1_5},
      {"refinement witness", refinement_lemma},
      {"relational round trip", relational_round_trip},
      {"key dependencies of tree queries", fd_satisfaction},
      {"sql oracle and golden text", sql_equivalence},
      {"proposal completeness", proposal_completeness},
      {"service and cli without ui", no_ui_suite},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    try {
      std::string note = check();
      std::cout << "PASS " << name << ": " << note << "\n";
    } catch (const Failure& f) {
      ++failures;
      std::cout << "FAIL " << name << ": " << f.why << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL " << name << ": exception: " << e.what() << "\n";
    }
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
  return failures;
}
