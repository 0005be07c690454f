#include "contextdb/constraints.hpp"

#include "contextdb/error.hpp"
#include "contextdb/parser.hpp"

namespace contextdb {

EqualityVerdict check_equality(const ExprPtr& lhs, const ExprPtr& rhs, const DatabaseInstance& db) {
  if (lhs->source != rhs->source || lhs->target != rhs->target) {
    throw Error(ErrorCode::TypeError, print(*lhs) + " and " + print(*rhs) + " are not parallel",
                {{"left", lhs->target.name()}, {"right", rhs->target.name()}});
  }
  Evaluator ev(db);
  EqualityVerdict out;
  for (const auto& x : db.enumerate(lhs->source)) {
    auto a = ev.apply(*lhs, x);
    auto b = ev.apply(*rhs, x);
    if (!a || !b) continue;
    if (*a != *b) {
      out.satisfied = false;
      out.witnesses.push_back(x);
    }
  }
  return out;
}

RefinementVerdict check_refinement(const FiniteFunction& f, const FiniteFunction& g) {
  std::map<Value, std::vector<Value>> blocks;
  for (const auto& [x, y] : f.map) {
    if (g.at(x)) blocks[y].push_back(x);
  }
  RefinementVerdict out;
  for (const auto& [y, members] : blocks) {
    const Value& image = *g.at(members.front());
    for (const auto& x : members) {
      if (*g.at(x) != image) {
        out.satisfied = false;
        out.straddles.push_back({ValueSet(members.begin(), members.end()), members.front(), x});
        break;
      }
    }
  }
  return out;
}

RefinementVerdict check_refinement(const ExprPtr& lhs, const ExprPtr& rhs, const DatabaseInstance& db) {
  if (lhs->source != rhs->source) {
    throw Error(ErrorCode::KeyMismatch, print(*lhs) + " and " + print(*rhs) + " start at different nodes",
                {{"left", lhs->source.name()}, {"right", rhs->source.name()}});
  }
  return check_refinement(eval(lhs, db).function, eval(rhs, db).function);
}

FiniteFunction refinement_witness(const FiniteFunction& f, const FiniteFunction& g) {
  auto verdict = check_refinement(f, g);
  if (!verdict.satisfied) {
    const auto& s = verdict.straddles.front();
    throw Error(ErrorCode::NotRefined, "the partition of the first function does not refine the second",
                {{"witness", to_string(s.first)}, {"witness", to_string(s.second)}});
  }
  FiniteFunction h{f.target_node, g.target_node, {}};
  for (const auto& [x, y] : f.map) {
    if (const Value* z = g.at(x)) h.map.emplace(y, *z);
  }
  return h;
}

ValidationReport check_all(const DatabaseInstance& db) {
  ValidationReport report;
  const Context& ctx = db.context();
  for (const auto& c : ctx.constraints()) {
    const bool eq = c.kind == ConstraintDecl::Kind::Equality;
    const std::string label = c.lhs + (eq ? " = " : " <= ") + c.rhs;
    try {
      ExprPtr lhs = parse_expression(c.lhs, ctx);
      ExprPtr rhs = parse_expression(c.rhs, ctx);
      if (eq) {
        auto v = check_equality(lhs, rhs, db);
        if (!v.satisfied) {
          std::vector<std::string> elements{label};
          for (const auto& w : v.witnesses) elements.push_back(to_string(w));
          report.add("equality-violated", std::move(elements),
                     "equality " + label + " fails at " + std::to_string(v.witnesses.size()) + " key(s)");
        }
      } else {
        auto v = check_refinement(lhs, rhs, db);
        if (!v.satisfied) {
          std::vector<std::string> elements{label};
          for (const auto& s : v.straddles) {
            elements.push_back(to_string(s.first));
            elements.push_back(to_string(s.second));
          }
          report.add("refinement-violated", std::move(elements), "refinement " + label + " fails");
        }
      }
    } catch (const Error& e) {
      report.add("constraint-invalid", {label, std::string(to_string(e.code()))}, e.what());
    }
  }
  return report;
}

}  // namespace contextdb
