#include "contextdb/parser.hpp"

#include "contextdb/database.hpp"
#include "contextdb/error.hpp"

#include <algorithm>
#include <cctype>

namespace contextdb {

namespace {

bool ident_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '$' || c == '\'' || c >= 0x80;
}

bool is_keyword(std::string_view s) { return s == "id" || s == "tau" || s == "pi" || s == "analytic"; }

bool ordered_base(std::optional<BaseType> b) {
  return b == BaseType::Integer || b == BaseType::Float || b == BaseType::Text || b == BaseType::Date;
}

bool numeric_base(std::optional<BaseType> b) { return b == BaseType::Integer || b == BaseType::Float; }

class Parser {
 public:
  Parser(std::string_view src, const Context& ctx) : src_(src), ctx_(ctx) {}

  ExprPtr expression() { return parse_pair(); }

  TraversalQueryAst traversal() {
    skip_ws();
    std::size_t save = pos_;
    std::string name = peek_ident();
    if (!name.empty() && !is_keyword(name)) {
      pos_ += name.size();
      skip_ws();
      if (peek() == '(') {
        ++pos_;
        return traversal_body(std::move(name));
      }
    }
    pos_ = save;
    ExprPtr e = parse_pair();
    std::vector<ExprPtr> members;
    if (e->kind == ExprKind::Pair) {
      members = e->children;
    } else {
      members = {e};
    }
    return make_traversal("Q", std::move(members));
  }

  AnalyticQueryAst analytic() {
    skip_ws();
    if (read_ident() != "analytic") fail("expected 'analytic('");
    expect('(');
    ExprPtr g = query_part();
    expect(';');
    ExprPtr m = query_part();
    expect(';');
    skip_ws();
    std::string op = read_ident();
    if (op.empty()) fail("expected an aggregate operation");
    std::optional<std::string> result_name;
    skip_ws();
    if (peek() == ';') {
      ++pos_;
      skip_ws();
      result_name = read_ident();
      if (result_name->empty()) fail("expected a result attribute name");
    }
    expect(')');
    AnalyticQueryAst q = make_analytic(std::move(g), std::move(m), std::move(op), ctx_);
    q.result_name = std::move(result_name);
    skip_ws();
    if (peek() == '/') {
      ++pos_;
      q.filter = answer_filter(q.grouping->target);
    }
    return q;
  }

  RestrictionSpec restriction(const NodeRef& node) { return parse_restr(node); }

  AnswerFilter answer_filter(const NodeRef& group_node) {
    AnswerFilter f;
    bool any = false;
    skip_ws();
    if (peek() == '{') {
      ++pos_;
      f.keys = literal_list(group_node, '}');
      std::sort(f.keys->begin(), f.keys->end());
      f.keys->erase(std::unique(f.keys->begin(), f.keys->end()), f.keys->end());
      any = true;
      skip_ws();
    }
    if (peek() == '[') {
      ++pos_;
      any = true;
      skip_ws();
      if (peek() != ']') {
        while (true) {
          f.conditions.push_back(answer_condition());
          skip_ws();
          if (!consume("&&")) break;
        }
      }
      expect(']');
    }
    if (!any) fail("expected '{' or '[' after '/'");
    return f;
  }

  void finish() {
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::SyntaxError, msg + " at position " + std::to_string(pos_),
                {{"position", std::to_string(pos_)}});
  }

  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  char peek_at(std::size_t k) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool consume(std::string_view tok) {
    skip_ws();
    if (src_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string peek_ident() const {
    std::size_t end = pos_;
    while (end < src_.size() && ident_char(static_cast<unsigned char>(src_[end]))) ++end;
    return std::string(src_.substr(pos_, end - pos_));
  }

  std::string read_ident() {
    std::string s = peek_ident();
    pos_ += s.size();
    return s;
  }

  // --- nodes -------------------------------------------------------------

  std::string factor(bool allow_ws) {
    if (allow_ws) skip_ws();
    std::string f = read_ident();
    if (f.empty()) fail("expected an attribute name");
    if (f != kTerminalName && !ctx_.has_attribute(f)) {
      throw Error(ErrorCode::UnknownNode, "unknown node '" + f + "'", {{"node", f}});
    }
    return f;
  }

  NodeRef node(bool allow_ws) {
    std::vector<std::string> fs{factor(allow_ws)};
    while (true) {
      if (allow_ws) skip_ws();
      if (peek() != '*') break;
      ++pos_;
      fs.push_back(factor(allow_ws));
    }
    return NodeRef::product(std::move(fs));
  }

  // --- expressions -------------------------------------------------------

  ExprPtr parse_pair() {
    std::vector<ExprPtr> members{parse_prod()};
    while (true) {
      skip_ws();
      if (peek() == '&' && peek_at(1) != '&') {
        ++pos_;
        members.push_back(parse_prod());
      } else {
        break;
      }
    }
    return make_pair(std::move(members));
  }

  ExprPtr parse_prod() {
    std::vector<ExprPtr> members{parse_comp()};
    while (true) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        members.push_back(parse_comp());
      } else {
        break;
      }
    }
    return make_product(std::move(members));
  }

  bool at_compose_op() {
    skip_ws();
    std::string w = peek_ident();
    return w == "o" || w == "\xE2\x88\x98";
  }

  ExprPtr parse_comp() {
    ExprPtr acc = parse_atom();
    while (at_compose_op()) {
      pos_ += peek_ident().size();
      acc = make_compose(acc, parse_atom());
    }
    return acc;
  }

  ExprPtr parse_atom() {
    ExprPtr e = primary();
    while (true) {
      skip_ws();
      if (peek() != '/') break;
      ++pos_;
      RestrictionSpec spec = parse_restr(e->source);
      e = make_restrict(e, std::move(spec));
    }
    return e;
  }

  ExprPtr primary() {
    skip_ws();
    if (peek() == '(') {
      ++pos_;
      ExprPtr e = parse_pair();
      expect(')');
      return e;
    }
    std::size_t start = pos_;
    std::string word = read_ident();
    if (word.empty()) fail("expected an expression");
    if (word == "id" || word == "tau") {
      skip_ws();
      if (peek() == '(') {
        ++pos_;
        NodeRef n = node(true);
        expect(')');
        return word == "id" ? make_identity(n) : make_terminal(n);
      }
    }
    if (word == "pi") {
      skip_ws();
      if (peek() == '[') {
        ++pos_;
        return projection();
      }
    }
    if (word == "o" || word == "in" || is_keyword(word)) {
      pos_ = start;
      fail("unexpected keyword '" + word + "'");
    }
    if (peek() == '@') {
      ++pos_;
      NodeRef s = node(false);
      if (peek() != '>') fail("expected '>' in qualified edge");
      ++pos_;
      NodeRef t = node(false);
      auto e = ctx_.find_edge(s, word, t);
      if (!e) {
        throw Error(ErrorCode::UnknownEdge, "unknown edge '" + word + "@" + s.name() + ">" + t.name() + "'",
                    {{"label", word}});
      }
      return make_edge(*e, true);
    }
    auto matches = ctx_.edges_labeled(word);
    if (matches.empty()) throw Error(ErrorCode::UnknownEdge, "unknown edge '" + word + "'", {{"label", word}});
    if (matches.size() > 1) resolve_edge(ctx_, word);  // throws AmbiguousEdge
    return make_edge(matches.front(), false);
  }

  ExprPtr projection() {
    std::vector<std::pair<std::string, std::optional<std::size_t>>> parts;
    while (true) {
      std::string f = factor(true);
      std::optional<std::size_t> position;
      skip_ws();
      if (peek() == ':') {
        ++pos_;
        skip_ws();
        std::size_t begin = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (begin == pos_) fail("expected a position");
        position = std::stoul(std::string(src_.substr(begin, pos_ - begin)));
      }
      parts.emplace_back(std::move(f), position);
      skip_ws();
      if (peek() != '*') break;
      ++pos_;
    }
    expect(']');
    expect('(');
    NodeRef whole = node(true);
    expect(')');
    std::vector<std::string> names;
    bool any_pos = false, all_pos = true;
    for (const auto& [n, p] : parts) {
      names.push_back(n);
      any_pos = any_pos || p.has_value();
      all_pos = all_pos && p.has_value();
    }
    NodeRef sub = NodeRef::product(names);
    if (!any_pos) return make_projection(whole, sub);
    if (!all_pos) fail("either every projection factor has a position or none does");
    std::sort(parts.begin(), parts.end());
    std::vector<std::size_t> positions;
    for (const auto& [n, p] : parts) positions.push_back(*p);
    return make_projection(whole, sub, positions);
  }

  // --- restrictions ------------------------------------------------------

  RestrictionSpec parse_restr(const NodeRef& node) {
    RestrictionSpec spec;
    bool any = false;
    skip_ws();
    if (peek() == '{') {
      ++pos_;
      spec.values = literal_list(node, '}');
      any = true;
      skip_ws();
    }
    if (peek() == '[') {
      ++pos_;
      any = true;
      skip_ws();
      if (peek() != ']') {
        while (true) {
          spec.conditions.push_back(condition(node));
          if (!consume("&&")) break;
        }
      }
      expect(']');
    }
    if (!any) fail("expected '{' or '[' after '/'");
    return spec;
  }

  std::string quoted() {
    // at opening quote
    ++pos_;
    std::string out;
    while (true) {
      if (pos_ >= src_.size()) fail("unterminated string");
      char c = src_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= src_.size()) fail("unterminated string");
        c = src_[pos_++];
      }
      out += c;
    }
    return out;
  }

  std::string bare_word() {
    std::size_t begin = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '{' || c == '}' || c == '(' ||
          c == ')' || c == '[' || c == ']' || c == '"') {
        break;
      }
      ++pos_;
    }
    if (begin == pos_) fail("expected a literal");
    return std::string(src_.substr(begin, pos_ - begin));
  }

  [[noreturn]] void bad_literal(const std::string& token, const NodeRef& node) {
    throw Error(ErrorCode::PredicateTypeError, "literal '" + token + "' is not a value of " + node.name(),
                {{"literal", token}, {"node", node.name()}});
  }

  Value set_literal(const NodeRef& node) {
    skip_ws();
    if (node.is_product()) {
      if (peek() != '(') fail("expected a tuple literal for " + node.name());
      ++pos_;
      Value::Tuple t;
      for (std::size_t i = 0; i < node.arity(); ++i) {
        if (i) expect(',');
        t.push_back(set_literal(NodeRef::simple(node.factors()[i])));
      }
      expect(')');
      return Value(std::move(t));
    }
    bool is_quoted = peek() == '"';
    std::string token = is_quoted ? quoted() : bare_word();
    auto v = coerce_literal(token, is_quoted, node, ctx_);
    if (!v) bad_literal(token, node);
    return *v;
  }

  std::vector<Value> literal_list(const NodeRef& node, char close) {
    std::vector<Value> out;
    skip_ws();
    if (peek() == close) {
      ++pos_;
      return out;
    }
    while (true) {
      out.push_back(set_literal(node));
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == close) {
        ++pos_;
        break;
      }
      fail(std::string("expected ',' or '") + close + "'");
    }
    return out;
  }

  std::optional<CmpOp> comparison() {
    skip_ws();
    if (consume("<=")) return CmpOp::Le;
    if (consume(">=")) return CmpOp::Ge;
    if (consume("!=")) return CmpOp::Ne;
    if (consume("==")) return CmpOp::Eq;
    if (consume("=")) return CmpOp::Eq;
    if (consume("<")) return CmpOp::Lt;
    if (consume(">")) return CmpOp::Gt;
    if (peek_ident() == "in") {
      pos_ += 2;
      return CmpOp::In;
    }
    return std::nullopt;
  }

  bool tuple_literal_ahead() const {
    if (peek() != '(') return false;
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = pos_; i < src_.size(); ++i) {
      char c = src_[i];
      if (in_string) {
        if (c == '\\') ++i;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '(' || c == '[' || c == '{') ++depth;
      else if (c == ')' || c == ']' || c == '}') {
        if (--depth == 0) return false;
      } else if (c == ',' && depth == 1) {
        return true;
      }
    }
    return false;
  }

  bool literal_ahead() const {
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '"') return true;
    if ((c == '-' || c == '+') && std::isdigit(static_cast<unsigned char>(peek_at(1)))) return true;
    if (src_.substr(pos_, kUnitLiteral.size()) == kUnitLiteral) return true;
    return tuple_literal_ahead();
  }

  Value predicate_literal(const NodeRef& node) {
    skip_ws();
    if (node.is_product()) return set_literal(node);
    bool is_quoted = peek() == '"';
    std::string token;
    if (is_quoted) {
      token = quoted();
    } else if (src_.substr(pos_, kUnitLiteral.size()) == kUnitLiteral) {
      pos_ += kUnitLiteral.size();
      token = std::string(kUnitLiteral);
    } else {
      std::size_t begin = pos_;
      if (peek() == '-' || peek() == '+') ++pos_;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '.' ||
             ((peek() == '-' || peek() == '+') && (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E'))) {
        ++pos_;
      }
      token = std::string(src_.substr(begin, pos_ - begin));
    }
    auto base = ctx_.node_base_type(node);
    if (!is_quoted && token != kUnitLiteral && !numeric_base(base)) bad_literal(token, node);
    if (is_quoted && numeric_base(base)) bad_literal(token, node);
    auto v = coerce_literal(token, is_quoted, node, ctx_);
    if (!v && base == BaseType::Integer) v = parse_value(token, BaseType::Float);
    if (!v) bad_literal(token, node);
    return *v;
  }

  void check_comparable(const NodeRef& a, const NodeRef& b, CmpOp op) {
    auto ba = ctx_.node_base_type(a);
    auto bb = ctx_.node_base_type(b);
    bool same = a == b || (numeric_base(ba) && numeric_base(bb)) || (ba && ba == bb);
    if (!same) {
      throw Error(ErrorCode::PredicateTypeError, "cannot compare " + a.name() + " with " + b.name(),
                  {{"left", a.name()}, {"right", b.name()}});
    }
    if (op != CmpOp::Eq && op != CmpOp::Ne && !ordered_base(ba)) {
      throw Error(ErrorCode::PredicateTypeError, "values of " + a.name() + " are not ordered", {{"node", a.name()}});
    }
  }

  Condition condition(const NodeRef& node) {
    Condition c;
    c.lhs = parse_pair();
    if (c.lhs->source != node) {
      throw Error(ErrorCode::TypeError,
                  "condition operand " + print(*c.lhs) + " starts at " + c.lhs->source.name() + ", not " + node.name(),
                  {{"expected", node.name()}, {"actual", c.lhs->source.name()}});
    }
    auto op = comparison();
    if (!op) fail("expected a comparison operator");
    c.op = *op;
    if (c.op == CmpOp::In) {
      c.rhs_spec = std::make_shared<RestrictionSpec>(parse_restr(c.lhs->target));
      return c;
    }
    skip_ws();
    if (literal_ahead()) {
      c.rhs_value = predicate_literal(c.lhs->target);
      NodeRef lit_node = c.lhs->target;
      if (c.op != CmpOp::Eq && c.op != CmpOp::Ne && !ordered_base(ctx_.node_base_type(lit_node))) {
        throw Error(ErrorCode::PredicateTypeError, "values of " + lit_node.name() + " are not ordered",
                    {{"node", lit_node.name()}});
      }
    } else {
      c.rhs_expr = parse_pair();
      check_comparable(c.lhs->target, c.rhs_expr->target, c.op);
    }
    return c;
  }

  AnswerCondition answer_condition() {
    skip_ws();
    if (read_ident() != "ans") fail("expected 'ans'");
    auto op = comparison();
    if (!op || *op == CmpOp::In) fail("expected a comparison operator");
    AnswerCondition c;
    c.op = *op;
    skip_ws();
    if (literal_ahead()) {
      if (peek() == '"') {
        std::string s = quoted();
        c.literal = is_valid_iso_date(s) ? Value(Date{s}) : Value(s);
      } else {
        std::string token = bare_word();
        auto v = parse_value(token, BaseType::Integer);
        if (!v) v = parse_value(token, BaseType::Float);
        if (!v) fail("malformed number '" + token + "'");
        c.literal = *v;
      }
      return c;
    }
    std::string agg = read_ident();
    if (agg.empty()) fail("expected a literal or an aggregate of ans");
    expect('(');
    skip_ws();
    if (read_ident() != "ans") fail("expected 'ans'");
    expect(')');
    c.aggregate = agg;
    return c;
  }

  // --- queries -----------------------------------------------------------

  TraversalQueryAst traversal_body(std::string name) {
    NodeRef key = node(true);
    std::optional<RestrictionSpec> key_restriction;
    skip_ws();
    if (peek() == '/') {
      ++pos_;
      key_restriction = parse_restr(key);
    }
    std::vector<ExprPtr> exprs;
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        break;
      }
      expect(';');
      ExprPtr e = parse_pair();
      if (e->source != key) {
        throw Error(ErrorCode::KeyMismatch,
                    "expression " + print(*e) + " starts at " + e->source.name() + " but the key is " + key.name(),
                    {{"left", key.name()}, {"right", e->source.name()}});
      }
      exprs.push_back(std::move(e));
    }
    if (exprs.empty()) fail("a query needs at least one expression");
    return make_traversal(std::move(name), std::move(exprs), std::move(key_restriction));
  }

  ExprPtr query_part() {
    skip_ws();
    std::size_t save = pos_;
    std::string name = peek_ident();
    if (!name.empty() && !is_keyword(name)) {
      pos_ += name.size();
      skip_ws();
      if (peek() == '(') {
        ++pos_;
        return as_expression(traversal_body(std::move(name)));
      }
    }
    pos_ = save;
    return parse_pair();
  }

  std::string_view src_;
  const Context& ctx_;
  std::size_t pos_ = 0;
};

}  // namespace

std::optional<Value> coerce_literal(std::string_view token, bool quoted, const NodeRef& node, const Context& ctx) {
  auto base = ctx.node_base_type(node);
  if (!base) return std::nullopt;
  if (*base == BaseType::Unit) {
    if (token == kUnitLiteral) return Value::unit();
    return std::nullopt;
  }
  (void)quoted;
  return parse_value(token, *base);
}

ExprPtr parse_expression(std::string_view text, const Context& ctx) {
  Parser p(text, ctx);
  ExprPtr e = p.expression();
  p.finish();
  return e;
}

TraversalQueryAst parse_traversal(std::string_view text, const Context& ctx) {
  Parser p(text, ctx);
  auto q = p.traversal();
  p.finish();
  return q;
}

AnalyticQueryAst parse_analytic(std::string_view text, const Context& ctx) {
  Parser p(text, ctx);
  auto q = p.analytic();
  p.finish();
  return q;
}

RestrictionSpec parse_restriction(std::string_view text, const NodeRef& node, const Context& ctx) {
  Parser p(text, ctx);
  auto s = p.restriction(node);
  p.finish();
  return s;
}

AnswerFilter parse_answer_filter(std::string_view text, const NodeRef& group_node, const Context& ctx) {
  Parser p(text, ctx);
  auto f = p.answer_filter(group_node);
  p.finish();
  return f;
}

}  // namespace contextdb
