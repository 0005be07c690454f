#include "contextdb/value.hpp"

#include "contextdb/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace contextdb {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownEdge: return "UnknownEdge";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::AmbiguousEdge: return "AmbiguousEdge";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::KeyMismatch: return "KeyMismatch";
    case ErrorCode::OpNotApplicable: return "OpNotApplicable";
    case ErrorCode::NotTreeQuery: return "NotTreeQuery";
    case ErrorCode::NotAssociative: return "NotAssociative";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::PredicateTypeError: return "PredicateTypeError";
    case ErrorCode::EqualityViolation: return "EqualityViolation";
    case ErrorCode::NotRefined: return "NotRefined";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::KeyViolation: return "KeyViolation";
    case ErrorCode::UnbackedEdge: return "UnbackedEdge";
    case ErrorCode::UnsupportedForSql: return "UnsupportedForSql";
    case ErrorCode::NoMatch: return "NoMatch";
    case ErrorCode::RootCollision: return "RootCollision";
    case ErrorCode::NoCandidateKey: return "NoCandidateKey";
    case ErrorCode::ViewError: return "ViewError";
    case ErrorCode::DomainConflict: return "DomainConflict";
    case ErrorCode::EvalError: return "EvalError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(BaseType type) {
  switch (type) {
    case BaseType::Integer: return "integer";
    case BaseType::Float: return "float";
    case BaseType::Text: return "text";
    case BaseType::Date: return "date";
    case BaseType::Unit: return "unit";
  }
  return "unit";
}

std::optional<BaseType> parse_base_type(std::string_view name) {
  if (name == "integer") return BaseType::Integer;
  if (name == "float") return BaseType::Float;
  if (name == "text") return BaseType::Text;
  if (name == "date") return BaseType::Date;
  if (name == "unit") return BaseType::Unit;
  return std::nullopt;
}

bool is_valid_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  int year = std::atoi(std::string(s.substr(0, 4)).c_str());
  int month = (s[5] - '0') * 10 + (s[6] - '0');
  int day = (s[8] - '0') * 10 + (s[9] - '0');
  if (month < 1 || month > 12 || day < 1) return false;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  int limit = kDays[month - 1] + (month == 2 && leap ? 1 : 0);
  return day <= limit;
}

double Value::as_number() const {
  if (is_integer()) return static_cast<double>(as_integer());
  return as_float();
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.data_.index() != b.data_.index()) return a.data_.index() <=> b.data_.index();
  switch (a.kind()) {
    case Value::Kind::Unit: return std::strong_ordering::equal;
    case Value::Kind::Integer: return a.as_integer() <=> b.as_integer();
    case Value::Kind::Float: {
      // Storage order only; NaN never enters a database.
      double x = a.as_float(), y = b.as_float();
      if (x < y) return std::strong_ordering::less;
      if (y < x) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    }
    case Value::Kind::Text: return a.as_text().compare(b.as_text()) <=> 0;
    case Value::Kind::Date: return a.as_date() <=> b.as_date();
    case Value::Kind::Tuple: {
      const auto& x = a.as_tuple();
      const auto& y = b.as_tuple();
      for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        auto c = x[i] <=> y[i];
        if (c != 0) return c;
      }
      return x.size() <=> y.size();
    }
  }
  return std::strong_ordering::equal;
}

std::size_t Value::hash() const noexcept {
  std::size_t seed = data_.index() * 0x9e3779b97f4a7c15ULL;
  auto mix = [&seed](std::size_t h) { seed ^= h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2); };
  switch (kind()) {
    case Kind::Unit: break;
    case Kind::Integer: mix(std::hash<std::int64_t>{}(as_integer())); break;
    case Kind::Float: mix(std::hash<double>{}(as_float())); break;
    case Kind::Text: mix(std::hash<std::string>{}(as_text())); break;
    case Kind::Date: mix(std::hash<std::string>{}(as_date().iso)); break;
    case Kind::Tuple:
      for (const auto& v : as_tuple()) mix(v.hash());
      break;
  }
  return seed;
}

namespace {

std::string format_double(double d) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

}  // namespace

std::string to_string(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Unit: return std::string(kUnitLiteral);
    case Value::Kind::Integer: return std::to_string(v.as_integer());
    case Value::Kind::Float: return format_double(v.as_float());
    case Value::Kind::Text: return v.as_text();
    case Value::Kind::Date: return v.as_date().iso;
    case Value::Kind::Tuple: {
      std::string out = "(";
      bool first = true;
      for (const auto& c : v.as_tuple()) {
        if (!first) out += ", ";
        first = false;
        out += to_string(c);
      }
      return out + ")";
    }
  }
  return {};
}

bool conforms(const Value& v, BaseType type) {
  switch (type) {
    case BaseType::Integer: return v.is_integer();
    case BaseType::Float: return v.is_float();
    case BaseType::Text: return v.is_text();
    case BaseType::Date: return v.is_date() && is_valid_iso_date(v.as_date().iso);
    case BaseType::Unit: return v.is_unit();
  }
  return false;
}

std::optional<Value> parse_value(std::string_view text, BaseType type) {
  switch (type) {
    case BaseType::Integer: {
      std::int64_t out = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
      if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
      return Value(out);
    }
    case BaseType::Float: {
      double out = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
      if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(out)) {
        return std::nullopt;
      }
      return Value(out);
    }
    case BaseType::Text: return Value(std::string(text));
    case BaseType::Date:
      if (!is_valid_iso_date(text)) return std::nullopt;
      return Value(Date{std::string(text)});
    case BaseType::Unit:
      if (text != kUnitLiteral) return std::nullopt;
      return Value::unit();
  }
  return std::nullopt;
}

std::optional<std::partial_ordering> compare_values(const Value& a, const Value& b) {
  if (a.is_numeric() && b.is_numeric()) {
    if (a.is_integer() && b.is_integer()) return a.as_integer() <=> b.as_integer();
    return a.as_number() <=> b.as_number();
  }
  if (a.kind() != b.kind()) return std::nullopt;
  if (a.is_tuple()) {
    const auto& x = a.as_tuple();
    const auto& y = b.as_tuple();
    if (x.size() != y.size()) return std::nullopt;
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto c = compare_values(x[i], y[i]);
      if (!c) return std::nullopt;
      if (*c != 0) return c;
    }
    return std::partial_ordering::equivalent;
  }
  return a <=> b;
}

}  // namespace contextdb
