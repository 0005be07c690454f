#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace contextdb {

/// Base domain of a simple attribute.
enum class BaseType { Integer, Float, Text, Date, Unit };

std::string_view to_string(BaseType type);
std::optional<BaseType> parse_base_type(std::string_view name);

/// The single element of dom(T). Serialized as "⊤".
struct Unit {
  friend constexpr bool operator==(Unit, Unit) noexcept { return true; }
  friend constexpr std::strong_ordering operator<=>(Unit, Unit) noexcept {
    return std::strong_ordering::equal;
  }
};

inline constexpr std::string_view kUnitLiteral = "\xE2\x8A\xA4";  // ⊤

/// ISO-8601 calendar date (YYYY-MM-DD); ordered lexicographically.
struct Date {
  std::string iso;
  friend bool operator==(const Date&, const Date&) = default;
  friend std::strong_ordering operator<=>(const Date& a, const Date& b) {
    return a.iso.compare(b.iso) <=> 0;
  }
};

bool is_valid_iso_date(std::string_view text);

/// A database value. Product values are tuples aligned to the canonical
/// (sorted) factor order of the node they belong to.
class Value {
 public:
  enum class Kind : std::uint8_t { Unit, Integer, Float, Text, Date, Tuple };
  using Tuple = std::vector<Value>;

  Value() : data_(Unit{}) {}
  Value(Unit u) : data_(u) {}
  Value(std::int64_t v) : data_(v) {}
  Value(int v) : data_(static_cast<std::int64_t>(v)) {}
  Value(double v) : data_(v) {}
  Value(std::string v) : data_(std::move(v)) {}
  Value(const char* v) : data_(std::string(v)) {}
  Value(Date d) : data_(std::move(d)) {}
  Value(Tuple t) : data_(std::move(t)) {}

  static Value unit() { return Value(Unit{}); }
  static Value tuple(Tuple t) { return Value(std::move(t)); }

  Kind kind() const noexcept { return static_cast<Kind>(data_.index()); }
  bool is_unit() const noexcept { return kind() == Kind::Unit; }
  bool is_integer() const noexcept { return kind() == Kind::Integer; }
  bool is_float() const noexcept { return kind() == Kind::Float; }
  bool is_numeric() const noexcept { return is_integer() || is_float(); }
  bool is_text() const noexcept { return kind() == Kind::Text; }
  bool is_date() const noexcept { return kind() == Kind::Date; }
  bool is_tuple() const noexcept { return kind() == Kind::Tuple; }

  std::int64_t as_integer() const { return std::get<std::int64_t>(data_); }
  double as_float() const { return std::get<double>(data_); }
  /// Integer or float widened to double.
  double as_number() const;
  const std::string& as_text() const { return std::get<std::string>(data_); }
  const Date& as_date() const { return std::get<Date>(data_); }
  const Tuple& as_tuple() const { return std::get<Tuple>(data_); }

  /// Total order used for storage: kind first, then value. Not a numeric
  /// comparison across integer/float; use compare_values for predicates.
  friend bool operator==(const Value& a, const Value& b) { return a.data_ == b.data_; }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

  std::size_t hash() const noexcept;

 private:
  std::variant<Unit, std::int64_t, double, std::string, Date, Tuple> data_;
};

/// Display form: integers in decimal, floats shortest round-trip, text raw,
/// dates ISO, unit as ⊤, tuples as "(a, b)".
std::string to_string(const Value& v);

bool conforms(const Value& v, BaseType type);

/// Parses `text` as a value of the given base type; nullopt when malformed.
std::optional<Value> parse_value(std::string_view text, BaseType type);

/// Ordered comparison for restriction predicates. Integers and floats compare
/// numerically; text/date/unit only against the same kind. Returns nullopt
/// when the values are incomparable.
std::optional<std::partial_ordering> compare_values(const Value& a, const Value& b);

}  // namespace contextdb

template <>
struct std::hash<contextdb::Value> {
  std::size_t operator()(const contextdb::Value& v) const noexcept { return v.hash(); }
};
