#include "contextdb/node.hpp"

#include "contextdb/error.hpp"

#include <algorithm>
#include <tuple>

namespace contextdb {

NodeRef::NodeRef(std::vector<std::string> factors) : factors_(std::move(factors)) {
  std::sort(factors_.begin(), factors_.end());
}

NodeRef NodeRef::product_of(std::span<const NodeRef> parts) {
  std::vector<std::string> all;
  for (const auto& p : parts) all.insert(all.end(), p.factors_.begin(), p.factors_.end());
  return NodeRef(std::move(all));
}

bool NodeRef::has_repeated_factor() const noexcept {
  return std::adjacent_find(factors_.begin(), factors_.end()) != factors_.end();
}

std::string NodeRef::name() const {
  std::string out;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) out += '*';
    out += factors_[i];
  }
  return out;
}

bool NodeRef::is_sub_product_of(const NodeRef& whole) const {
  return std::includes(whole.factors_.begin(), whole.factors_.end(), factors_.begin(),
                       factors_.end());
}

std::vector<std::size_t> NodeRef::positions_in(const NodeRef& whole) const {
  std::vector<std::size_t> out;
  std::size_t j = 0;
  for (const auto& f : factors_) {
    while (j < whole.factors_.size() && whole.factors_[j] != f) ++j;
    if (j == whole.factors_.size()) {
      throw Error(ErrorCode::TypeError, name() + " is not a sub-product of " + whole.name());
    }
    out.push_back(j++);
  }
  return out;
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto ok = [](unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '$' || c == '\'' || c >= 0x80;
  };
  if (text.front() >= '0' && text.front() <= '9') return false;
  for (unsigned char c : text) {
    if (!ok(c)) return false;
  }
  return true;
}

NodeRef parse_node(std::string_view text) {
  std::vector<std::string> factors;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find('*', start);
    auto piece = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
    while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
    if (piece.empty()) throw Error(ErrorCode::SyntaxError, "empty factor in node '" + std::string(text) + "'");
    factors.emplace_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return NodeRef::product(std::move(factors));
}

std::vector<LayoutSlot> product_layout(std::span<const NodeRef> parts) {
  std::vector<std::tuple<std::string, std::size_t, std::size_t>> keyed;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto& fs = parts[p].factors();
    for (std::size_t f = 0; f < fs.size(); ++f) keyed.emplace_back(fs[f], p, f);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<LayoutSlot> out;
  out.reserve(keyed.size());
  for (const auto& [name, p, f] : keyed) out.push_back({p, f});
  return out;
}

}  // namespace contextdb
