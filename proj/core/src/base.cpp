#include "fql/base.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace fql {

std::string to_string(BaseType t) {
  switch (t) {
    case BaseType::String:
      return "String";
    case BaseType::Nat:
      return "Nat";
    case BaseType::Int:
      return "Int";
  }
  return "?";
}

BaseType type_of(const Value& v) {
  if (std::holds_alternative<std::string>(v)) return BaseType::String;
  if (std::holds_alternative<std::uint64_t>(v)) return BaseType::Nat;
  return BaseType::Int;
}

std::string render_value(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* n = std::get_if<std::uint64_t>(&v)) return std::to_string(*n);
  return std::to_string(std::get<std::int64_t>(v));
}

ParseError::ParseError(const std::string& msg, int line, int col)
    : FqlError(msg + " (line " + std::to_string(line) + ", column " +
               std::to_string(col) + ")"),
      line(line),
      col(col) {}

void ValidationReport::add(std::string kind, std::string message) {
  items.push_back({std::move(kind), std::move(message)});
}

std::string ValidationReport::to_string() const {
  if (items.empty()) return "ok";
  std::ostringstream out;
  for (const auto& v : items) {
    out << v.kind << ": " << v.message << "\n";
  }
  return out.str();
}

KeyGen::KeyGen(std::uint64_t seed, Style style)
    : style_(style), counter_(style == Style::Counter ? seed : 0), rng_(seed) {}

Id KeyGen::fresh() {
  if (style_ == Style::Counter) {
    return "k" + std::to_string(counter_++);
  }
  static const char* hex = "0123456789abcdef";
  std::uint64_t bits = rng_();
  std::string out = "r";
  for (int i = 15; i >= 0; --i) {
    out.push_back(hex[(bits >> (4 * i)) & 0xf]);
  }
  return out;
}

std::string NameMint::sanitize(const std::string& raw) {
  std::string out;
  for (char c : raw) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      out.push_back(c);
    } else {
      out.push_back('_');
    }
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) {
    out.insert(out.begin(), 'n');
  }
  return out;
}

std::string NameMint::mint(const std::string& base) {
  std::string clean = sanitize(base);
  std::string candidate = clean;
  int suffix = 2;
  while (std::find(taken_.begin(), taken_.end(), candidate) != taken_.end()) {
    candidate = clean + "_" + std::to_string(suffix++);
  }
  taken_.push_back(candidate);
  return candidate;
}

std::string NameMint::mint_joined(const std::vector<std::string>& parts) {
  std::string base;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) base += "__";
    base += sanitize(parts[i]);
  }
  return mint(base);
}

}  // namespace fql
