#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fql {

// Row identifiers are opaque strings. Every instance keeps them globally
// unique across all of its node tables, which is what lets a disjoint union
// be computed as a plain union.
using Id = std::string;

enum class BaseType { String, Nat, Int };

std::string to_string(BaseType t);

// Attribute cell. Nat and Int are distinct alternatives on purpose: a Nat 5
// and an Int 5 never compare equal.
using Value = std::variant<std::string, std::uint64_t, std::int64_t>;

BaseType type_of(const Value& v);
std::string render_value(const Value& v);

struct FqlError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParallelityError : FqlError {
  using FqlError::FqlError;
};
struct IncompleteSystemError : FqlError {
  using FqlError::FqlError;
};
struct SignatureError : FqlError {
  using FqlError::FqlError;
};
struct MorphismError : FqlError {
  using FqlError::FqlError;
};
struct FinitenessUnknownError : FqlError {
  using FqlError::FqlError;
};
// Raised instead of materializing a limit whose indexing category could not
// be enumerated within fuel — the result might be infinite.
struct InfiniteTargetError : FinitenessUnknownError {
  using FinitenessUnknownError::FinitenessUnknownError;
};
struct NotOpFibrationError : FqlError {
  using FqlError::FqlError;
};
struct NotSigmaReadyError : FqlError {
  using FqlError::FqlError;
};
struct NotPiReadyError : FqlError {
  using FqlError::FqlError;
};
struct UnknownIdError : FqlError {
  using FqlError::FqlError;
};
struct InstanceError : FqlError {
  using FqlError::FqlError;
};
struct QueryError : FqlError {
  using FqlError::FqlError;
};
struct BudgetExceededError : FqlError {
  using FqlError::FqlError;
};
struct UnknownTableError : FqlError {
  using FqlError::FqlError;
};
struct ArityMismatchError : FqlError {
  using FqlError::FqlError;
};
struct NotPointedError : FqlError {
  using FqlError::FqlError;
};
struct ParseError : FqlError {
  ParseError(const std::string& msg, int line, int col);
  int line;
  int col;
};

// Bound on iterative procedures whose termination is not guaranteed in
// general (completion rounds, saturation levels). Exhausting fuel is always
// reported, never silently truncated.
constexpr int kDefaultFuel = 1000;

struct Violation {
  std::string kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> items;

  bool ok() const { return items.empty(); }
  void add(std::string kind, std::string message);
  std::string to_string() const;
};

// Deterministic supply of fresh row IDs. The default style is a counter
// ("k0", "k1", ...) so reruns with the same seed produce identical output;
// the Random style draws 64-bit hex names from a seeded generator instead.
class KeyGen {
 public:
  enum class Style { Counter, Random };

  explicit KeyGen(std::uint64_t seed = 0, Style style = Style::Counter);

  Id fresh();

 private:
  Style style_;
  std::uint64_t counter_;
  std::mt19937_64 rng_;
};

// Mints identifier-shaped names, keeping them unique within one scope.
// Used when a construction has to invent node/edge/attribute names out of
// structured data (pairs, triples, rows).
class NameMint {
 public:
  static std::string sanitize(const std::string& raw);

  std::string mint(const std::string& base);
  std::string mint_joined(const std::vector<std::string>& parts);

 private:
  std::vector<std::string> taken_;
};

}  // namespace fql
