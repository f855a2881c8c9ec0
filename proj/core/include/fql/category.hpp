#pragma once

#include <optional>
#include <vector>

#include "fql/signature.hpp"

namespace fql {

// The category a signature presents, enumerated explicitly: one morphism
// per irreducible path, with a precomputed composition table. Only
// constructible when enumeration terminates; see saturate below.
class FiniteCategory {
 public:
  SigPtr sig() const { return sig_; }
  size_t size() const { return reps_.size(); }

  const Path& rep(int m) const { return reps_[m]; }
  const std::string& src_of(int m) const { return reps_[m].start; }
  const std::string& tgt_of(int m) const { return tgts_[m]; }
  bool is_identity(int m) const { return reps_[m].trivial(); }

  int identity(const std::string& node) const;

  // Morphism presented by a path, via normalization. Throws SignatureError
  // for paths outside the graph.
  int morphism_of(const Path& p) const;

  // f then g; g must start where f ends.
  int compose(int f, int g) const;

  const std::vector<int>& from(const std::string& node) const;
  std::vector<int> hom(const std::string& src, const std::string& tgt) const;

  // Exhaustive associativity and identity check, for tests.
  bool well_formed() const;

  friend std::optional<FiniteCategory> saturate(SigPtr sig, int fuel,
                                                size_t max_morphisms);

 private:
  SigPtr sig_;
  std::vector<Path> reps_;
  std::vector<std::string> tgts_;
  std::map<std::string, int> by_key_;
  std::map<std::string, int> identity_;
  std::map<std::string, std::vector<int>> from_;
  std::vector<std::vector<int>> comp_;
};

// Enumerates irreducible paths breadth-first by length. A length level with
// no irreducible paths proves there are none longer, so the enumeration is
// exact when it stops. Returns nullopt ("don't know") when fuel levels or
// the morphism cap are exhausted first; throws IncompleteSystemError when
// the signature's rewrite system is not Complete, since irreducibility
// would be meaningless then.
std::optional<FiniteCategory> saturate(SigPtr sig, int fuel = kDefaultFuel,
                                       size_t max_morphisms = 100000);

// No directed cycle through the edges (self-loops included). Acyclic
// signatures always have finite denotations.
bool is_acyclic(const TypedSignature& sig);

}  // namespace fql
