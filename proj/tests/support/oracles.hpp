#pragma once

#include <map>
#include <string>
#include <vector>

#include "fql/path.hpp"
#include "fql/rewrite.hpp"
#include "fql/signature.hpp"

namespace fql::testing {

// Reference decision procedure for path equality, sharing no code with the
// completion-based one in the library.  It enumerates every path of length
// at most `bound` and connects two paths whenever one equation application
// turns one into the other; equality is then connectivity.  Sound always;
// complete only for derivations whose intermediate paths stay within the
// bound, so callers pick `bound` with slack over the lengths they compare.
class PathCongruence {
 public:
  PathCongruence(const Graph& g, const std::vector<PathEquation>& eqs,
                 int bound, std::size_t max_paths = 200000);

  // False when the universe would have exceeded max_paths; all queries on
  // an overflowed instance throw.
  bool complete_universe() const { return complete_; }
  std::size_t path_count() const { return paths_.size(); }

  bool contains(const Path& p) const;
  bool same(const Path& p, const Path& q) const;

  // Number of equivalence classes of paths from a to b within the bound.
  // Only meaningful when every class has a representative shorter than the
  // bound by a safe margin (finite categories, generous bound).
  int class_count(const std::string& from, const std::string& to) const;

 private:
  int index_of(const Path& p) const;
  int find(int i) const;
  void unite(int a, int b);

  std::vector<Path> paths_;
  std::vector<std::string> ends_;
  std::map<std::string, int> index_;
  mutable std::vector<int> parent_;
  bool complete_ = true;
};

// Outcome of holding a completed rewrite system against the bounded
// closure on every parallel pair of paths of length at most max_len.
struct WordCheck {
  bool usable = false;      // universe fit and every rule was certified
  bool ok = false;          // no sound disagreement surfaced
  long long agreed = 0;     // pairs where both sides gave the same verdict
  long long certified = 0;  // engine-equal pairs beyond the closure horizon
  std::string message;      // what went wrong when !ok
};

// The closure is sound but bounded, so the comparison is asymmetric.  A
// pair the closure proves equal that the engine calls different refutes
// the engine (ok = false).  A pair the engine proves equal that the
// closure cannot reach is accepted only after certifying every rewrite
// rule of the system against the closure: sound rules make every
// engine-equal verdict a chain of certified steps.  When the universe
// overflows or some rule resists certification the system is unusable for
// this comparison and the caller should sample another one.
WordCheck check_word_problem(const Graph& g,
                             const std::vector<PathEquation>& eqs,
                             const RewriteSystem& rs, int max_len, int bound,
                             std::size_t max_paths = 200000);

}  // namespace fql::testing
