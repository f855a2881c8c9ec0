#pragma once

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "fql/path.hpp"

namespace fql {

using PathEquation = std::pair<Path, Path>;

// Oriented rule: lhs rewrites to rhs, and lhs is strictly greater in
// shortlex order, so every application shrinks the path.
struct RewriteRule {
  Path lhs;
  Path rhs;
};

enum class CompletionStatus { Complete, Incomplete };

// A path rewriting system obtained by Knuth-Bendix completion of a set of
// path equations over a fixed graph. When status is Complete the system is
// terminating and locally confluent, so normal forms are canonical
// representatives and the word problem is decided by normalization.
struct RewriteSystem {
  std::shared_ptr<const Graph> graph;
  std::vector<RewriteRule> rules;
  CompletionStatus status = CompletionStatus::Complete;
  int rounds_used = 0;

  // Matching acceleration, filled in by complete(): rule positions grouped
  // by the first edge of their lhs, and the longest lhs length.
  std::map<std::string, std::vector<int>> first_edge_index;
  size_t longest_lhs = 0;
};

// Runs completion. Equations must relate parallel valid paths (throws
// ParallelityError / SignatureError otherwise). Never fails to orient:
// distinct parallel paths are always shortlex comparable. Fuel bounds the
// number of critical-pair rounds and, proportionally, the total rewriting
// work, so diverging completions stop quickly; exhausting either bound
// yields status Incomplete.
RewriteSystem complete(std::shared_ptr<const Graph> graph,
                       const std::vector<PathEquation>& equations,
                       int fuel = kDefaultFuel);

// Reduces p to its unique normal form. Requires a Complete system.
Path normalize(const Path& p, const RewriteSystem& rs);

// True when no rule applies anywhere in p.
bool is_irreducible(const Path& p, const RewriteSystem& rs);

// Decides whether two parallel paths present the same morphism. Throws
// ParallelityError if the paths are not parallel, IncompleteSystemError if
// the system is not Complete.
bool equivalent(const Path& p, const Path& q, const RewriteSystem& rs);

}  // namespace fql
