#pragma once

#include <optional>

#include "fql/instance.hpp"

namespace fql::testing {

// Number of structure maps I -> J: one function per node, commuting with
// every edge action and preserving every attribute value.  Counted by
// backtracking over row assignments, one edge-connected component of I's
// rows at a time (counts multiply across components); both instances must
// share the same signature object and be small.
long long count_structure_maps(const Instance& I, const Instance& J);

// Same count, refusing with nullopt when the search would exceed the given
// number of candidate checks.  For property tests that resample oversized
// cases instead of stalling on them.
std::optional<long long> count_structure_maps_capped(const Instance& I,
                                                     const Instance& J,
                                                     long long step_limit);

// True when some bijective structure map exists; for functors into tables a
// row-wise bijective map is automatically invertible, so this is
// isomorphism by exhaustion — the reference answer for fql::isomorphic.
bool iso_by_exhaustion(const Instance& I, const Instance& J);

}  // namespace fql::testing
