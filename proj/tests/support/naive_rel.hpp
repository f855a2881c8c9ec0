#pragma once

#include <vector>

#include "fql/relenc.hpp"

namespace fql::testing {

// Textbook evaluation of SELECT/WHERE/FROM directly on the stored tuples:
// nested loops over the FROM entries, equality filters on flat column
// indices, then projection.  Duplicates are kept; callers wanting set
// semantics dedupe afterwards.  Shares nothing with the engine's evaluator
// beyond the input types.
std::vector<std::vector<Value>> naive_spc(const RelationalInstance& db,
                                          const SpcQuery& q);

// Arm-by-arm naive_spc concatenated; dedupes when the query asks for sets.
std::vector<std::vector<Value>> naive_spcu(const RelationalInstance& db,
                                           const SpcuQuery& q);

// Multiset equality of tuple lists.
bool rows_equal_as_bags(std::vector<std::vector<Value>> a,
                        std::vector<std::vector<Value>> b);

// Set equality of tuple lists.
bool rows_equal_as_sets(std::vector<std::vector<Value>> a,
                        std::vector<std::vector<Value>> b);

}  // namespace fql::testing
