#pragma once

#include <vector>

#include "fql/catops.hpp"
#include "fql/instance.hpp"

namespace fql {

// Pullback along F: a row of the result at a source node is a row of I at
// its image, edges follow the image paths, attribute values come across
// from the image attributes. Output IDs are freshly minted per node table,
// because two source nodes sharing an image would otherwise share IDs.
Instance delta(const TypedSignatureMorphism& F, const Instance& I,
               KeyGen& keys);

// Same action but keeping the pulled IDs verbatim. When F merges nodes the
// same ID then appears in several node tables, deliberately breaking the
// global-uniqueness invariant (validate() flags it); the callers that want
// this need the row correspondence, not a standalone instance.
Instance delta_shared_ids(const TypedSignatureMorphism& F, const Instance& I);

// Pushforward along an edge-lifting, attribute-bijective F (see profile()):
// rows at a target node are the plain union of the rows at its preimages —
// IDs survive unchanged — and edges follow the unique liftings. Throws
// NotOpFibrationError / NotSigmaReadyError when F does not qualify.
Instance sigma(const TypedSignatureMorphism& F, const Instance& I,
               int fuel = kDefaultFuel);

// All ways of consistently choosing one I-row per comma object: one column
// per object of cm, one row per choice that every comma edge accepts. Rows
// are sorted lexicographically, so the enumeration is deterministic. I
// lives on the target of cm.to_right.
struct LimitTable {
  std::vector<std::string> columns;      // comma node names, in node order
  std::vector<std::string> column_node;  // underlying instance node per column
  std::vector<std::vector<Id>> rows;
};

LimitTable limit_table(const CommaResult& cm, const Instance& I);

// Right adjoint to pullback along F, built pointwise: the rows at a target
// node d enumerate the limit table of the comma of d under F, edges restrict
// such a choice along the evident reindexing, and an attribute on d reads
// its column at the identity object of the comma. F must pass the readiness
// check in profile() for the given mode; with the surjective mode, a target
// attribute with several preimages reads the first one in declaration
// order. Fresh IDs come from keys, one per limit row.
Instance pi(const TypedSignatureMorphism& F, const Instance& I, KeyGen& keys,
            int fuel = kDefaultFuel,
            PiReadiness readiness = PiReadiness::Strict,
            const CatBudget& budget = {});

// Same computation, but also hands back the per-node comma shapes and limit
// tables: ids[i] names row rows[i]. Query composition and the SQL planner
// both need to see which choice each fresh row stands for.
struct PiDetail {
  Instance result;
  struct PerNode {
    CommaResult cm;
    LimitTable lt;
    std::vector<Id> ids;
  };
  std::map<std::string, PerNode> nodes;
};

PiDetail pi_detailed(const TypedSignatureMorphism& F, const Instance& I,
                     KeyGen& keys, int fuel = kDefaultFuel,
                     PiReadiness readiness = PiReadiness::Strict,
                     const CatBudget& budget = {});

// Quotients each node table by observable equivalence: two rows merge when
// every attribute reachable along every morphism out of their node agrees.
// The first row of each class (in table order) survives as representative.
// Needs the signature's category to be finite so "every morphism" means
// something; throws FinitenessUnknownError otherwise. Idempotent.
Instance relationalize(const Instance& I, int fuel = kDefaultFuel);

// Disjoint union of two instances on the same signature, computed the long
// way around: both copies are rekeyed, laid side by side on the doubled
// signature, and pushed forward along the fold back onto it.
Instance coproduct_instance(const Instance& I, const Instance& J,
                            KeyGen& keys, int fuel = kDefaultFuel);

}  // namespace fql
