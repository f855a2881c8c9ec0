#pragma once

#include <optional>

#include "fql/signature.hpp"

namespace fql {

// A database state on a signature: a set of row IDs per node, a total
// function on IDs per edge, a typed value per ID per attribute. IDs are
// kept globally unique across all node tables of one instance.
struct Instance {
  SigPtr sig;
  std::map<std::string, std::vector<Id>> nodes;
  std::map<std::string, std::map<Id, Id>> edges;
  std::map<std::string, std::map<Id, Value>> attrs;
};

// Empty tables for every node, edge and attribute of the signature.
Instance empty_instance(SigPtr sig);

// Checks table shape (every node/edge/attr present, functions total onto
// declared targets, values typed as declared, IDs globally unique) and
// that every signature equation holds at every row. Reports the violating
// IDs by name.
ValidationReport validate(const Instance& I);

// Follows edges; throws UnknownIdError when x is not a row of p.start.
Id eval_path(const Instance& I, const Path& p, const Id& x);

Value eval_attr(const Instance& I, const std::string& attr, const Id& x);

// Renaming of IDs commuting with all edges and preserving all attribute
// values. Because IDs are globally unique one map covers every node table.
struct InstanceIso {
  std::map<Id, Id> forward;
};

// Backtracking search pruned by iterated invariant refinement (node,
// attribute values, in/out edge structure). Instances must live on
// structurally equal signatures; throws InstanceError otherwise.
std::optional<InstanceIso> isomorphic(const Instance& I, const Instance& J);

// Same shape with fresh IDs drawn from the generator.
Instance rekey(const Instance& I, KeyGen& keys);

// True when the two signatures have the same nodes, edges, equations and
// attributes (by name and shape); instances on structurally equal
// signatures are comparable even when the pointers differ.
bool same_shape(const TypedSignature& a, const TypedSignature& b);

// Rebuilds I onto another (structurally equal) signature object.
Instance rehome(const Instance& I, SigPtr sig);

}  // namespace fql
