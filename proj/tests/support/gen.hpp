#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fql/catops.hpp"
#include "fql/instance.hpp"
#include "fql/relenc.hpp"
#include "fql/signature.hpp"

namespace fql::testing {

struct Rng {
  std::mt19937 eng;
  explicit Rng(unsigned seed) : eng(seed) {}
  int below(int n) {
    return n <= 1 ? 0 : int(std::uniform_int_distribution<int>(0, n - 1)(eng));
  }
  bool coin(double p = 0.5) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(eng) < p;
  }
};

// Graph on nodes n0..n{k-1}; with `acyclic`, edges only point from lower to
// strictly higher index, so every path terminates.
Graph random_graph(Rng& r, int max_nodes, int max_edges, bool acyclic);

// Random pairs of parallel paths found by sampling walks; empty when the
// graph offers none within the length budget.
std::vector<PathEquation> random_parallel_equations(Rng& r, const Graph& g,
                                                    int max_eqs, int max_len);

// Attribute declarations scattered over the nodes, names unique per call
// via the tag.
std::vector<AttrDecl> random_attrs(Rng& r, const Graph& g, int max_attrs,
                                   const std::string& tag);

// A valid instance with at most max_rows rows per node; satisfies the
// signature's equations by construction when there are none, by rejection
// otherwise.  IDs carry `tag` so instances from different calls never
// collide.  nullopt when rejection keeps failing.
std::optional<Instance> random_instance(Rng& r, SigPtr sig, int max_rows,
                                        const std::string& tag,
                                        int tries = 50);

// A valid morphism S -> T assembled from random node images and random
// connecting paths, checked by the library validator; nullopt when
// sampling keeps missing.
std::optional<TypedSignatureMorphism> random_morphism(Rng& r, SigPtr S,
                                                      SigPtr T,
                                                      int max_path_len,
                                                      int tries = 50);

// A functor with the unique-edge-lifting property onto `base`, built as the
// projection from the table of elements of a random instance.  The source
// signature is fresh.
std::optional<TypedSignatureMorphism> random_lifting_friendly(
    Rng& r, SigPtr base, int max_rows, const std::string& tag,
    int fuel = kDefaultFuel);

// Relational side: a schema of at most two relations with arity 1..3 over
// String, an instance with at most max_rows tuples per relation drawn from
// a small value pool, and a query over it.
RelationalSchema random_rel_schema(Rng& r);
RelationalInstance random_rel_instance(Rng& r, const RelationalSchema& schema,
                                       int max_rows);
SpcQuery random_spc_query(Rng& r, const RelationalSchema& schema);

}  // namespace fql::testing
