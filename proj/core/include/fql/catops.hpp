#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fql/category.hpp"
#include "fql/instance.hpp"

namespace fql {

// Size guard for generated signatures.  Exceeding it raises
// BudgetExceededError naming the construction that blew up.
struct CatBudget {
  std::size_t max_nodes = 500;
  std::size_t max_edges = 1500;
};

struct CoproductResult {
  SigPtr sig;
  TypedSignatureMorphism into_left;
  TypedSignatureMorphism into_right;
  std::map<std::string, std::string> left_node, right_node;
  std::map<std::string, std::string> left_edge, right_edge;
  std::map<std::string, std::string> left_attr, right_attr;
};

// Disjoint union of two signatures, with the evident inclusions.
CoproductResult coproduct(SigPtr a, SigPtr b, int fuel = kDefaultFuel);

// For a coproduct of a signature with itself: the morphism back onto it that
// collapses the two copies.
TypedSignatureMorphism coproduct_fold(const CoproductResult& cp);

struct FiberProductResult {
  SigPtr sig;
  TypedSignatureMorphism to_left;   // into f's source
  TypedSignatureMorphism to_right;  // into g's source
  struct Obj {
    std::string left, right;
  };
  std::map<std::string, Obj> objects;          // generated node -> node pair
  std::map<std::string, std::string> name_of;  // obj_key(l, r) -> generated node
  static std::string obj_key(const std::string& l, const std::string& r);
};

// Universal span over f and g: nodes are node pairs with equal image, maps
// are morphism pairs with equal image, presented by their full multiplication
// table.  Both sources and the shared target must present finite categories.
// Attributes pair up likewise: one per (left attr, right attr) with a common
// image.
FiberProductResult fiber_product(const TypedSignatureMorphism& f,
                                 const TypedSignatureMorphism& g,
                                 int fuel = kDefaultFuel,
                                 const CatBudget& budget = {});

struct CommaResult {
  SigPtr sig;
  TypedSignatureMorphism to_left;   // into f's source
  TypedSignatureMorphism to_right;  // into g's source
  struct Obj {
    std::string left, right;
    int gamma = 0;  // morphism index in *target_cat
  };
  std::map<std::string, Obj> objects;          // generated node -> triple
  std::map<std::string, std::string> name_of;  // obj_key -> generated node
  std::shared_ptr<const FiniteCategory> target_cat;  // the shared target
  static std::string obj_key(const std::string& l, const std::string& r,
                             int gamma);
};

// Lax slice of f over g: objects are triples (a, b, gamma : f a -> g b), maps
// are pairs making the evident square commute, presented by their full
// multiplication table.  With `typed`, the result copies the attributes of
// f's source verbatim; that needs each of their f-images to sit identically
// on g's source, which is exactly what the readiness checks in profile()
// guarantee for the callers that ask for it.
CommaResult comma(const TypedSignatureMorphism& f,
                  const TypedSignatureMorphism& g, bool typed = false,
                  int fuel = kDefaultFuel, const CatBudget& budget = {});

// Comma of a single node d of F's target under F; to_left lands in a
// one-node signature and every object has left == "pt".
CommaResult comma_from_object(const std::string& d,
                              const TypedSignatureMorphism& F,
                              int fuel = kDefaultFuel,
                              const CatBudget& budget = {});

struct GrothendieckResult {
  SigPtr sig;                   // one node per row, one edge per (edge, row)
  TypedSignatureMorphism proj;  // down to the base signature
  struct Obj {
    std::string node;
    Id row;
  };
  std::map<std::string, Obj> objects;          // generated node -> (base, row)
  std::map<std::string, std::string> name_of;  // obj_key(node, row) -> node
  std::map<std::string, std::pair<std::string, Id>>
      edge_origin;  // generated edge -> (base edge, source row)
  static std::string obj_key(const std::string& node, const Id& row);
};

// Table of elements of a valid instance.  With `typed`, the result carries
// one attribute per (base attribute, row) so proj also transports attribute
// values; without it the generated signature is purely structural.
GrothendieckResult grothendieck(const Instance& inst, bool typed = true,
                                int fuel = kDefaultFuel);

// The other direction: rows over a node of pi's target are the source nodes
// in its fibre, and edge actions follow the unique edge liftings (pi must
// pass the lifting check in profile()).  The result carries no attribute
// data; when the target declares attributes the instance lives on its
// attribute-free core.
Instance degrothendieck(const TypedSignatureMorphism& pi,
                        int fuel = kDefaultFuel);

}  // namespace fql
