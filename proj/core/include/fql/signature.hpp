#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fql/rewrite.hpp"

namespace fql {

struct AttrDecl {
  std::string name;
  std::string node;
  BaseType type;
};

// A finitely presented schema: a graph, path equations, and typed
// attributes hanging off nodes. Attribute names are unique across the whole
// signature, and equations never mention attributes (they are paths of the
// graph only). The rewrite system for the equations is computed once at
// construction; a signature is immutable afterwards.
class TypedSignature {
 public:
  TypedSignature(Graph graph, std::vector<PathEquation> equations,
                 std::vector<AttrDecl> attributes, int fuel = kDefaultFuel);

  const Graph& graph() const { return *graph_; }
  std::shared_ptr<const Graph> graph_ptr() const { return graph_; }
  const std::vector<PathEquation>& equations() const { return equations_; }
  const std::vector<AttrDecl>& attributes() const { return attributes_; }
  const RewriteSystem& rewrite() const { return rewrite_; }
  bool complete() const {
    return rewrite_.status == CompletionStatus::Complete;
  }

  bool has_attribute(const std::string& name) const;
  const AttrDecl& attribute(const std::string& name) const;
  std::vector<AttrDecl> attributes_of(const std::string& node) const;

  const std::vector<std::string>& nodes() const { return graph_->nodes(); }
  const std::vector<EdgeDecl>& edges() const { return graph_->edges(); }

 private:
  std::shared_ptr<const Graph> graph_;
  std::vector<PathEquation> equations_;
  std::vector<AttrDecl> attributes_;
  std::map<std::string, int> attr_ix_;
  RewriteSystem rewrite_;
};

using SigPtr = std::shared_ptr<const TypedSignature>;

SigPtr make_signature(Graph graph, std::vector<PathEquation> equations = {},
                      std::vector<AttrDecl> attributes = {},
                      int fuel = kDefaultFuel);

// Same graph and equations, no attributes.
SigPtr strip_attributes(SigPtr sig);

// Same graph and equations, different attributes.
SigPtr with_attributes(SigPtr sig, std::vector<AttrDecl> attributes);

// Maps nodes to nodes, edges to paths, attributes to attributes. Valid when
// endpoints line up, every source equation lands on equivalent paths, and
// attribute anchors and base types commute with the node map.
struct TypedSignatureMorphism {
  SigPtr source;
  SigPtr target;
  std::map<std::string, std::string> node_map;
  std::map<std::string, Path> edge_map;
  std::map<std::string, std::string> attr_map;
};

TypedSignatureMorphism identity_morphism(SigPtr sig);

// Image of a path: start through node_map, each edge through edge_map.
Path apply(const TypedSignatureMorphism& f, const Path& p);

// Structural validation; empty report means valid. Needs the target's
// rewrite system to be Complete for the equation checks, and reports that
// as a violation rather than throwing.
ValidationReport check_morphism(const TypedSignatureMorphism& f);

// Throws MorphismError when check_morphism finds anything.
void require_valid(const TypedSignatureMorphism& f, const std::string& what);

// g after f, i.e. first f then g. Sources and targets must fit.
TypedSignatureMorphism compose(const TypedSignatureMorphism& f,
                               const TypedSignatureMorphism& g);

// Same node and attribute maps, and edge images equivalent in the target.
bool morphisms_equal(const TypedSignatureMorphism& f,
                     const TypedSignatureMorphism& g);

enum class PiReadiness {
  // Source and target carry the same attribute set, mapped identically.
  Strict,
  // Every target attribute has at least one preimage; extra source
  // attributes are allowed to collapse.
  Surjective,
};

struct MorphismProfile {
  bool is_dop = false;
  bool is_pi_ready = false;
  bool is_sigma_ready = false;
};

// Classifies a morphism for migration use. The op-fibration check needs the
// source's denotation to be finite (every candidate lift is enumerated), so
// this throws FinitenessUnknownError when saturation gives up.
MorphismProfile profile(const TypedSignatureMorphism& f,
                        int fuel = kDefaultFuel,
                        PiReadiness readiness = PiReadiness::Strict);

}  // namespace fql
