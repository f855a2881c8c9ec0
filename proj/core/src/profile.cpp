#include "fql/category.hpp"
#include "fql/signature.hpp"

namespace fql {

namespace {

// Unique edge lifting: over every edge leaving the image of a source node
// there must be exactly one source morphism (up to path equivalence) whose
// image presents that edge.
bool check_dop(const TypedSignatureMorphism& f, const FiniteCategory& source) {
  const RewriteSystem& target_rs = f.target->rewrite();
  for (const auto& c : f.source->nodes()) {
    const std::string& fc = f.node_map.at(c);
    for (const auto& edge : f.target->edges()) {
      if (edge.src != fc) continue;
      Path edge_path{edge.src, {edge.name}};
      int lifts = 0;
      for (int m : source.from(c)) {
        Path image = apply(f, source.rep(m));
        if (target_rs.graph->target_of(image) != edge.dst) continue;
        if (equivalent(image, edge_path, target_rs)) ++lifts;
        if (lifts > 1) return false;
      }
      if (lifts != 1) return false;
    }
  }
  return true;
}

bool check_pi_ready(const TypedSignatureMorphism& f, PiReadiness readiness) {
  const auto& src_attrs = f.source->attributes();
  const auto& dst_attrs = f.target->attributes();

  // Anchors must commute either way; validity has already checked types and
  // anchors for mapped attributes, so only the shape of the map is left.
  if (readiness == PiReadiness::Strict) {
    if (src_attrs.size() != dst_attrs.size()) return false;
    for (const auto& a : src_attrs) {
      auto it = f.attr_map.find(a.name);
      if (it == f.attr_map.end() || it->second != a.name) return false;
      if (!f.target->has_attribute(a.name)) return false;
    }
    return true;
  }

  for (const auto& d : dst_attrs) {
    bool hit = false;
    for (const auto& [a, img] : f.attr_map) {
      if (img == d.name) {
        hit = true;
        break;
      }
      (void)a;
    }
    if (!hit) return false;
  }
  return true;
}

// The attribute square is a pullback: attributes of a source node
// correspond one to one with attributes of its image node.
bool check_sigma_attrs(const TypedSignatureMorphism& f) {
  for (const auto& c : f.source->nodes()) {
    const std::string& fc = f.node_map.at(c);
    std::vector<AttrDecl> here = f.source->attributes_of(c);
    std::vector<AttrDecl> there = f.target->attributes_of(fc);
    if (here.size() != there.size()) return false;
    for (const auto& target_attr : there) {
      int preimages = 0;
      for (const auto& a : here) {
        if (f.attr_map.at(a.name) == target_attr.name) ++preimages;
      }
      if (preimages != 1) return false;
    }
  }
  return true;
}

}  // namespace

MorphismProfile profile(const TypedSignatureMorphism& f, int fuel,
                        PiReadiness readiness) {
  require_valid(f, "profiled morphism");

  auto source = saturate(f.source, fuel);
  if (!source) {
    throw FinitenessUnknownError(
        "cannot certify the lift search: the source denotation did not "
        "enumerate within fuel");
  }

  MorphismProfile p;
  p.is_dop = check_dop(f, *source);
  p.is_pi_ready = check_pi_ready(f, readiness);
  p.is_sigma_ready = p.is_dop && check_sigma_attrs(f);
  return p;
}

}  // namespace fql
