#include "fql/signature.hpp"

#include <utility>

namespace fql {

TypedSignature::TypedSignature(Graph graph, std::vector<PathEquation> equations,
                               std::vector<AttrDecl> attributes, int fuel)
    : graph_(std::make_shared<Graph>(std::move(graph))),
      equations_(std::move(equations)),
      attributes_(std::move(attributes)) {
  for (size_t i = 0; i < attributes_.size(); ++i) {
    const AttrDecl& a = attributes_[i];
    if (attr_ix_.count(a.name)) {
      throw SignatureError("duplicate attribute '" + a.name + "'");
    }
    if (!graph_->has_node(a.node)) {
      throw SignatureError("attribute '" + a.name + "' hangs off unknown node '" +
                           a.node + "'");
    }
    if (graph_->has_edge(a.name)) {
      throw SignatureError("attribute '" + a.name + "' clashes with an edge name");
    }
    attr_ix_[a.name] = static_cast<int>(i);
  }
  rewrite_ = fql::complete(graph_, equations_, fuel);
}

bool TypedSignature::has_attribute(const std::string& name) const {
  return attr_ix_.count(name) > 0;
}

const AttrDecl& TypedSignature::attribute(const std::string& name) const {
  auto it = attr_ix_.find(name);
  if (it == attr_ix_.end()) {
    throw SignatureError("unknown attribute '" + name + "'");
  }
  return attributes_[it->second];
}

std::vector<AttrDecl> TypedSignature::attributes_of(
    const std::string& node) const {
  std::vector<AttrDecl> out;
  for (const auto& a : attributes_) {
    if (a.node == node) out.push_back(a);
  }
  return out;
}

SigPtr make_signature(Graph graph, std::vector<PathEquation> equations,
                      std::vector<AttrDecl> attributes, int fuel) {
  return std::make_shared<const TypedSignature>(
      std::move(graph), std::move(equations), std::move(attributes), fuel);
}

SigPtr strip_attributes(SigPtr sig) {
  if (sig->attributes().empty()) return sig;
  return std::make_shared<const TypedSignature>(sig->graph(), sig->equations(),
                                                std::vector<AttrDecl>{});
}

SigPtr with_attributes(SigPtr sig, std::vector<AttrDecl> attributes) {
  return std::make_shared<const TypedSignature>(sig->graph(), sig->equations(),
                                                std::move(attributes));
}

TypedSignatureMorphism identity_morphism(SigPtr sig) {
  TypedSignatureMorphism f;
  f.source = sig;
  f.target = sig;
  for (const auto& n : sig->nodes()) f.node_map[n] = n;
  for (const auto& e : sig->edges()) {
    f.edge_map[e.name] = Path{e.src, {e.name}};
  }
  for (const auto& a : sig->attributes()) f.attr_map[a.name] = a.name;
  return f;
}

Path apply(const TypedSignatureMorphism& f, const Path& p) {
  auto start = f.node_map.find(p.start);
  if (start == f.node_map.end()) {
    throw MorphismError("node '" + p.start + "' is not mapped");
  }
  Path out{start->second, {}};
  for (const auto& e : p.edges) {
    auto img = f.edge_map.find(e);
    if (img == f.edge_map.end()) {
      throw MorphismError("edge '" + e + "' is not mapped");
    }
    out.edges.insert(out.edges.end(), img->second.edges.begin(),
                     img->second.edges.end());
  }
  return out;
}

ValidationReport check_morphism(const TypedSignatureMorphism& f) {
  ValidationReport report;
  if (!f.source || !f.target) {
    report.add("morphism", "source or target signature missing");
    return report;
  }
  const TypedSignature& src = *f.source;
  const TypedSignature& dst = *f.target;

  for (const auto& n : src.nodes()) {
    auto it = f.node_map.find(n);
    if (it == f.node_map.end()) {
      report.add("node-map", "node '" + n + "' has no image");
    } else if (!dst.graph().has_node(it->second)) {
      report.add("node-map", "node '" + n + "' maps to unknown node '" +
                                 it->second + "'");
    }
  }
  for (const auto& [n, img] : f.node_map) {
    if (!src.graph().has_node(n)) {
      report.add("node-map", "map mentions unknown node '" + n + "'");
    }
    (void)img;
  }

  for (const auto& e : src.edges()) {
    auto it = f.edge_map.find(e.name);
    if (it == f.edge_map.end()) {
      report.add("edge-map", "edge '" + e.name + "' has no image");
      continue;
    }
    const Path& img = it->second;
    if (!dst.graph().valid_path(img)) {
      report.add("edge-map", "edge '" + e.name +
                                 "' maps to invalid path '" +
                                 render_path(img) + "'");
      continue;
    }
    auto s = f.node_map.find(e.src);
    auto t = f.node_map.find(e.dst);
    if (s == f.node_map.end() || t == f.node_map.end()) continue;
    if (img.start != s->second) {
      report.add("edge-map", "image of edge '" + e.name +
                                 "' starts at '" + img.start +
                                 "', expected '" + s->second + "'");
    }
    if (dst.graph().target_of(img) != t->second) {
      report.add("edge-map", "image of edge '" + e.name + "' ends at '" +
                                 dst.graph().target_of(img) +
                                 "', expected '" + t->second + "'");
    }
  }
  for (const auto& [e, img] : f.edge_map) {
    if (!src.graph().has_edge(e)) {
      report.add("edge-map", "map mentions unknown edge '" + e + "'");
    }
    (void)img;
  }

  if (!report.ok()) return report;

  if (!dst.complete()) {
    report.add("equations",
               "target rewrite system is incomplete, cannot decide "
               "equation preservation");
  } else {
    for (const auto& [lhs, rhs] : src.equations()) {
      Path a = apply(f, lhs);
      Path b = apply(f, rhs);
      if (!equivalent(a, b, dst.rewrite())) {
        report.add("equations", "equation '" + render_path(lhs) + " = " +
                                    render_path(rhs) +
                                    "' is not preserved: '" + render_path(a) +
                                    "' != '" + render_path(b) + "'");
      }
    }
  }

  for (const auto& a : src.attributes()) {
    auto it = f.attr_map.find(a.name);
    if (it == f.attr_map.end()) {
      report.add("attr-map", "attribute '" + a.name + "' has no image");
      continue;
    }
    if (!dst.has_attribute(it->second)) {
      report.add("attr-map", "attribute '" + a.name +
                                 "' maps to unknown attribute '" + it->second +
                                 "'");
      continue;
    }
    const AttrDecl& img = dst.attribute(it->second);
    if (img.type != a.type) {
      report.add("attr-map", "attribute '" + a.name + "' of type " +
                                 to_string(a.type) + " maps to '" + img.name +
                                 "' of type " + to_string(img.type));
    }
    auto n = f.node_map.find(a.node);
    if (n != f.node_map.end() && img.node != n->second) {
      report.add("attr-map", "attribute '" + a.name + "' sits on '" + a.node +
                                 "' mapping to '" + n->second +
                                 "', but its image sits on '" + img.node + "'");
    }
  }
  for (const auto& [a, img] : f.attr_map) {
    if (!src.has_attribute(a)) {
      report.add("attr-map", "map mentions unknown attribute '" + a + "'");
    }
    (void)img;
  }

  return report;
}

void require_valid(const TypedSignatureMorphism& f, const std::string& what) {
  ValidationReport report = check_morphism(f);
  if (!report.ok()) {
    throw MorphismError(what + " is not a valid morphism:\n" +
                        report.to_string());
  }
}

TypedSignatureMorphism compose(const TypedSignatureMorphism& f,
                               const TypedSignatureMorphism& g) {
  if (f.target.get() != g.source.get()) {
    throw MorphismError("composition mismatch: target of first is not source "
                        "of second");
  }
  TypedSignatureMorphism out;
  out.source = f.source;
  out.target = g.target;
  for (const auto& [n, img] : f.node_map) {
    out.node_map[n] = g.node_map.at(img);
  }
  for (const auto& [e, img] : f.edge_map) {
    out.edge_map[e] = apply(g, img);
  }
  for (const auto& [a, img] : f.attr_map) {
    out.attr_map[a] = g.attr_map.at(img);
  }
  return out;
}

bool morphisms_equal(const TypedSignatureMorphism& f,
                     const TypedSignatureMorphism& g) {
  if (f.source.get() != g.source.get() || f.target.get() != g.target.get()) {
    return false;
  }
  if (f.node_map != g.node_map || f.attr_map != g.attr_map) return false;
  for (const auto& [e, img] : f.edge_map) {
    auto it = g.edge_map.find(e);
    if (it == g.edge_map.end()) return false;
    if (!equivalent(img, it->second, f.target->rewrite())) return false;
  }
  return f.edge_map.size() == g.edge_map.size();
}

}  // namespace fql
