#include "fql/catops.hpp"

#include <functional>
#include <tuple>
#include <utility>

namespace fql {

namespace {

constexpr char kSep = '\x1f';

FiniteCategory must_saturate(SigPtr sig, int fuel, const std::string& role) {
  auto cat = saturate(sig, fuel);
  if (!cat) {
    throw FinitenessUnknownError("could not enumerate all morphisms of the " +
                                 role + " within fuel; result unknown");
  }
  return std::move(*cat);
}

// Multiplication-table presentation of an explicitly enumerated category:
// one edge per non-identity morphism, one length-two equation per composable
// pair. Normal forms are single edges, so saturating the result is cheap.
struct TablePresentation {
  Graph graph;
  std::vector<PathEquation> equations;
  std::vector<std::string> edge_of;  // morphism -> edge name; "" = identity
};

TablePresentation present_table(const std::vector<std::string>& node_names,
                                const std::vector<int>& mor_src,
                                const std::vector<int>& mor_dst,
                                const std::vector<bool>& mor_id,
                                const std::function<int(int, int)>& comp,
                                NameMint& mint, const CatBudget& budget,
                                const std::string& stage) {
  size_t edge_count = 0;
  for (bool b : mor_id) edge_count += b ? 0 : 1;
  if (node_names.size() > budget.max_nodes || edge_count > budget.max_edges) {
    throw BudgetExceededError(
        stage + ": generated signature would need " +
        std::to_string(node_names.size()) + " nodes and " +
        std::to_string(edge_count) + " edges, over the configured budget");
  }
  TablePresentation out;
  for (const auto& n : node_names) out.graph.add_node(n);
  out.edge_of.assign(mor_src.size(), std::string{});
  for (size_t k = 0; k < mor_src.size(); ++k) {
    if (mor_id[k]) continue;
    out.edge_of[k] = mint.mint("mor_" + std::to_string(k));
    out.graph.add_edge(out.edge_of[k], node_names[mor_src[k]],
                       node_names[mor_dst[k]]);
  }
  for (size_t i = 0; i < mor_src.size(); ++i) {
    if (mor_id[i]) continue;
    for (size_t j = 0; j < mor_src.size(); ++j) {
      if (mor_id[j] || mor_dst[i] != mor_src[j]) continue;
      int k = comp(static_cast<int>(i), static_cast<int>(j));
      Path lhs{node_names[mor_src[i]], {out.edge_of[i], out.edge_of[j]}};
      Path rhs = mor_id[k] ? Path{node_names[mor_src[i]], {}}
                           : Path{node_names[mor_src[i]], {out.edge_of[k]}};
      out.equations.push_back({lhs, rhs});
    }
  }
  return out;
}

Path lift_through(const std::map<std::string, std::string>& node_names,
                  const std::map<std::string, std::string>& edge_names,
                  const Path& p) {
  Path q{node_names.at(p.start), {}};
  for (const auto& e : p.edges) q.edges.push_back(edge_names.at(e));
  return q;
}

}  // namespace

CoproductResult coproduct(SigPtr a, SigPtr b, int fuel) {
  NameMint mint;
  CoproductResult out;
  Graph g;
  for (const auto& n : a->nodes()) {
    auto nm = mint.mint_joined({"L", n});
    out.left_node[n] = nm;
    g.add_node(nm);
  }
  for (const auto& n : b->nodes()) {
    auto nm = mint.mint_joined({"R", n});
    out.right_node[n] = nm;
    g.add_node(nm);
  }
  for (const auto& e : a->edges()) {
    auto nm = mint.mint_joined({"L", e.name});
    out.left_edge[e.name] = nm;
    g.add_edge(nm, out.left_node.at(e.src), out.left_node.at(e.dst));
  }
  for (const auto& e : b->edges()) {
    auto nm = mint.mint_joined({"R", e.name});
    out.right_edge[e.name] = nm;
    g.add_edge(nm, out.right_node.at(e.src), out.right_node.at(e.dst));
  }
  std::vector<PathEquation> eqs;
  for (const auto& [p, q] : a->equations()) {
    eqs.push_back({lift_through(out.left_node, out.left_edge, p),
                   lift_through(out.left_node, out.left_edge, q)});
  }
  for (const auto& [p, q] : b->equations()) {
    eqs.push_back({lift_through(out.right_node, out.right_edge, p),
                   lift_through(out.right_node, out.right_edge, q)});
  }
  std::vector<AttrDecl> attrs;
  for (const auto& th : a->attributes()) {
    auto nm = mint.mint_joined({"L", th.name});
    out.left_attr[th.name] = nm;
    attrs.push_back({nm, out.left_node.at(th.node), th.type});
  }
  for (const auto& th : b->attributes()) {
    auto nm = mint.mint_joined({"R", th.name});
    out.right_attr[th.name] = nm;
    attrs.push_back({nm, out.right_node.at(th.node), th.type});
  }
  out.sig =
      make_signature(std::move(g), std::move(eqs), std::move(attrs), fuel);

  out.into_left.source = a;
  out.into_left.target = out.sig;
  out.into_left.node_map =
      std::map<std::string, std::string>(out.left_node.begin(),
                                         out.left_node.end());
  for (const auto& e : a->edges()) {
    out.into_left.edge_map[e.name] =
        Path{out.left_node.at(e.src), {out.left_edge.at(e.name)}};
  }
  out.into_left.attr_map = out.left_attr;

  out.into_right.source = b;
  out.into_right.target = out.sig;
  out.into_right.node_map =
      std::map<std::string, std::string>(out.right_node.begin(),
                                         out.right_node.end());
  for (const auto& e : b->edges()) {
    out.into_right.edge_map[e.name] =
        Path{out.right_node.at(e.src), {out.right_edge.at(e.name)}};
  }
  out.into_right.attr_map = out.right_attr;

  require_valid(out.into_left, "left coproduct inclusion");
  require_valid(out.into_right, "right coproduct inclusion");
  return out;
}

TypedSignatureMorphism coproduct_fold(const CoproductResult& cp) {
  if (cp.into_left.source != cp.into_right.source) {
    throw MorphismError(
        "folding a coproduct needs both summands to be the same signature "
        "object");
  }
  SigPtr a = cp.into_left.source;
  TypedSignatureMorphism fold;
  fold.source = cp.sig;
  fold.target = a;
  for (const auto& [orig, tagged] : cp.left_node) fold.node_map[tagged] = orig;
  for (const auto& [orig, tagged] : cp.right_node) fold.node_map[tagged] = orig;
  for (const auto& [orig, tagged] : cp.left_edge) {
    fold.edge_map[tagged] = Path{a->graph().edge(orig).src, {orig}};
  }
  for (const auto& [orig, tagged] : cp.right_edge) {
    fold.edge_map[tagged] = Path{a->graph().edge(orig).src, {orig}};
  }
  for (const auto& [orig, tagged] : cp.left_attr) fold.attr_map[tagged] = orig;
  for (const auto& [orig, tagged] : cp.right_attr) fold.attr_map[tagged] = orig;
  require_valid(fold, "coproduct fold");
  return fold;
}

std::string FiberProductResult::obj_key(const std::string& l,
                                        const std::string& r) {
  return l + kSep + r;
}

FiberProductResult fiber_product(const TypedSignatureMorphism& f,
                                 const TypedSignatureMorphism& g, int fuel,
                                 const CatBudget& budget) {
  require_valid(f, "left leg of a fiber product");
  require_valid(g, "right leg of a fiber product");
  if (f.target != g.target) {
    throw MorphismError(
        "a fiber product needs both legs to share one target signature "
        "object");
  }
  FiniteCategory A = must_saturate(f.source, fuel, "left fiber-product source");
  FiniteCategory B =
      must_saturate(g.source, fuel, "right fiber-product source");
  FiniteCategory C = must_saturate(f.target, fuel, "fiber-product target");

  std::vector<int> fimg(A.size()), gimg(B.size());
  for (size_t i = 0; i < A.size(); ++i) {
    fimg[i] = C.morphism_of(apply(f, A.rep(static_cast<int>(i))));
  }
  for (size_t j = 0; j < B.size(); ++j) {
    gimg[j] = C.morphism_of(apply(g, B.rep(static_cast<int>(j))));
  }

  NameMint mint;
  FiberProductResult out;
  std::vector<std::string> node_names;
  std::map<std::string, int> node_ix;
  for (const auto& a : f.source->nodes()) {
    for (const auto& b : g.source->nodes()) {
      if (f.node_map.at(a) != g.node_map.at(b)) continue;
      auto nm = mint.mint_joined({a, b});
      out.objects[nm] = {a, b};
      out.name_of[FiberProductResult::obj_key(a, b)] = nm;
      node_ix[nm] = static_cast<int>(node_names.size());
      node_names.push_back(nm);
    }
  }
  auto obj_ix = [&](const std::string& a, const std::string& b) {
    return node_ix.at(out.name_of.at(FiberProductResult::obj_key(a, b)));
  };

  std::vector<int> msrc, mdst, ma, mb;
  std::vector<bool> mid;
  std::map<long long, int> pair_ix;
  for (size_t i = 0; i < A.size(); ++i) {
    for (size_t j = 0; j < B.size(); ++j) {
      if (fimg[i] != gimg[j]) continue;
      int ii = static_cast<int>(i), jj = static_cast<int>(j);
      pair_ix[static_cast<long long>(i) * B.size() + j] =
          static_cast<int>(msrc.size());
      msrc.push_back(obj_ix(A.src_of(ii), B.src_of(jj)));
      mdst.push_back(obj_ix(A.tgt_of(ii), B.tgt_of(jj)));
      ma.push_back(ii);
      mb.push_back(jj);
      mid.push_back(A.is_identity(ii) && B.is_identity(jj));
    }
  }
  auto comp = [&](int i, int j) {
    int ka = A.compose(ma[i], ma[j]);
    int kb = B.compose(mb[i], mb[j]);
    return pair_ix.at(static_cast<long long>(ka) * B.size() + kb);
  };

  TablePresentation tp = present_table(node_names, msrc, mdst, mid, comp, mint,
                                       budget, "fiber product");

  std::vector<AttrDecl> attrs;
  std::map<std::string, std::string> lattr, rattr;
  for (const auto& al : f.source->attributes()) {
    for (const auto& be : g.source->attributes()) {
      if (f.attr_map.at(al.name) != g.attr_map.at(be.name)) continue;
      auto nm = mint.mint_joined({al.name, be.name});
      attrs.push_back(
          {nm, out.name_of.at(FiberProductResult::obj_key(al.node, be.node)),
           al.type});
      lattr[nm] = al.name;
      rattr[nm] = be.name;
    }
  }

  out.sig = make_signature(std::move(tp.graph), std::move(tp.equations),
                           std::move(attrs), fuel);

  out.to_left.source = out.sig;
  out.to_left.target = f.source;
  out.to_right.source = out.sig;
  out.to_right.target = g.source;
  for (const auto& [nm, obj] : out.objects) {
    out.to_left.node_map[nm] = obj.left;
    out.to_right.node_map[nm] = obj.right;
  }
  for (size_t k = 0; k < msrc.size(); ++k) {
    if (mid[k]) continue;
    out.to_left.edge_map[tp.edge_of[k]] = A.rep(ma[k]);
    out.to_right.edge_map[tp.edge_of[k]] = B.rep(mb[k]);
  }
  out.to_left.attr_map = lattr;
  out.to_right.attr_map = rattr;
  require_valid(out.to_left, "left fiber-product projection");
  require_valid(out.to_right, "right fiber-product projection");
  return out;
}

std::string CommaResult::obj_key(const std::string& l, const std::string& r,
                                 int gamma) {
  return l + kSep + r + kSep + std::to_string(gamma);
}

CommaResult comma(const TypedSignatureMorphism& f,
                  const TypedSignatureMorphism& g, bool typed, int fuel,
                  const CatBudget& budget) {
  require_valid(f, "left leg of a comma construction");
  require_valid(g, "right leg of a comma construction");
  if (f.target != g.target) {
    throw MorphismError(
        "a comma construction needs both legs to share one target signature "
        "object");
  }
  FiniteCategory A = must_saturate(f.source, fuel, "left comma source");
  FiniteCategory B = must_saturate(g.source, fuel, "right comma source");
  FiniteCategory C = must_saturate(f.target, fuel, "comma target");

  std::vector<int> fimg(A.size()), gimg(B.size());
  for (size_t i = 0; i < A.size(); ++i) {
    fimg[i] = C.morphism_of(apply(f, A.rep(static_cast<int>(i))));
  }
  for (size_t j = 0; j < B.size(); ++j) {
    gimg[j] = C.morphism_of(apply(g, B.rep(static_cast<int>(j))));
  }

  NameMint mint;
  CommaResult out;
  // Reserve attribute names up front so nodes and edges never steal them:
  // downstream strictness checks need these names copied verbatim.
  if (typed) {
    for (const auto& th : f.source->attributes()) mint.mint(th.name);
  }

  struct ObjRec {
    std::string a, b;
    int gamma;
  };
  std::vector<ObjRec> objs;
  std::vector<std::string> node_names;
  std::map<std::string, int> node_ix;
  for (const auto& a : f.source->nodes()) {
    for (const auto& b : g.source->nodes()) {
      for (int ga : C.hom(f.node_map.at(a), g.node_map.at(b))) {
        auto nm = mint.mint_joined({a, b, "g" + std::to_string(ga)});
        out.objects[nm] = {a, b, ga};
        out.name_of[CommaResult::obj_key(a, b, ga)] = nm;
        node_ix[nm] = static_cast<int>(node_names.size());
        node_names.push_back(nm);
        objs.push_back({a, b, ga});
        if (node_names.size() > budget.max_nodes) {
          throw BudgetExceededError(
              "comma construction: more than " +
              std::to_string(budget.max_nodes) + " generated nodes");
        }
      }
    }
  }

  std::vector<int> msrc, mdst, ma, mb;
  std::vector<bool> mid;
  std::map<std::tuple<int, int, int, int>, int> mor_ix;
  size_t nonid = 0;
  for (size_t o1 = 0; o1 < objs.size(); ++o1) {
    for (size_t o2 = 0; o2 < objs.size(); ++o2) {
      for (int m : A.hom(objs[o1].a, objs[o2].a)) {
        for (int n : B.hom(objs[o1].b, objs[o2].b)) {
          if (C.compose(objs[o1].gamma, gimg[n]) !=
              C.compose(fimg[m], objs[o2].gamma)) {
            continue;
          }
          bool is_id =
              o1 == o2 && A.is_identity(m) && B.is_identity(n);
          mor_ix[{static_cast<int>(o1), static_cast<int>(o2), m, n}] =
              static_cast<int>(msrc.size());
          msrc.push_back(static_cast<int>(o1));
          mdst.push_back(static_cast<int>(o2));
          ma.push_back(m);
          mb.push_back(n);
          mid.push_back(is_id);
          if (!is_id && ++nonid > budget.max_edges) {
            throw BudgetExceededError(
                "comma construction: more than " +
                std::to_string(budget.max_edges) + " generated edges");
          }
        }
      }
    }
  }
  auto comp = [&](int i, int j) {
    return mor_ix.at({msrc[i], mdst[j], A.compose(ma[i], ma[j]),
                      B.compose(mb[i], mb[j])});
  };

  TablePresentation tp = present_table(node_names, msrc, mdst, mid, comp, mint,
                                       budget, "comma construction");

  std::vector<AttrDecl> attrs;
  std::map<std::string, std::string> lattr, rattr;
  if (typed) {
    for (const auto& th : f.source->attributes()) {
      const auto& img = f.attr_map.at(th.name);
      if (!g.source->has_attribute(img) || g.attr_map.at(img) != img) {
        throw MorphismError(
            "typed comma construction needs the right leg to carry "
            "attribute '" +
            img + "' identically");
      }
      const auto& anchor_b = g.source->attribute(img).node;
      int gid = C.identity(f.node_map.at(th.node));
      attrs.push_back(
          {th.name,
           out.name_of.at(CommaResult::obj_key(th.node, anchor_b, gid)),
           th.type});
      lattr[th.name] = th.name;
      rattr[th.name] = img;
    }
  }

  out.sig = make_signature(std::move(tp.graph), std::move(tp.equations),
                           std::move(attrs), fuel);
  out.target_cat = std::make_shared<const FiniteCategory>(C);

  out.to_left.source = out.sig;
  out.to_left.target = f.source;
  out.to_right.source = out.sig;
  out.to_right.target = g.source;
  for (const auto& [nm, obj] : out.objects) {
    out.to_left.node_map[nm] = obj.left;
    out.to_right.node_map[nm] = obj.right;
  }
  for (size_t k = 0; k < msrc.size(); ++k) {
    if (mid[k]) continue;
    out.to_left.edge_map[tp.edge_of[k]] = A.rep(ma[k]);
    out.to_right.edge_map[tp.edge_of[k]] = B.rep(mb[k]);
  }
  out.to_left.attr_map = lattr;
  out.to_right.attr_map = rattr;
  require_valid(out.to_left, "left comma projection");
  require_valid(out.to_right, "right comma projection");
  return out;
}

CommaResult comma_from_object(const std::string& d,
                              const TypedSignatureMorphism& F, int fuel,
                              const CatBudget& budget) {
  if (!F.target->graph().has_node(d)) {
    throw SignatureError("no node '" + d + "' in the target signature");
  }
  Graph pg;
  pg.add_node("pt");
  SigPtr unit = make_signature(std::move(pg));
  TypedSignatureMorphism pick;
  pick.source = unit;
  pick.target = F.target;
  pick.node_map["pt"] = d;
  return comma(pick, F, false, fuel, budget);
}

std::string GrothendieckResult::obj_key(const std::string& node,
                                        const Id& row) {
  return node + kSep + row;
}

GrothendieckResult grothendieck(const Instance& inst, bool typed, int fuel) {
  // IDs shared between node tables are tolerated: rows here become (node,
  // row) pairs anyway, and the shared-ID pullback variant needs to pass
  // through. Everything else validate() flags is a real problem.
  auto report = validate(inst);
  for (const auto& v : report.items) {
    if (v.kind == "ids") continue;
    throw InstanceError("table of elements of an invalid instance:\n" +
                        report.to_string());
  }
  const TypedSignature& S = *inst.sig;
  NameMint mint;
  GrothendieckResult out;
  Graph g;
  for (const auto& c : S.nodes()) {
    for (const Id& x : inst.nodes.at(c)) {
      auto nm = mint.mint_joined({c, x});
      g.add_node(nm);
      out.objects[nm] = {c, x};
      out.name_of[GrothendieckResult::obj_key(c, x)] = nm;
    }
  }
  std::map<std::string, std::string> edge_name;  // obj_key(edge, row) -> name
  for (const auto& e : S.edges()) {
    for (const Id& x : inst.nodes.at(e.src)) {
      auto nm = mint.mint_joined({e.name, x});
      const Id& y = inst.edges.at(e.name).at(x);
      g.add_edge(nm, out.name_of.at(GrothendieckResult::obj_key(e.src, x)),
                 out.name_of.at(GrothendieckResult::obj_key(e.dst, y)));
      out.edge_origin[nm] = {e.name, x};
      edge_name[GrothendieckResult::obj_key(e.name, x)] = nm;
    }
  }

  auto lift = [&](const Path& p, const Id& x) {
    Path lp{out.name_of.at(GrothendieckResult::obj_key(p.start, x)), {}};
    Id cur = x;
    for (const auto& e : p.edges) {
      lp.edges.push_back(
          edge_name.at(GrothendieckResult::obj_key(e, cur)));
      cur = inst.edges.at(e).at(cur);
    }
    return lp;
  };
  std::vector<PathEquation> eqs;
  for (const auto& [p, q] : S.equations()) {
    for (const Id& x : inst.nodes.at(p.start)) {
      eqs.push_back({lift(p, x), lift(q, x)});
    }
  }

  std::vector<AttrDecl> attrs;
  std::map<std::string, std::string> amap;
  if (typed) {
    for (const auto& th : S.attributes()) {
      for (const Id& x : inst.nodes.at(th.node)) {
        auto nm = mint.mint_joined({th.name, x});
        attrs.push_back(
            {nm, out.name_of.at(GrothendieckResult::obj_key(th.node, x)),
             th.type});
        amap[nm] = th.name;
      }
    }
  }

  out.sig =
      make_signature(std::move(g), std::move(eqs), std::move(attrs), fuel);
  out.proj.source = out.sig;
  out.proj.target = inst.sig;
  for (const auto& [nm, obj] : out.objects) out.proj.node_map[nm] = obj.node;
  for (const auto& [nm, origin] : out.edge_origin) {
    out.proj.edge_map[nm] =
        Path{S.graph().edge(origin.first).src, {origin.first}};
  }
  out.proj.attr_map = amap;
  require_valid(out.proj, "table-of-elements projection");
  return out;
}

Instance degrothendieck(const TypedSignatureMorphism& pi, int fuel) {
  MorphismProfile prof = profile(pi, fuel);
  if (!prof.is_dop) {
    throw NotOpFibrationError(
        "edge lifting along the projection is not unique, so its fibres do "
        "not form an instance");
  }
  FiniteCategory X = must_saturate(pi.source, fuel, "projection source");
  SigPtr base = strip_attributes(pi.target);
  Instance out = empty_instance(base);
  for (const auto& x : pi.source->nodes()) {
    out.nodes[pi.node_map.at(x)].push_back(x);
  }
  const RewriteSystem& rw = pi.target->rewrite();
  for (const auto& e : base->edges()) {
    for (const Id& x : out.nodes.at(e.src)) {
      for (int m : X.from(x)) {
        if (pi.node_map.at(X.tgt_of(m)) != e.dst) continue;
        Path img = apply(pi, X.rep(m));
        if (equivalent(img, Path{e.src, {e.name}}, rw)) {
          out.edges[e.name][x] = X.tgt_of(m);
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace fql
