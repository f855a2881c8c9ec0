#include <set>
#include <utility>

#include "fql/query.hpp"

namespace fql {

namespace {

FiniteCategory sat_or_throw(SigPtr sig, int fuel, const std::string& role) {
  auto cat = saturate(sig, fuel);
  if (!cat) {
    throw FinitenessUnknownError("could not enumerate all morphisms of the " +
                                 role + " within fuel; result unknown");
  }
  return std::move(*cat);
}

template <typename Fn>
auto staged(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const BudgetExceededError& e) {
    throw BudgetExceededError(std::string("query composition, ") + stage +
                              ": " + e.what());
  }
}

TypedSignatureMorphism stripped(const TypedSignatureMorphism& f, SigPtr src,
                                SigPtr tgt) {
  TypedSignatureMorphism out;
  out.source = std::move(src);
  out.target = std::move(tgt);
  out.node_map = f.node_map;
  out.edge_map = f.edge_map;
  return out;
}

}  // namespace

// The composite is assembled in stages:
//   1. join the union leg of `inner` with the pullback leg of `outer` over
//      their shared signature (a fiber product A' with projections s, k);
//      pulling back along outer's leg after pushing along inner's equals
//      pushing along k after pulling along s;
//   2. push the fibres of k right along outer's limit leg: the fibre
//      instance P of k moves across, and its two tables of elements give a
//      signature M over outer's middle (projection w) and a signature D'
//      over outer's start (legs q : D' -> M and, via the limit components,
//      c : D' -> inner's middle), turning "limit after union" into
//      "union after limit after pullback";
//   3. re-express "pullback along c after limit along inner's leg" through
//      the comma B' of c over that leg (legs r, m), which leaves exactly
//      one pullback (m then inner's), one limit (r then q), and one union
//      (w then outer's).
Query compose_queries(const Query& outer, const Query& inner,
                      const EvalOptions& opts) {
  require_valid(inner, "inner factor of a composition", opts.fuel,
                PiReadiness::Strict);
  require_valid(outer, "outer factor of a composition", opts.fuel,
                PiReadiness::Strict);

  TypedSignatureMorphism u = outer.delta_leg;
  if (inner.sigma_leg.target != u.target) {
    if (!same_shape(*inner.sigma_leg.target, *u.target)) {
      throw QueryError(
          "cannot compose: the inner query's target signature differs from "
          "the outer query's source signature");
    }
    u.target = inner.sigma_leg.target;
  }
  const TypedSignatureMorphism& t = inner.sigma_leg;  // V1 -> T
  const TypedSignatureMorphism& g = outer.pi_leg;     // U2 -> V2

  // --- stage 1: joined middle A' with s : A' -> V1 and k : A' -> U2.
  FiberProductResult fp = staged("joining the middle signatures", [&] {
    return fiber_product(t, u, opts.fuel, opts.budget);
  });
  const TypedSignatureMorphism& s = fp.to_left;
  const TypedSignatureMorphism& k = fp.to_right;

  // --- stage 2: push the fibres of k right along g, structurally.
  SigPtr a_s = strip_attributes(fp.sig);
  SigPtr u2_s = strip_attributes(u.source);
  SigPtr v2_s = strip_attributes(g.target);
  TypedSignatureMorphism k_s = stripped(k, a_s, u2_s);
  TypedSignatureMorphism g_s = stripped(g, u2_s, v2_s);

  Instance dk = degrothendieck(k_s, opts.fuel);
  KeyGen pk(0);
  PiDetail pd = staged("pushing the fibres right", [&] {
    return pi_detailed(g_s, dk, pk, opts.fuel, PiReadiness::Strict,
                       opts.budget);
  });
  size_t prows = 0;
  for (const auto& [v, rows] : pd.result.nodes) prows += rows.size();
  if (prows > opts.budget.max_nodes) {
    throw BudgetExceededError(
        "query composition, pushed-fibre instance: " + std::to_string(prows) +
        " rows, over the configured budget");
  }

  GrothendieckResult ms = grothendieck(pd.result, false, opts.fuel);
  Instance dp = delta_shared_ids(g_s, pd.result);
  GrothendieckResult ds = grothendieck(dp, false, opts.fuel);

  // Shared attribute vocabulary for D' and M: one name per (D' node, base
  // attribute at its underlying node), anchored at the node itself on the
  // D' side and at its q-image on the M side. Sharing the names verbatim is
  // what makes the limit leg of the result strict.
  std::set<std::string> used;
  for (const auto& n : ms.sig->nodes()) used.insert(n);
  for (const auto& e : ms.sig->edges()) used.insert(e.name);
  for (const auto& n : ds.sig->nodes()) used.insert(n);
  for (const auto& e : ds.sig->edges()) used.insert(e.name);
  auto fresh_name = [&used](const std::string& raw) {
    std::string base = NameMint::sanitize(raw);
    std::string cand = base;
    int n = 2;
    while (!used.insert(cand).second) cand = base + "_" + std::to_string(n++);
    return cand;
  };

  struct SharedAttr {
    std::string z;     // D' node
    std::string base;  // attribute of U2 at the underlying node
  };
  std::vector<AttrDecl> dattrs, mattrs;
  std::map<std::string, SharedAttr> shared;
  std::map<std::string, std::string> wmap, qmap;
  for (const auto& z : ds.sig->nodes()) {
    const auto& obj = ds.objects.at(z);  // (U2 node d, P row r)
    const std::string& mnode = ms.name_of.at(
        GrothendieckResult::obj_key(g.node_map.at(obj.node), obj.row));
    for (const auto& th : u.source->attributes_of(obj.node)) {
      std::string nm = fresh_name(z + "__" + th.name);
      dattrs.push_back({nm, z, th.type});
      mattrs.push_back({nm, mnode, th.type});
      shared[nm] = {z, th.name};
      wmap[nm] = th.name;
      qmap[nm] = nm;
    }
  }
  SigPtr dsig = with_attributes(ds.sig, dattrs);
  SigPtr msig = with_attributes(ms.sig, mattrs);

  TypedSignatureMorphism w;  // M -> V2
  w.source = msig;
  w.target = g.target;
  w.node_map = ms.proj.node_map;
  w.edge_map = ms.proj.edge_map;
  w.attr_map = wmap;
  require_valid(w, "table-of-elements projection of the pushed fibres");

  // Inverse edge lookup in M: (base edge of V2, source row) -> edge name.
  std::map<std::string, std::string> medge;
  for (const auto& [nm, origin] : ms.edge_origin) {
    medge[GrothendieckResult::obj_key(origin.first, origin.second)] = nm;
  }

  TypedSignatureMorphism q;  // D' -> M
  q.source = dsig;
  q.target = msig;
  for (const auto& [z, obj] : ds.objects) {
    q.node_map[z] = ms.name_of.at(
        GrothendieckResult::obj_key(g.node_map.at(obj.node), obj.row));
  }
  for (const auto& [en, origin] : ds.edge_origin) {
    const Path& gp = g.edge_map.at(origin.first);  // image path in V2
    Path img{q.node_map.at(ds.sig->graph().edge(en).src), {}};
    Id cur = origin.second;
    for (const auto& eta : gp.edges) {
      img.edges.push_back(
          medge.at(GrothendieckResult::obj_key(eta, cur)));
      cur = pd.result.edges.at(eta).at(cur);
    }
    q.edge_map[en] = std::move(img);
  }
  q.attr_map = qmap;
  require_valid(q, "comparison of the two tables of elements");

  // Counit components: which A' row a pushed-fibre row reads back at each
  // U2 node, i.e. its limit column at the identity object of the comma.
  std::map<std::string, Id> component;  // obj_key(U2 node, P row) -> A' node
  for (const auto& d : u.source->nodes()) {
    const std::string& v = g.node_map.at(d);
    const PiDetail::PerNode& pn = pd.nodes.at(v);
    const std::string& col_name = pn.cm.name_of.at(CommaResult::obj_key(
        "pt", d, pn.cm.target_cat->identity(v)));
    size_t col = 0;
    while (pn.lt.columns[col] != col_name) ++col;
    for (size_t i = 0; i < pn.ids.size(); ++i) {
      component[GrothendieckResult::obj_key(d, pn.ids[i])] =
          pn.lt.rows[i][col];
    }
  }

  FiniteCategory acat = sat_or_throw(fp.sig, opts.fuel, "joined middle");
  const RewriteSystem& u2rw = u.source->rewrite();

  TypedSignatureMorphism c;  // D' -> V1, through the counit
  c.source = dsig;
  c.target = t.source;
  std::map<std::string, Id> cnode_comp;  // D' node -> its A' component
  for (const auto& [z, obj] : ds.objects) {
    const Id& x =
        component.at(GrothendieckResult::obj_key(obj.node, obj.row));
    cnode_comp[z] = x;
    c.node_map[z] = s.node_map.at(x);
  }
  for (const auto& [en, origin] : ds.edge_origin) {
    const EdgeDecl& eps = u.source->graph().edge(origin.first);
    const Id& x = cnode_comp.at(ds.sig->graph().edge(en).src);
    bool found = false;
    for (int mu : acat.from(x)) {
      if (k.node_map.at(acat.tgt_of(mu)) != eps.dst) continue;
      if (!equivalent(apply(k, acat.rep(mu)), Path{eps.src, {eps.name}},
                      u2rw)) {
        continue;
      }
      c.edge_map[en] = apply(s, acat.rep(mu));
      found = true;
      break;
    }
    if (!found) {
      throw QueryError(
          "query composition: no lifting of edge '" + eps.name +
          "' at a joined-middle row despite the join being edge-lifting");
    }
  }
  for (const auto& [nm, sa] : shared) {
    const Id& x = cnode_comp.at(sa.z);
    const std::string& a = s.node_map.at(x);
    const std::string& timg = u.attr_map.at(sa.base);
    bool found = false;
    for (const auto& al : t.source->attributes_of(a)) {
      if (t.attr_map.at(al.name) == timg) {
        c.attr_map[nm] = al.name;
        found = true;
        break;
      }
    }
    if (!found) {
      throw QueryError(
          "query composition: no attribute over '" + timg +
          "' at a joined-middle row despite the union leg being "
          "attribute-bijective");
    }
  }
  require_valid(c, "counit comparison into the inner middle");

  // --- stage 3: trade "pull back along c, then limit" for "limit, then
  // pull back", through the comma of c over the inner limit leg.
  CommaResult bp = staged("re-expressing the pulled limits", [&] {
    return comma(c, inner.pi_leg, true, opts.fuel, opts.budget);
  });

  Query out;
  out.delta_leg = compose(bp.to_right, inner.delta_leg);
  out.pi_leg = compose(bp.to_left, q);
  out.sigma_leg = compose(w, outer.sigma_leg);
  require_valid(out, "composite query", opts.fuel, PiReadiness::Strict);
  return out;
}

}  // namespace fql
