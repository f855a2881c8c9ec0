#include "fql/migrate.hpp"

#include <algorithm>
#include <functional>
#include <utility>

namespace fql {

namespace {

void require_on(const Instance& I, SigPtr sig, const char* what) {
  if (I.sig != sig && !same_shape(*I.sig, *sig)) {
    throw InstanceError(std::string("the ") + what +
                        " lives on a different signature than the functor "
                        "expects");
  }
}

FiniteCategory sat_or_throw(SigPtr sig, int fuel, const std::string& role) {
  auto cat = saturate(sig, fuel);
  if (!cat) {
    throw FinitenessUnknownError("could not enumerate all morphisms of the " +
                                 role + " within fuel; result unknown");
  }
  return std::move(*cat);
}

// The unique morphism out of c whose image presents the single target edge;
// existence and uniqueness are what the edge-lifting check certifies.
Path unique_lift(const TypedSignatureMorphism& F, const FiniteCategory& S,
                 const std::string& c, const EdgeDecl& eps) {
  const RewriteSystem& rw = F.target->rewrite();
  for (int m : S.from(c)) {
    if (F.node_map.at(S.tgt_of(m)) != eps.dst) continue;
    if (equivalent(apply(F, S.rep(m)), Path{eps.src, {eps.name}}, rw)) {
      return S.rep(m);
    }
  }
  throw MorphismError("no lifting of edge '" + eps.name + "' at node '" + c +
                      "' despite the lifting check passing");
}

std::string observation_key(const Instance& I, const FiniteCategory& cat,
                            const std::string& node, const Id& x) {
  std::string obs;
  for (int m : cat.from(node)) {
    Id y = eval_path(I, cat.rep(m), x);
    for (const auto& th : I.sig->attributes_of(cat.tgt_of(m))) {
      const Value& v = I.attrs.at(th.name).at(y);
      std::string rv = render_value(v);
      obs += th.name;
      obs += '\x1e';
      obs += to_string(type_of(v));
      obs += ':';
      obs += std::to_string(rv.size());
      obs += ':';
      obs += rv;
      obs += '\x1f';
    }
    obs += '\x1d';
  }
  return obs;
}

}  // namespace

Instance delta(const TypedSignatureMorphism& F, const Instance& I,
               KeyGen& keys) {
  require_valid(F, "pullback functor");
  require_on(I, F.target, "pullback input");
  Instance out = empty_instance(F.source);
  std::map<std::string, std::map<Id, Id>> fresh;  // source node -> old -> new
  for (const auto& a : F.source->nodes()) {
    for (const Id& x : I.nodes.at(F.node_map.at(a))) {
      Id nx = keys.fresh();
      fresh[a][x] = nx;
      out.nodes[a].push_back(nx);
    }
  }
  for (const auto& e : F.source->edges()) {
    const Path& img = F.edge_map.at(e.name);
    for (const Id& x : I.nodes.at(F.node_map.at(e.src))) {
      out.edges[e.name][fresh.at(e.src).at(x)] =
          fresh.at(e.dst).at(eval_path(I, img, x));
    }
  }
  for (const auto& th : F.source->attributes()) {
    const auto& img = F.attr_map.at(th.name);
    for (const Id& x : I.nodes.at(F.node_map.at(th.node))) {
      out.attrs[th.name][fresh.at(th.node).at(x)] = I.attrs.at(img).at(x);
    }
  }
  return out;
}

Instance delta_shared_ids(const TypedSignatureMorphism& F, const Instance& I) {
  require_valid(F, "pullback functor");
  require_on(I, F.target, "pullback input");
  Instance out = empty_instance(F.source);
  for (const auto& a : F.source->nodes()) {
    out.nodes[a] = I.nodes.at(F.node_map.at(a));
  }
  for (const auto& e : F.source->edges()) {
    const Path& img = F.edge_map.at(e.name);
    for (const Id& x : I.nodes.at(F.node_map.at(e.src))) {
      out.edges[e.name][x] = eval_path(I, img, x);
    }
  }
  for (const auto& th : F.source->attributes()) {
    const auto& img = F.attr_map.at(th.name);
    for (const Id& x : I.nodes.at(F.node_map.at(th.node))) {
      out.attrs[th.name][x] = I.attrs.at(img).at(x);
    }
  }
  return out;
}

Instance sigma(const TypedSignatureMorphism& F, const Instance& I, int fuel) {
  MorphismProfile prof = profile(F, fuel);
  if (!prof.is_dop) {
    throw NotOpFibrationError(
        "pushforward needs unique edge liftings along the functor");
  }
  if (!prof.is_sigma_ready) {
    throw NotSigmaReadyError(
        "pushforward needs node-wise bijective attribute transport along "
        "the functor");
  }
  require_on(I, F.source, "pushforward input");
  FiniteCategory S = sat_or_throw(F.source, fuel, "pushforward source");

  Instance out = empty_instance(F.target);
  for (const auto& c : F.source->nodes()) {
    auto& rows = out.nodes[F.node_map.at(c)];
    for (const Id& x : I.nodes.at(c)) rows.push_back(x);
  }
  for (const auto& eps : F.target->edges()) {
    for (const auto& c : F.source->nodes()) {
      if (F.node_map.at(c) != eps.src) continue;
      Path lift = unique_lift(F, S, c, eps);
      for (const Id& x : I.nodes.at(c)) {
        out.edges[eps.name][x] = eval_path(I, lift, x);
      }
    }
  }
  for (const auto& A : F.target->attributes()) {
    for (const auto& c : F.source->nodes()) {
      if (F.node_map.at(c) != A.node) continue;
      for (const auto& th : F.source->attributes_of(c)) {
        if (F.attr_map.at(th.name) != A.name) continue;
        for (const Id& x : I.nodes.at(c)) {
          out.attrs[A.name][x] = I.attrs.at(th.name).at(x);
        }
        break;
      }
    }
  }
  return out;
}

LimitTable limit_table(const CommaResult& cm, const Instance& I) {
  LimitTable out;
  out.columns = cm.sig->nodes();
  std::map<std::string, int> ix;
  for (size_t i = 0; i < out.columns.size(); ++i) {
    out.column_node.push_back(cm.objects.at(out.columns[i]).right);
    ix[out.columns[i]] = static_cast<int>(i);
  }
  struct Con {
    int src, dst;
    const Path* path;
  };
  // Each comma edge constrains a choice; checking an edge as soon as both
  // endpoints are assigned keeps the search tree small.
  std::vector<std::vector<Con>> at_step(out.columns.size());
  for (const auto& e : cm.sig->edges()) {
    int s = ix.at(e.src), t = ix.at(e.dst);
    at_step[std::max(s, t)].push_back(
        {s, t, &cm.to_right.edge_map.at(e.name)});
  }
  std::vector<Id> current(out.columns.size());
  std::function<void(size_t)> rec = [&](size_t k) {
    if (k == current.size()) {
      out.rows.push_back(current);
      return;
    }
    for (const Id& x : I.nodes.at(out.column_node[k])) {
      current[k] = x;
      bool ok = true;
      for (const auto& con : at_step[k]) {
        if (eval_path(I, *con.path, current[con.src]) != current[con.dst]) {
          ok = false;
          break;
        }
      }
      if (ok) rec(k + 1);
    }
  };
  rec(0);
  std::sort(out.rows.begin(), out.rows.end());
  return out;
}

Instance pi(const TypedSignatureMorphism& F, const Instance& I, KeyGen& keys,
            int fuel, PiReadiness readiness, const CatBudget& budget) {
  return pi_detailed(F, I, keys, fuel, readiness, budget).result;
}

static PiDetail pi_detailed_impl(const TypedSignatureMorphism& F,
                                 const Instance& I, KeyGen& keys, int fuel,
                                 PiReadiness readiness,
                                 const CatBudget& budget) {
  MorphismProfile prof = profile(F, fuel, readiness);
  if (!prof.is_pi_ready) {
    throw NotPiReadyError(
        "pointwise right adjoint needs attribute sets lining up along the "
        "functor");
  }
  require_on(I, F.source, "input instance");
  FiniteCategory C = sat_or_throw(F.target, fuel, "target signature");

  struct NodeData {
    CommaResult cm;
    LimitTable lt;
    std::vector<Id> ids;
    std::map<std::vector<Id>, Id> id_of_row;
    std::map<std::string, int> col_ix;
    // key: source node + '\x1f' + morphism index in C -> comma node name
    std::map<std::string, std::string> col_of_pair;
  };
  auto pair_key = [](const std::string& c, int m) {
    return c + '\x1f' + std::to_string(m);
  };

  Instance out = empty_instance(F.target);
  std::map<std::string, NodeData> data;
  for (const auto& d : F.target->nodes()) {
    NodeData nd;
    nd.cm = comma_from_object(d, F, fuel, budget);
    nd.lt = limit_table(nd.cm, I);
    for (size_t i = 0; i < nd.lt.columns.size(); ++i) {
      nd.col_ix[nd.lt.columns[i]] = static_cast<int>(i);
    }
    for (const auto& [nm, obj] : nd.cm.objects) {
      int ci = C.morphism_of(nd.cm.target_cat->rep(obj.gamma));
      nd.col_of_pair[pair_key(obj.right, ci)] = nm;
    }
    for (const auto& row : nd.lt.rows) {
      Id id = keys.fresh();
      nd.ids.push_back(id);
      nd.id_of_row[row] = id;
      out.nodes[d].push_back(id);
    }
    data.emplace(d, std::move(nd));
  }

  for (const auto& eps : F.target->edges()) {
    const NodeData& src_nd = data.at(eps.src);
    const NodeData& dst_nd = data.at(eps.dst);
    int eps_m = C.morphism_of(Path{eps.src, {eps.name}});
    // Restricting a choice along eps: the column of a target-side comma
    // object reads the source-side column of its eps-precomposition.
    std::vector<int> read_from(dst_nd.lt.columns.size());
    for (size_t j = 0; j < dst_nd.lt.columns.size(); ++j) {
      const auto& obj = dst_nd.cm.objects.at(dst_nd.lt.columns[j]);
      int cj = C.morphism_of(dst_nd.cm.target_cat->rep(obj.gamma));
      int combined = C.compose(eps_m, cj);
      read_from[j] = src_nd.col_ix.at(
          src_nd.col_of_pair.at(pair_key(obj.right, combined)));
    }
    for (size_t r = 0; r < src_nd.lt.rows.size(); ++r) {
      std::vector<Id> image(dst_nd.lt.columns.size());
      for (size_t j = 0; j < image.size(); ++j) {
        image[j] = src_nd.lt.rows[r][read_from[j]];
      }
      out.edges[eps.name][src_nd.ids[r]] = dst_nd.id_of_row.at(image);
    }
  }

  for (const auto& A : F.target->attributes()) {
    const NodeData& nd = data.at(A.node);
    std::string src_attr;
    for (const auto& th : F.source->attributes()) {
      if (F.attr_map.at(th.name) == A.name) {
        src_attr = th.name;
        break;
      }
    }
    const auto& u = F.source->attribute(src_attr).node;
    int col = nd.col_ix.at(
        nd.col_of_pair.at(pair_key(u, C.identity(A.node))));
    for (size_t r = 0; r < nd.lt.rows.size(); ++r) {
      out.attrs[A.name][nd.ids[r]] =
          I.attrs.at(src_attr).at(nd.lt.rows[r][col]);
    }
  }

  PiDetail detail;
  detail.result = std::move(out);
  for (auto& [d, nd] : data) {
    detail.nodes[d] =
        PiDetail::PerNode{std::move(nd.cm), std::move(nd.lt),
                          std::move(nd.ids)};
  }
  return detail;
}

// Anything the limit machinery cannot prove finite within fuel is grounds
// to refuse: the pointwise limit could have infinitely many rows.
PiDetail pi_detailed(const TypedSignatureMorphism& F, const Instance& I,
                     KeyGen& keys, int fuel, PiReadiness readiness,
                     const CatBudget& budget) {
  try {
    return pi_detailed_impl(F, I, keys, fuel, readiness, budget);
  } catch (const InfiniteTargetError&) {
    throw;
  } catch (const FinitenessUnknownError& e) {
    throw InfiniteTargetError(std::string("refusing the pointwise limit: ") +
                              e.what());
  }
}

Instance relationalize(const Instance& I, int fuel) {
  auto report = validate(I);
  if (!report.ok()) {
    throw InstanceError("observable quotient of an invalid instance:\n" +
                        report.to_string());
  }
  FiniteCategory cat = sat_or_throw(I.sig, fuel, "instance signature");
  Instance out = empty_instance(I.sig);
  std::map<Id, Id> repr;
  for (const auto& c : I.sig->nodes()) {
    std::map<std::string, Id> classes;
    for (const Id& x : I.nodes.at(c)) {
      auto [it, inserted] =
          classes.emplace(observation_key(I, cat, c, x), x);
      repr[x] = it->second;
      if (inserted) out.nodes[c].push_back(x);
    }
  }
  for (const auto& e : I.sig->edges()) {
    for (const Id& x : out.nodes.at(e.src)) {
      out.edges[e.name][x] = repr.at(I.edges.at(e.name).at(x));
    }
  }
  for (const auto& th : I.sig->attributes()) {
    for (const Id& x : out.nodes.at(th.node)) {
      out.attrs[th.name][x] = I.attrs.at(th.name).at(x);
    }
  }
  return out;
}

Instance coproduct_instance(const Instance& I, const Instance& J,
                            KeyGen& keys, int fuel) {
  const Instance* right = &J;
  Instance rehomed;
  if (I.sig != J.sig) {
    if (!same_shape(*I.sig, *J.sig)) {
      throw InstanceError(
          "a disjoint union needs both instances on the same signature");
    }
    rehomed = rehome(J, I.sig);
    right = &rehomed;
  }
  Instance a = rekey(I, keys);
  Instance b = rekey(*right, keys);
  CoproductResult cp = coproduct(I.sig, I.sig, fuel);
  Instance K = empty_instance(cp.sig);
  for (const auto& [c, t] : cp.left_node) K.nodes[t] = a.nodes.at(c);
  for (const auto& [c, t] : cp.right_node) K.nodes[t] = b.nodes.at(c);
  for (const auto& [e, t] : cp.left_edge) K.edges[t] = a.edges.at(e);
  for (const auto& [e, t] : cp.right_edge) K.edges[t] = b.edges.at(e);
  for (const auto& [x, t] : cp.left_attr) K.attrs[t] = a.attrs.at(x);
  for (const auto& [x, t] : cp.right_attr) K.attrs[t] = b.attrs.at(x);
  return sigma(coproduct_fold(cp), K, fuel);
}

}  // namespace fql
