#include "fql/instance.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace fql {

Instance empty_instance(SigPtr sig) {
  Instance I;
  I.sig = sig;
  for (const auto& n : sig->nodes()) I.nodes[n];
  for (const auto& e : sig->edges()) I.edges[e.name];
  for (const auto& a : sig->attributes()) I.attrs[a.name];
  return I;
}

ValidationReport validate(const Instance& I) {
  ValidationReport report;
  if (!I.sig) {
    report.add("instance", "no signature attached");
    return report;
  }
  const TypedSignature& sig = *I.sig;

  std::map<Id, std::string> owner;
  for (const auto& n : sig.nodes()) {
    auto it = I.nodes.find(n);
    if (it == I.nodes.end()) {
      report.add("tables", "missing node table '" + n + "'");
      continue;
    }
    for (const auto& id : it->second) {
      auto [at, inserted] = owner.insert({id, n});
      if (!inserted) {
        report.add("ids", "ID '" + id + "' appears in both '" + at->second +
                              "' and '" + n + "'");
      }
    }
  }
  for (const auto& [n, rows] : I.nodes) {
    if (!sig.graph().has_node(n)) {
      report.add("tables", "node table '" + n + "' has no node");
    }
    (void)rows;
  }

  auto row_set = [&](const std::string& node) {
    std::set<Id> out;
    auto it = I.nodes.find(node);
    if (it != I.nodes.end()) out.insert(it->second.begin(), it->second.end());
    return out;
  };

  for (const auto& e : sig.edges()) {
    auto it = I.edges.find(e.name);
    if (it == I.edges.end()) {
      report.add("tables", "missing edge table '" + e.name + "'");
      continue;
    }
    std::set<Id> dom = row_set(e.src);
    std::set<Id> cod = row_set(e.dst);
    for (const auto& [x, y] : it->second) {
      if (!dom.count(x)) {
        report.add("edges", "edge '" + e.name + "' defined at '" + x +
                                "' which is not a row of '" + e.src + "'");
      }
      if (!cod.count(y)) {
        report.add("edges", "edge '" + e.name + "' sends '" + x + "' to '" +
                                y + "' which is not a row of '" + e.dst + "'");
      }
    }
    for (const auto& x : dom) {
      if (!it->second.count(x)) {
        report.add("edges",
                   "edge '" + e.name + "' undefined at '" + x + "'");
      }
    }
  }
  for (const auto& [e, fn] : I.edges) {
    if (!sig.graph().has_edge(e)) {
      report.add("tables", "edge table '" + e + "' has no edge");
    }
    (void)fn;
  }

  for (const auto& a : sig.attributes()) {
    auto it = I.attrs.find(a.name);
    if (it == I.attrs.end()) {
      report.add("tables", "missing attribute table '" + a.name + "'");
      continue;
    }
    std::set<Id> dom = row_set(a.node);
    for (const auto& [x, v] : it->second) {
      if (!dom.count(x)) {
        report.add("attrs", "attribute '" + a.name + "' defined at '" + x +
                                "' which is not a row of '" + a.node + "'");
      }
      if (type_of(v) != a.type) {
        report.add("attrs", "attribute '" + a.name + "' at '" + x +
                                "' holds a " + to_string(type_of(v)) +
                                ", declared " + to_string(a.type));
      }
    }
    for (const auto& x : dom) {
      if (!it->second.count(x)) {
        report.add("attrs",
                   "attribute '" + a.name + "' undefined at '" + x + "'");
      }
    }
  }
  for (const auto& [a, fn] : I.attrs) {
    if (!sig.has_attribute(a)) {
      report.add("tables", "attribute table '" + a + "' has no attribute");
    }
    (void)fn;
  }

  if (!report.ok()) return report;

  for (const auto& [lhs, rhs] : sig.equations()) {
    auto rows = I.nodes.find(lhs.start);
    if (rows == I.nodes.end()) continue;
    for (const auto& x : rows->second) {
      Id a = eval_path(I, lhs, x);
      Id b = eval_path(I, rhs, x);
      if (a != b) {
        report.add("equations", "equation '" + render_path(lhs) + " = " +
                                    render_path(rhs) + "' fails at '" + x +
                                    "': '" + a + "' vs '" + b + "'");
      }
    }
  }
  return report;
}

Id eval_path(const Instance& I, const Path& p, const Id& x) {
  auto rows = I.nodes.find(p.start);
  if (rows == I.nodes.end() ||
      std::find(rows->second.begin(), rows->second.end(), x) ==
          rows->second.end()) {
    throw UnknownIdError("'" + x + "' is not a row of '" + p.start + "'");
  }
  Id at = x;
  for (const auto& e : p.edges) {
    auto fn = I.edges.find(e);
    if (fn == I.edges.end()) {
      throw InstanceError("no table for edge '" + e + "'");
    }
    auto it = fn->second.find(at);
    if (it == fn->second.end()) {
      throw UnknownIdError("edge '" + e + "' undefined at '" + at + "'");
    }
    at = it->second;
  }
  return at;
}

Value eval_attr(const Instance& I, const std::string& attr, const Id& x) {
  auto fn = I.attrs.find(attr);
  if (fn == I.attrs.end()) {
    throw InstanceError("no table for attribute '" + attr + "'");
  }
  auto it = fn->second.find(x);
  if (it == fn->second.end()) {
    throw UnknownIdError("attribute '" + attr + "' undefined at '" + x + "'");
  }
  return it->second;
}

bool same_shape(const TypedSignature& a, const TypedSignature& b) {
  if (a.nodes() != b.nodes()) return false;
  const auto& ea = a.edges();
  const auto& eb = b.edges();
  if (ea.size() != eb.size()) return false;
  for (size_t i = 0; i < ea.size(); ++i) {
    if (ea[i].name != eb[i].name || ea[i].src != eb[i].src ||
        ea[i].dst != eb[i].dst) {
      return false;
    }
  }
  if (a.equations() != b.equations()) return false;
  const auto& aa = a.attributes();
  const auto& ab = b.attributes();
  if (aa.size() != ab.size()) return false;
  for (size_t i = 0; i < aa.size(); ++i) {
    if (aa[i].name != ab[i].name || aa[i].node != ab[i].node ||
        aa[i].type != ab[i].type) {
      return false;
    }
  }
  return true;
}

Instance rehome(const Instance& I, SigPtr sig) {
  if (!same_shape(*I.sig, *sig)) {
    throw InstanceError("cannot rehome an instance across different shapes");
  }
  Instance out = I;
  out.sig = sig;
  return out;
}

namespace {

// Invariant colors: start from (node, attribute values), then repeatedly
// fold in the colors reachable through one edge step, forward and
// backward. Isomorphic IDs always end up with equal colors. Both instances
// are colored together so the per-round shortening dictionary is shared —
// shortened colors stay comparable across the two.
std::pair<std::map<Id, std::string>, std::map<Id, std::string>> color_ids(
    const Instance& I, const Instance& J, int rounds) {
  auto base_colors = [](const Instance& K) {
    std::map<Id, std::string> color;
    for (const auto& [node, rows] : K.nodes) {
      for (const auto& x : rows) {
        std::ostringstream c;
        c << node;
        for (const auto& a : K.sig->attributes_of(node)) {
          c << "|" << a.name << "=" << render_value(eval_attr(K, a.name, x));
        }
        color[x] = c.str();
      }
    }
    return color;
  };
  auto ci = base_colors(I);
  auto cj = base_colors(J);
  for (int r = 0; r < rounds; ++r) {
    std::map<std::string, int> dictionary;
    auto shorten = [&](const std::string& long_color) {
      auto [it, fresh] = dictionary.insert(
          {long_color, static_cast<int>(dictionary.size())});
      (void)fresh;
      return it->second;
    };
    auto refine = [&](const Instance& K, std::map<Id, std::string>& color) {
      std::map<Id, std::vector<std::pair<std::string, Id>>> incoming;
      for (const auto& [e, fn] : K.edges) {
        for (const auto& [x, y] : fn) incoming[y].push_back({e, x});
      }
      std::map<Id, std::string> next;
      for (const auto& [x, base] : color) {
        std::ostringstream c;
        c << base;
        for (const auto& [e, fn] : K.edges) {
          auto it = fn.find(x);
          if (it != fn.end()) c << "|>" << e << ":" << color.at(it->second);
        }
        std::vector<std::string> in;
        for (const auto& [e, y] : incoming[x]) {
          in.push_back(e + ":" + color.at(y));
        }
        std::sort(in.begin(), in.end());
        for (const auto& s : in) c << "|<" << s;
        next[x] = c.str();
      }
      color = std::move(next);
    };
    refine(I, ci);
    refine(J, cj);
    // Shorten through the shared dictionary, in a fixed interleaving.
    for (auto* c : {&ci, &cj}) {
      for (auto& [x, col] : *c) col = std::to_string(shorten(col));
    }
  }
  return {std::move(ci), std::move(cj)};
}

}  // namespace

std::optional<InstanceIso> isomorphic(const Instance& I, const Instance& J) {
  if (!same_shape(*I.sig, *J.sig)) {
    throw InstanceError("isomorphism check across different signatures");
  }
  for (const auto& [node, rows] : I.nodes) {
    if (rows.size() != J.nodes.at(node).size()) return std::nullopt;
  }

  const int kRefineRounds = 3;
  auto [ci, cj] = color_ids(I, J, kRefineRounds);

  // Candidates per I-row: J-rows of the same node and color.
  std::vector<Id> order;
  std::map<Id, std::vector<Id>> candidates;
  for (const auto& [node, rows] : I.nodes) {
    const auto& jrows = J.nodes.at(node);
    for (const auto& x : rows) {
      std::vector<Id> cand;
      for (const auto& y : jrows) {
        if (ci.at(x) == cj.at(y)) cand.push_back(y);
      }
      if (cand.empty()) return std::nullopt;
      candidates[x] = std::move(cand);
      order.push_back(x);
    }
  }
  std::sort(order.begin(), order.end(), [&](const Id& a, const Id& b) {
    return candidates[a].size() < candidates[b].size();
  });

  std::map<Id, Id> forward;
  std::set<Id> used;

  // Attribute equality is folded into colors already; edges are checked as
  // soon as both endpoints are assigned.
  std::function<bool(size_t)> assign = [&](size_t k) {
    if (k == order.size()) return true;
    const Id& x = order[k];
    for (const auto& y : candidates[x]) {
      if (used.count(y)) continue;
      bool ok = true;
      for (const auto& [e, fn] : I.edges) {
        auto it = fn.find(x);
        if (it != fn.end()) {
          auto img = forward.find(it->second);
          if (img != forward.end() && J.edges.at(e).at(y) != img->second) {
            ok = false;
            break;
          }
        }
        for (const auto& [w, z] : fn) {
          if (z != x) continue;
          auto img = forward.find(w);
          if (img != forward.end() && J.edges.at(e).at(img->second) != y) {
            ok = false;
            break;
          }
        }
        if (!ok) break;
      }
      if (!ok) continue;
      forward[x] = y;
      used.insert(y);
      if (assign(k + 1)) return true;
      forward.erase(x);
      used.erase(y);
    }
    return false;
  };

  if (!assign(0)) return std::nullopt;
  return InstanceIso{std::move(forward)};
}

Instance rekey(const Instance& I, KeyGen& keys) {
  std::map<Id, Id> fresh;
  Instance out;
  out.sig = I.sig;
  for (const auto& node : I.sig->nodes()) {
    auto it = I.nodes.find(node);
    if (it == I.nodes.end()) continue;
    auto& rows = out.nodes[node];
    for (const auto& x : it->second) {
      fresh[x] = keys.fresh();
      rows.push_back(fresh[x]);
    }
  }
  for (const auto& [e, fn] : I.edges) {
    auto& table = out.edges[e];
    for (const auto& [x, y] : fn) table[fresh.at(x)] = fresh.at(y);
  }
  for (const auto& [a, fn] : I.attrs) {
    auto& table = out.attrs[a];
    for (const auto& [x, v] : fn) table[fresh.at(x)] = v;
  }
  return out;
}

}  // namespace fql
