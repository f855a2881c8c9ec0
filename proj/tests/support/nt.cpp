#include "support/nt.hpp"

#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fql::testing {

namespace {

struct SearchTooLarge {};

struct Enumerator {
  const Instance& I;
  const Instance& J;
  bool bijective_only = false;

  // Flattened source rows in a fixed order, with their node.
  std::vector<std::pair<std::string, Id>> slots;
  std::map<Id, std::size_t> slot_of;
  std::vector<Id> assigned;      // image per slot, "" = not yet
  std::map<Id, int> used;        // target row -> times used (for bijections)
  std::vector<std::size_t> order;  // the slots this search ranges over
  long long hits = 0;
  long long steps = 0;
  long long step_limit = -1;  // negative: unlimited
  bool stop_at_first = false;
  bool found = false;

  explicit Enumerator(const Instance& i, const Instance& j) : I(i), J(j) {
    if (I.sig != J.sig) {
      throw std::invalid_argument("instances on different signature objects");
    }
    for (const auto& n : I.sig->nodes()) {
      for (const auto& x : I.nodes.at(n)) {
        slot_of[x] = slots.size();
        slots.emplace_back(n, x);
      }
    }
    assigned.resize(slots.size());
    order.resize(slots.size());
    std::iota(order.begin(), order.end(), 0);
  }

  bool image_known(const Id& x, Id& out) const {
    auto it = slot_of.find(x);
    if (it == slot_of.end()) return false;  // foreign id: invalid instance
    if (assigned[it->second].empty()) return false;
    out = assigned[it->second];
    return true;
  }

  // Every edge and attribute constraint touching slot k that is decidable
  // with the assignments made so far.
  bool consistent(std::size_t k) const {
    const auto& [node, x] = slots[k];
    const Id& hx = assigned[k];
    for (const auto& e : I.sig->edges()) {
      if (e.src == node) {
        Id target = I.edges.at(e.name).at(x);
        Id htarget;
        if (image_known(target, htarget)) {
          if (J.edges.at(e.name).at(hx) != htarget) return false;
        }
      }
      if (e.dst == node) {
        // x may be the image of already-assigned sources.
        for (const auto& [src_row, dst_row] : I.edges.at(e.name)) {
          if (dst_row != x) continue;
          Id hsrc;
          if (image_known(src_row, hsrc)) {
            if (J.edges.at(e.name).at(hsrc) != hx) return false;
          }
        }
      }
    }
    for (const auto& a : I.sig->attributes()) {
      if (a.node != node) continue;
      if (I.attrs.at(a.name).at(x) != J.attrs.at(a.name).at(hx)) return false;
    }
    return true;
  }

  void run(std::size_t k) {
    if (found && stop_at_first) return;
    if (k == order.size()) {
      ++hits;
      found = true;
      return;
    }
    const std::size_t slot = order[k];
    const auto& node = slots[slot].first;
    for (const auto& y : J.nodes.at(node)) {
      if (bijective_only && used.count(y) && used.at(y) > 0) continue;
      if (step_limit >= 0 && ++steps > step_limit) throw SearchTooLarge{};
      assigned[slot] = y;
      if (consistent(slot)) {
        ++used[y];
        run(k + 1);
        --used[y];
      }
      assigned[slot].clear();
      if (found && stop_at_first) return;
    }
  }
};

// Union-find over slots, joining the endpoints of every edge entry.  Edge
// and attribute constraints never cross components, so the map count is the
// product of the per-component counts.
std::vector<std::vector<std::size_t>> components(const Enumerator& en) {
  std::vector<std::size_t> parent(en.slots.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& [edge, fn] : en.I.edges) {
    for (const auto& [src_row, dst_row] : fn) {
      auto s = en.slot_of.find(src_row);
      auto d = en.slot_of.find(dst_row);
      if (s == en.slot_of.end() || d == en.slot_of.end()) continue;
      parent[find(s->second)] = find(d->second);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t i = 0; i < en.slots.size(); ++i) by_root[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : by_root) out.push_back(std::move(members));
  return out;
}

long long count_by_components(const Instance& I, const Instance& J,
                              long long step_limit) {
  Enumerator en(I, J);
  en.step_limit = step_limit;
  long long total = 1;
  for (const auto& comp : components(en)) {
    en.order = comp;
    en.hits = 0;
    en.found = false;
    en.run(0);
    total *= en.hits;
    if (total == 0) return 0;
  }
  return total;
}

}  // namespace

long long count_structure_maps(const Instance& I, const Instance& J) {
  return count_by_components(I, J, -1);
}

std::optional<long long> count_structure_maps_capped(const Instance& I,
                                                     const Instance& J,
                                                     long long step_limit) {
  try {
    return count_by_components(I, J, step_limit);
  } catch (const SearchTooLarge&) {
    return std::nullopt;
  }
}

bool iso_by_exhaustion(const Instance& I, const Instance& J) {
  if (I.sig != J.sig) {
    throw std::invalid_argument("instances on different signature objects");
  }
  for (const auto& n : I.sig->nodes()) {
    if (I.nodes.at(n).size() != J.nodes.at(n).size()) return false;
  }
  Enumerator en(I, J);
  en.bijective_only = true;
  en.stop_at_first = true;
  en.run(0);
  return en.found;
}

}  // namespace fql::testing
