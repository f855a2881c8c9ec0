#include "fql/category.hpp"

#include <algorithm>

namespace fql {

int FiniteCategory::identity(const std::string& node) const {
  auto it = identity_.find(node);
  if (it == identity_.end()) {
    throw SignatureError("unknown node '" + node + "'");
  }
  return it->second;
}

int FiniteCategory::morphism_of(const Path& p) const {
  Path n = normalize(p, sig_->rewrite());
  auto it = by_key_.find(path_key(n));
  if (it == by_key_.end()) {
    throw SignatureError("path '" + render_path(p) +
                         "' does not normalize into the enumerated category");
  }
  return it->second;
}

int FiniteCategory::compose(int f, int g) const {
  int out = comp_[f][g];
  if (out < 0) {
    throw SignatureError("morphisms do not compose");
  }
  return out;
}

const std::vector<int>& FiniteCategory::from(const std::string& node) const {
  static const std::vector<int> empty;
  auto it = from_.find(node);
  return it == from_.end() ? empty : it->second;
}

std::vector<int> FiniteCategory::hom(const std::string& src,
                                     const std::string& tgt) const {
  std::vector<int> out;
  for (int m : from(src)) {
    if (tgts_[m] == tgt) out.push_back(m);
  }
  return out;
}

bool FiniteCategory::well_formed() const {
  int n = static_cast<int>(reps_.size());
  for (int f = 0; f < n; ++f) {
    int id_src = identity(src_of(f));
    int id_tgt = identity(tgt_of(f));
    if (compose(id_src, f) != f || compose(f, id_tgt) != f) return false;
    for (int g = 0; g < n; ++g) {
      if (tgt_of(f) != src_of(g)) continue;
      int fg = compose(f, g);
      for (int h = 0; h < n; ++h) {
        if (tgt_of(g) != src_of(h)) continue;
        if (compose(fg, h) != compose(f, compose(g, h))) return false;
      }
    }
  }
  return true;
}

std::optional<FiniteCategory> saturate(SigPtr sig, int fuel,
                                       size_t max_morphisms) {
  if (!sig->complete()) {
    throw IncompleteSystemError(
        "cannot enumerate a category over an incomplete rewrite system");
  }
  const RewriteSystem& rs = sig->rewrite();
  const Graph& graph = sig->graph();

  // A contiguous subword of an irreducible path is irreducible, so level n
  // candidates are exactly one-edge extensions of level n-1 survivors, and
  // a candidate is irreducible iff no lhs matches a suffix ending at its
  // last edge.
  auto extension_irreducible = [&](const std::vector<std::string>& edges) {
    for (const auto& rule : rs.rules) {
      const auto& lhs = rule.lhs.edges;
      if (lhs.size() > edges.size()) continue;
      if (std::equal(lhs.begin(), lhs.end(), edges.end() - lhs.size())) {
        return false;
      }
    }
    return true;
  };

  FiniteCategory cat;
  cat.sig_ = sig;

  std::map<std::string, std::vector<std::string>> out_edges;
  for (const auto& e : graph.edges()) {
    out_edges[e.src].push_back(e.name);
  }

  std::vector<Path> level;
  for (const auto& node : graph.nodes()) {
    level.push_back(Path{node, {}});
  }

  int levels_used = 0;
  while (!level.empty()) {
    if (levels_used > fuel) return std::nullopt;
    ++levels_used;
    std::vector<Path> next;
    for (const auto& p : level) {
      cat.by_key_[path_key(p)] = static_cast<int>(cat.reps_.size());
      cat.reps_.push_back(p);
      cat.tgts_.push_back(graph.target_of(p));
      if (cat.reps_.size() > max_morphisms) return std::nullopt;
      auto it = out_edges.find(cat.tgts_.back());
      if (it == out_edges.end()) continue;
      for (const auto& e : it->second) {
        Path ext = p;
        ext.edges.push_back(e);
        if (extension_irreducible(ext.edges)) next.push_back(ext);
      }
    }
    level = std::move(next);
  }

  int n = static_cast<int>(cat.reps_.size());
  for (int m = 0; m < n; ++m) {
    if (cat.reps_[m].trivial()) {
      cat.identity_[cat.reps_[m].start] = m;
    }
    cat.from_[cat.reps_[m].start].push_back(m);
  }
  cat.comp_.assign(n, std::vector<int>(n, -1));
  for (int f = 0; f < n; ++f) {
    for (int g = 0; g < n; ++g) {
      if (cat.tgts_[f] != cat.reps_[g].start) continue;
      Path joined = concat(cat.reps_[f], cat.reps_[g]);
      Path norm = normalize(joined, rs);
      cat.comp_[f][g] = cat.by_key_.at(path_key(norm));
    }
  }
  return cat;
}

bool is_acyclic(const TypedSignature& sig) {
  const Graph& graph = sig.graph();
  std::map<std::string, int> state;  // 0 fresh, 1 in progress, 2 done
  std::vector<std::pair<std::string, size_t>> stack;

  for (const auto& start : graph.nodes()) {
    if (state[start]) continue;
    stack.push_back({start, 0});
    state[start] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      auto out = graph.edges_from(node);
      if (next < out.size()) {
        const std::string& dst = graph.edge(out[next]).dst;
        ++next;
        if (state[dst] == 1) return false;
        if (state[dst] == 0) {
          state[dst] = 1;
          stack.push_back({dst, 0});
        }
      } else {
        state[node] = 2;
        stack.pop_back();
      }
    }
  }
  return true;
}

}  // namespace fql
