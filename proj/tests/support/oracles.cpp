#include "support/oracles.hpp"

#include <algorithm>
#include <stdexcept>

namespace fql::testing {

namespace {

// Node reached after the first `len` edges of p.
std::string node_at(const Graph& g, const Path& p, std::size_t len) {
  std::string at = p.start;
  for (std::size_t i = 0; i < len; ++i) {
    at = g.edge(p.edges[i]).dst;
  }
  return at;
}

}  // namespace

PathCongruence::PathCongruence(const Graph& g,
                               const std::vector<PathEquation>& eqs,
                               int bound, std::size_t max_paths) {
  // Breadth-first enumeration of every path up to the bound.
  for (const auto& n : g.nodes()) {
    paths_.push_back(Path{n, {}});
    ends_.push_back(n);
  }
  std::size_t begin = 0;
  for (int len = 0; len < bound && complete_; ++len) {
    std::size_t end = paths_.size();
    for (std::size_t i = begin; i < end && complete_; ++i) {
      std::string tip = ends_[i];
      for (const auto& e : g.edges()) {
        if (e.src != tip) continue;
        Path q = paths_[i];
        q.edges.push_back(e.name);
        paths_.push_back(std::move(q));
        ends_.push_back(e.dst);
        if (paths_.size() > max_paths) {
          complete_ = false;
        }
      }
    }
    begin = end;
  }
  if (!complete_) {
    paths_.clear();
    ends_.clear();
    return;
  }
  parent_.resize(paths_.size());
  for (std::size_t i = 0; i < parent_.size(); ++i) parent_[i] = int(i);
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    index_[path_key(paths_[i])] = int(i);
  }

  // Connect each path to every single-substitution neighbour.  Equality is
  // then symmetric-transitive closure, i.e. union-find components.
  auto apply_at = [&](const Path& p, std::size_t pos, const Path& lhs,
                      const Path& rhs) -> int {
    if (pos + lhs.edges.size() > p.edges.size()) return -1;
    if (node_at(g, p, pos) != lhs.start) return -1;
    for (std::size_t k = 0; k < lhs.edges.size(); ++k) {
      if (p.edges[pos + k] != lhs.edges[k]) return -1;
    }
    Path out{p.start, {}};
    out.edges.insert(out.edges.end(), p.edges.begin(), p.edges.begin() + pos);
    out.edges.insert(out.edges.end(), rhs.edges.begin(), rhs.edges.end());
    out.edges.insert(out.edges.end(), p.edges.begin() + pos + lhs.edges.size(),
                     p.edges.end());
    if (int(out.edges.size()) > bound) return -1;
    auto it = index_.find(path_key(out));
    return it == index_.end() ? -1 : it->second;
  };
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    const Path& p = paths_[i];
    for (const auto& [l, r] : eqs) {
      for (std::size_t pos = 0; pos <= p.edges.size(); ++pos) {
        int j = apply_at(p, pos, l, r);
        if (j >= 0) unite(int(i), j);
        j = apply_at(p, pos, r, l);
        if (j >= 0) unite(int(i), j);
      }
    }
  }
}

int PathCongruence::index_of(const Path& p) const {
  auto it = index_.find(path_key(p));
  return it == index_.end() ? -1 : it->second;
}

bool PathCongruence::contains(const Path& p) const {
  if (!complete_) throw std::logic_error("path universe overflowed");
  return index_of(p) >= 0;
}

int PathCongruence::find(int i) const {
  while (parent_[i] != i) {
    parent_[i] = parent_[parent_[i]];
    i = parent_[i];
  }
  return i;
}

void PathCongruence::unite(int a, int b) {
  a = find(a);
  b = find(b);
  if (a != b) parent_[b] = a;
}

bool PathCongruence::same(const Path& p, const Path& q) const {
  if (!complete_) throw std::logic_error("path universe overflowed");
  int a = index_of(p), b = index_of(q);
  if (a < 0 || b < 0) {
    throw std::out_of_range("path outside the enumerated universe");
  }
  return find(a) == find(b);
}

int PathCongruence::class_count(const std::string& from,
                                const std::string& to) const {
  if (!complete_) throw std::logic_error("path universe overflowed");
  std::vector<int> reps;
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    if (paths_[i].start != from || ends_[i] != to) continue;
    reps.push_back(find(int(i)));
  }
  std::sort(reps.begin(), reps.end());
  reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
  return int(reps.size());
}

WordCheck check_word_problem(const Graph& g,
                             const std::vector<PathEquation>& eqs,
                             const RewriteSystem& rs, int max_len, int bound,
                             std::size_t max_paths) {
  WordCheck out;
  if (rs.status != CompletionStatus::Complete) return out;
  PathCongruence oracle(g, eqs, bound, max_paths);
  if (!oracle.complete_universe()) return out;

  // Certify the rules first: each one must be provable by the closure
  // alone, otherwise engine-equal verdicts on this system have no
  // independent backing and the sample is discarded.
  for (const auto& rule : rs.rules) {
    if (int(rule.lhs.edges.size()) > bound ||
        int(rule.rhs.edges.size()) > bound) {
      return out;
    }
    if (!oracle.same(rule.lhs, rule.rhs)) return out;
  }
  out.usable = true;
  out.ok = true;

  // Every path of length at most max_len, grown level by level.
  std::vector<Path> paths;
  for (const auto& n : g.nodes()) paths.push_back(Path{n, {}});
  std::size_t level_start = 0;
  for (int len = 1; len <= max_len; ++len) {
    std::size_t level_end = paths.size();
    for (std::size_t i = level_start; i < level_end; ++i) {
      for (const auto& e : g.edges_from(g.target_of(paths[i]))) {
        Path q = paths[i];
        q.edges.push_back(e);
        paths.push_back(std::move(q));
      }
    }
    level_start = level_end;
  }

  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      if (!g.parallel(paths[i], paths[j])) continue;
      bool engine = equivalent(paths[i], paths[j], rs);
      bool reference = oracle.same(paths[i], paths[j]);
      if (engine == reference) {
        ++out.agreed;
      } else if (engine) {
        ++out.certified;
      } else {
        out.ok = false;
        out.message = "closure proves '" + render_path(paths[i]) + "' = '" +
                      render_path(paths[j]) +
                      "' but the completed system separates them";
        return out;
      }
    }
  }
  return out;
}

}  // namespace fql::testing
