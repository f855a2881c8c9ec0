#include "fql/rewrite.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fql {

namespace {

using Word = std::vector<std::string>;

bool matches_at(const Word& word, size_t pos, const Word& lhs) {
  if (pos + lhs.size() > word.size()) return false;
  return std::equal(lhs.begin(), lhs.end(), word.begin() + pos);
}

void splice(Word& word, size_t pos, size_t len, const Word& replacement) {
  Word out;
  out.reserve(word.size() - len + replacement.size());
  out.insert(out.end(), word.begin(), word.begin() + pos);
  out.insert(out.end(), replacement.begin(), replacement.end());
  out.insert(out.end(), word.begin() + pos + len, word.end());
  word = std::move(out);
}

// Completion on a cyclic graph can diverge: critical pairs keep producing
// longer rules and no round is ever the last one. A coarse work meter
// makes that failure mode cheap — every unit is one scan position or one
// overlap candidate, the meter is sized from the caller's fuel, and
// running dry surfaces as an Incomplete system rather than a hang.
struct BudgetOut {};

struct WorkBudget {
  long long units = 0;
  void charge(long long n) {
    units -= n;
    if (units < 0) throw BudgetOut{};
  }
};

// Leftmost reduction to a fixpoint. Every rule strictly decreases shortlex
// rank, so this terminates whether or not the system is confluent yet.
// by_first groups rule positions by the first edge of their lhs.
Word reduce(Word word, const std::vector<RewriteRule>& rules,
            const std::map<std::string, std::vector<int>>& by_first,
            size_t longest_lhs, WorkBudget* budget = nullptr) {
  size_t i = 0;
  while (i < word.size()) {
    if (budget) budget->charge(1);
    auto it = by_first.find(word[i]);
    bool fired = false;
    if (it != by_first.end()) {
      for (int pos : it->second) {
        const RewriteRule& r = rules[pos];
        if (matches_at(word, i, r.lhs.edges)) {
          splice(word, i, r.lhs.edges.size(), r.rhs.edges);
          fired = true;
          break;
        }
      }
    }
    if (fired) {
      size_t back = longest_lhs > 1 ? longest_lhs - 1 : 0;
      i = i > back ? i - back : 0;
    } else {
      ++i;
    }
  }
  return word;
}

struct Completion {
  std::shared_ptr<const Graph> graph;
  std::vector<RewriteRule> rules;
  std::map<std::string, std::vector<int>> by_first;
  size_t longest_lhs = 0;
  WorkBudget budget;
  // Rule pairs whose overlaps have not been examined yet.
  std::vector<std::pair<int, int>> pending;

  Path norm(const Path& p) {
    return Path{p.start,
                reduce(p.edges, rules, by_first, longest_lhs, &budget)};
  }

  // Normalizes both sides and orients by shortlex. Returns false when the
  // sides already agree. Distinct parallel paths always compare, so
  // orientation cannot fail.
  bool add_equation(const Path& a, const Path& b) {
    Path na = norm(a);
    Path nb = norm(b);
    int cmp = shortlex_compare(na, nb);
    if (cmp == 0) return false;
    RewriteRule rule = cmp > 0 ? RewriteRule{na, nb} : RewriteRule{nb, na};
    int pos = static_cast<int>(rules.size());
    rules.push_back(std::move(rule));
    by_first[rules[pos].lhs.edges.front()].push_back(pos);
    longest_lhs = std::max(longest_lhs, rules[pos].lhs.edges.size());
    for (int other = 0; other <= pos; ++other) {
      pending.push_back({other, pos});
      if (other != pos) pending.push_back({pos, other});
    }
    return true;
  }

  // Superpositions of r1 over r2: a proper suffix of lhs1 equal to a prefix
  // of lhs2, and full containment of lhs2 inside lhs1. Each yields the two
  // one-step descendants of the superposed word.
  std::vector<PathEquation> critical_pairs(int i1, int i2) {
    const RewriteRule& r1 = rules[i1];
    const RewriteRule& r2 = rules[i2];
    const Word& l1 = r1.lhs.edges;
    const Word& l2 = r2.lhs.edges;
    std::vector<PathEquation> out;

    for (size_t k = 1; k < l1.size() && k <= l2.size(); ++k) {
      budget.charge(1);
      // suffix of l1 of length k vs prefix of l2
      if (!std::equal(l2.begin(), l2.begin() + k, l1.end() - k)) continue;
      if (k == l2.size()) continue;  // containment handled below
      Word left = r1.rhs.edges;
      left.insert(left.end(), l2.begin() + k, l2.end());
      Word right(l1.begin(), l1.end() - k);
      right.insert(right.end(), r2.rhs.edges.begin(), r2.rhs.edges.end());
      out.push_back({Path{r1.lhs.start, left}, Path{r1.lhs.start, right}});
    }

    for (size_t at = 0; at + l2.size() <= l1.size(); ++at) {
      budget.charge(1);
      if (i1 == i2 && at == 0 && l1.size() == l2.size()) continue;
      if (!matches_at(l1, at, l2)) continue;
      Word right(l1.begin(), l1.begin() + at);
      right.insert(right.end(), r2.rhs.edges.begin(), r2.rhs.edges.end());
      right.insert(right.end(), l1.begin() + at + l2.size(), l1.end());
      out.push_back({r1.rhs, Path{r1.lhs.start, right}});
    }
    return out;
  }
};

}  // namespace

RewriteSystem complete(std::shared_ptr<const Graph> graph,
                       const std::vector<PathEquation>& equations, int fuel) {
  if (!graph) throw SignatureError("completion needs a graph");

  Completion c;
  c.graph = graph;
  // Fuel bounds the effort on two axes at once: how many critical-pair
  // rounds may run, and proportionally how many elementary rewriting steps
  // the whole run may take. The second axis matters on cyclic graphs,
  // where a diverging completion grows its rules fast enough that even one
  // round would otherwise take essentially forever.
  c.budget.units = (static_cast<long long>(std::max(fuel, 0)) + 1) * 500;

  RewriteSystem rs;
  rs.graph = graph;
  rs.status = CompletionStatus::Complete;

  int rounds = 0;
  try {
    for (const auto& [a, b] : equations) {
      if (!graph->valid_path(a)) {
        throw SignatureError("equation side '" + render_path(a) +
                             "' is not a path of the graph");
      }
      if (!graph->valid_path(b)) {
        throw SignatureError("equation side '" + render_path(b) +
                             "' is not a path of the graph");
      }
      if (!graph->parallel(a, b)) {
        throw ParallelityError("equation '" + render_path(a) + " = " +
                               render_path(b) +
                               "' relates non-parallel paths");
      }
      c.add_equation(a, b);
    }

    while (!c.pending.empty()) {
      if (rounds >= fuel) {
        rs.status = CompletionStatus::Incomplete;
        break;
      }
      ++rounds;
      auto batch = std::move(c.pending);
      c.pending.clear();
      for (const auto& [i1, i2] : batch) {
        for (const auto& [a, b] : c.critical_pairs(i1, i2)) {
          c.add_equation(a, b);
        }
      }
    }
  } catch (const BudgetOut&) {
    rs.status = CompletionStatus::Incomplete;
  }

  rs.rules = std::move(c.rules);
  rs.rounds_used = rounds;
  rs.first_edge_index = std::move(c.by_first);
  rs.longest_lhs = c.longest_lhs;
  return rs;
}

Path normalize(const Path& p, const RewriteSystem& rs) {
  if (rs.status != CompletionStatus::Complete) {
    throw IncompleteSystemError(
        "normalization requires a complete rewrite system");
  }
  if (!rs.graph->valid_path(p)) {
    throw SignatureError("'" + render_path(p) + "' is not a path of the graph");
  }
  return Path{p.start,
              reduce(p.edges, rs.rules, rs.first_edge_index, rs.longest_lhs)};
}

bool is_irreducible(const Path& p, const RewriteSystem& rs) {
  for (const auto& r : rs.rules) {
    const auto& lhs = r.lhs.edges;
    if (lhs.size() > p.edges.size()) continue;
    for (size_t i = 0; i + lhs.size() <= p.edges.size(); ++i) {
      if (std::equal(lhs.begin(), lhs.end(), p.edges.begin() + i)) {
        return false;
      }
    }
  }
  return true;
}

bool equivalent(const Path& p, const Path& q, const RewriteSystem& rs) {
  if (!rs.graph->valid_path(p) || !rs.graph->valid_path(q)) {
    throw SignatureError("equivalence check on an invalid path");
  }
  if (!rs.graph->parallel(p, q)) {
    throw ParallelityError("'" + render_path(p) + "' and '" + render_path(q) +
                           "' are not parallel");
  }
  return normalize(p, rs) == normalize(q, rs);
}

}  // namespace fql
