#include "support/naive_rel.hpp"

#include <algorithm>
#include <stdexcept>

namespace fql::testing {

std::vector<std::vector<Value>> naive_spc(const RelationalInstance& db,
                                          const SpcQuery& q) {
  std::vector<const std::vector<std::vector<Value>>*> entries;
  for (const auto& rel : q.from) {
    auto it = db.tables.find(rel);
    if (it == db.tables.end()) {
      throw std::out_of_range("no table '" + rel + "'");
    }
    if (it->second.empty()) return {};
    entries.push_back(&it->second);
  }

  std::vector<std::vector<Value>> out;
  std::size_t n = entries.size();
  std::vector<std::size_t> pick(n, 0);
  // Odometer over the cartesian product; an empty FROM yields the single
  // empty assignment, matching the nullary product.
  for (;;) {
    std::vector<Value> flat;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& row = (*entries[i])[pick[i]];
      flat.insert(flat.end(), row.begin(), row.end());
    }
    bool keep = true;
    for (const auto& [l, r] : q.where) {
      if (flat.at(std::size_t(l)) != flat.at(std::size_t(r))) keep = false;
    }
    if (keep) {
      std::vector<Value> tuple;
      for (int c : q.select) tuple.push_back(flat.at(std::size_t(c)));
      out.push_back(std::move(tuple));
    }
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++pick[i] < entries[i]->size()) break;
      pick[i] = 0;
    }
    if (i == n) break;
  }
  if (q.set_semantics) {
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return out;
}

std::vector<std::vector<Value>> naive_spcu(const RelationalInstance& db,
                                           const SpcuQuery& q) {
  std::vector<std::vector<Value>> out;
  for (SpcQuery arm : q.arms) {
    arm.set_semantics = false;
    auto rows = naive_spc(db, arm);
    out.insert(out.end(), rows.begin(), rows.end());
  }
  if (q.set_semantics) {
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return out;
}

bool rows_equal_as_bags(std::vector<std::vector<Value>> a,
                        std::vector<std::vector<Value>> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

bool rows_equal_as_sets(std::vector<std::vector<Value>> a,
                        std::vector<std::vector<Value>> b) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return a == b;
}

}  // namespace fql::testing
