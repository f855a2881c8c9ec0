#include <benchmark/benchmark.h>

#include <string>
#include <utility>
#include <vector>

#include "fql/catops.hpp"
#include "fql/instance.hpp"
#include "fql/migrate.hpp"
#include "fql/rewrite.hpp"
#include "fql/signature.hpp"
#include "fql/sqlgen.hpp"

namespace {

using namespace fql;

// One node, two loops, and the single relation f^k = g.  Completion has to
// discover the commutation family g.f^j = f^j.g, so the rule set and the
// number of rounds grow with k.
void BM_Completion(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  Graph g;
  g.add_node("s");
  g.add_edge("f", "s", "s");
  g.add_edge("g", "s", "s");
  auto gp = std::make_shared<const Graph>(std::move(g));
  Path lhs{"s", std::vector<std::string>(static_cast<std::size_t>(k), "f")};
  Path rhs{"s", {"g"}};
  std::vector<PathEquation> eqs = {{lhs, rhs}};
  for (auto _ : state) {
    RewriteSystem rs = complete(gp, eqs);
    benchmark::DoNotOptimize(rs.rules.size());
    if (rs.status != CompletionStatus::Complete) state.SkipWithError("incomplete");
  }
}
BENCHMARK(BM_Completion)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

SigPtr chain_signature(int n) {
  Graph g;
  for (int i = 0; i <= n; ++i) g.add_node("v" + std::to_string(i));
  for (int i = 0; i < n; ++i) {
    g.add_edge("e" + std::to_string(i), "v" + std::to_string(i),
               "v" + std::to_string(i + 1));
  }
  return make_signature(std::move(g));
}

// Enumerating the full morphism table of a chain: quadratically many
// composites, each found by path search and normalization.
void BM_Saturation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SigPtr sig = chain_signature(n);
  for (auto _ : state) {
    auto cat = saturate(sig);
    if (!cat) state.SkipWithError("saturation failed");
    benchmark::DoNotOptimize(cat->size());
  }
}
BENCHMARK(BM_Saturation)->Arg(4)->Arg(16)->Arg(64);

struct JoinWorld {
  SigPtr C, D;
  TypedSignatureMorphism F;
  Instance I;
};

// Two unrelated node tables collapsing onto one target node: the limit is
// their full cross product, carrying one attribute from each side.
JoinWorld join_world(int rows) {
  Graph gc;
  gc.add_node("N1");
  gc.add_node("N2");
  auto C = make_signature(std::move(gc), {},
                          {{"Name", "N1", BaseType::String},
                           {"Age", "N2", BaseType::Nat}});
  Graph gd;
  gd.add_node("N");
  auto D = make_signature(std::move(gd), {},
                          {{"Name", "N", BaseType::String},
                           {"Age", "N", BaseType::Nat}});
  TypedSignatureMorphism F{C, D,
                           {{"N1", "N"}, {"N2", "N"}},
                           {},
                           {{"Name", "Name"}, {"Age", "Age"}}};
  Instance I = empty_instance(C);
  for (int i = 0; i < rows; ++i) {
    Id a = "a" + std::to_string(i);
    Id b = "b" + std::to_string(i);
    I.nodes["N1"].push_back(a);
    I.nodes["N2"].push_back(b);
    I.attrs["Name"][a] = Value{std::string("p") + std::to_string(i)};
    I.attrs["Age"][b] = Value{static_cast<std::uint64_t>(20 + i)};
  }
  return {C, D, F, std::move(I)};
}

void BM_Pi(benchmark::State& state) {
  JoinWorld w = join_world(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    KeyGen keys(7);
    Instance out = pi(w.F, w.I, keys);
    benchmark::DoNotOptimize(out.nodes["N"].size());
  }
}
BENCHMARK(BM_Pi)->Arg(4)->Arg(16)->Arg(48);

struct FoldWorld {
  SigPtr C, D;
  TypedSignatureMorphism F;
  Instance I;
};

// Two disjoint arrows mapping onto one: every target edge lifts uniquely
// at each source row, so the pushforward is a table union that keeps ids.
FoldWorld fold_world(int rows) {
  Graph gc;
  gc.add_node("X1");
  gc.add_node("Y1");
  gc.add_node("X2");
  gc.add_node("Y2");
  gc.add_edge("e1", "X1", "Y1");
  gc.add_edge("e2", "X2", "Y2");
  auto C = make_signature(std::move(gc));
  Graph gd;
  gd.add_node("X");
  gd.add_node("Y");
  gd.add_edge("e", "X", "Y");
  auto D = make_signature(std::move(gd));
  TypedSignatureMorphism F{
      C, D,
      {{"X1", "X"}, {"Y1", "Y"}, {"X2", "X"}, {"Y2", "Y"}},
      {{"e1", Path{"X", {"e"}}}, {"e2", Path{"X", {"e"}}}},
      {}};
  Instance I = empty_instance(C);
  for (int i = 0; i < rows; ++i) {
    for (const char* side : {"1", "2"}) {
      Id x = std::string("x") + side + "_" + std::to_string(i);
      Id y = std::string("y") + side + "_" + std::to_string(i);
      I.nodes["X" + std::string(side)].push_back(x);
      I.nodes["Y" + std::string(side)].push_back(y);
      I.edges["e" + std::string(side)][x] = y;
    }
  }
  return {C, D, F, std::move(I)};
}

void BM_Sigma(benchmark::State& state) {
  FoldWorld w = fold_world(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    Instance out = sigma(w.F, w.I);
    benchmark::DoNotOptimize(out.nodes["X"].size());
  }
}
BENCHMARK(BM_Sigma)->Arg(16)->Arg(128)->Arg(1024);

// The same join as BM_Pi, but through the generated script and the
// relational executor instead of the in-memory engine.
void BM_SqlExec(benchmark::State& state) {
  JoinWorld w = join_world(static_cast<int>(state.range(0)));
  SqlScript script = sql_pi(w.F, "in_", "out_");
  RelDatabase db = encode_instance(w.I, "in_");
  for (auto _ : state) {
    RelDatabase out = exec(script, db);
    benchmark::DoNotOptimize(out.size());
  }
}
BENCHMARK(BM_SqlExec)->Arg(4)->Arg(16)->Arg(48);

}  // namespace

BENCHMARK_MAIN();
