#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "fql/catops.hpp"
#include "fql/category.hpp"
#include "support/fixtures.hpp"
#include "support/gen.hpp"
#include "support/nt.hpp"
#include "support/oracles.hpp"

using namespace fql;
using namespace fql::testing;

namespace {

Path p(std::string start, std::vector<std::string> edges) {
  return Path{std::move(start), std::move(edges)};
}

SigPtr idempotent_loop() {
  Graph g;
  g.add_node("s");
  g.add_edge("f", "s", "s");
  return make_signature(std::move(g), {{p("s", {"f", "f"}), p("s", {"f"})}});
}

}  // namespace

TEST_CASE("saturation enumerates the two-step chain") {
  auto sig = chain_sig(2);
  auto cat = saturate(sig);
  REQUIRE(cat.has_value());
  // Three identities, two single steps, one two-step composite.
  CHECK(cat->size() == 6);
  CHECK(cat->well_formed());
  CHECK(cat->hom("v0", "v2").size() == 1);
  CHECK(cat->hom("v2", "v0").empty());
  CHECK(cat->hom("v0", "v0").size() == 1);
  int two_step = cat->morphism_of(p("v0", {"s0", "s1"}));
  CHECK(cat->compose(cat->morphism_of(p("v0", {"s0"})),
                     cat->morphism_of(p("v1", {"s1"}))) == two_step);
  CHECK(cat->identity("v1") == cat->morphism_of(p("v1", {})));
  CHECK(cat->src_of(two_step) == "v0");
  CHECK(cat->tgt_of(two_step) == "v2");

  PathCongruence oracle(sig->graph(), sig->equations(), 6);
  REQUIRE(oracle.complete_universe());
  CHECK(oracle.class_count("v0", "v2") == 1);
  CHECK(oracle.class_count("v0", "v1") == 1);
  CHECK(oracle.class_count("v1", "v0") == 0);
}

TEST_CASE("saturation gives up on free loops and growing presentations") {
  CHECK_FALSE(saturate(loop_sig()).has_value());
  CHECK_FALSE(saturate(employees().sig).has_value());
  // f.f = g makes g an abbreviation, so the loop stays free on f.
  Graph g;
  g.add_node("s");
  g.add_edge("f", "s", "s");
  g.add_edge("g", "s", "s");
  auto sig = make_signature(std::move(g),
                            {{p("s", {"f", "f"}), p("s", {"g"})}});
  CHECK_FALSE(saturate(sig).has_value());
}

TEST_CASE("saturation handles finite cyclic presentations") {
  auto idem = saturate(idempotent_loop());
  REQUIRE(idem.has_value());
  CHECK(idem->size() == 2);  // the identity and f
  CHECK(idem->well_formed());
  int f = idem->morphism_of(p("s", {"f"}));
  CHECK(idem->compose(f, f) == f);
  CHECK(idem->morphism_of(p("s", {"f", "f", "f"})) == f);

  Graph g;
  g.add_node("s");
  g.add_edge("f", "s", "s");
  auto cubic = make_signature(std::move(g),
                              {{p("s", {"f", "f", "f"}), p("s", {"f"})}});
  auto cat = saturate(cubic);
  REQUIRE(cat.has_value());
  CHECK(cat->size() == 3);  // identity, f, f.f
  CHECK(cat->well_formed());
}

TEST_CASE("acyclicity detection") {
  CHECK(is_acyclic(*chain_sig(3)));
  CHECK(is_acyclic(*point_sig()));
  CHECK_FALSE(is_acyclic(*loop_sig()));
  CHECK_FALSE(is_acyclic(*employees().sig));
  CHECK(is_acyclic(*split_merge().C));
  CHECK(is_acyclic(*abc_union().C));
}

TEST_CASE("coproducts lay two signatures side by side") {
  auto chain = chain_sig(1);
  auto idem = idempotent_loop();
  auto cp = coproduct(chain, idem);
  CHECK(cp.sig->nodes().size() == 3);
  CHECK(cp.sig->edges().size() == 2);
  CHECK(check_morphism(cp.into_left).ok());
  CHECK(check_morphism(cp.into_right).ok());
  auto cat = saturate(cp.sig);
  REQUIRE(cat.has_value());
  CHECK(cat->size() == 3 + 2);  // chain part and idempotent part, no mixing
  // No morphisms between the two halves.
  CHECK(cat->hom(cp.into_left.node_map.at("v0"),
                 cp.into_right.node_map.at("s")).empty());
}

TEST_CASE("self-coproduct renames and folds back") {
  auto chain = chain_sig(1);
  auto cp = coproduct(chain, chain);
  CHECK(cp.sig->nodes().size() == 4);
  CHECK(cp.into_left.node_map.at("v0") != cp.into_right.node_map.at("v0"));
  auto fold = coproduct_fold(cp);
  CHECK(check_morphism(fold).ok());
  CHECK(fold.source == cp.sig);
  CHECK(fold.target == chain);
  CHECK(morphisms_equal(compose(cp.into_left, fold),
                        identity_morphism(chain)));
  CHECK(morphisms_equal(compose(cp.into_right, fold),
                        identity_morphism(chain)));
}

TEST_CASE("coproducts keep attributes apart") {
  auto sm = split_merge();
  auto cp = coproduct(sm.D, sm.D);
  CHECK(cp.sig->attributes().size() == 6);
  CHECK(check_morphism(cp.into_left).ok());
  CHECK(check_morphism(cp.into_right).ok());
  auto fold = coproduct_fold(cp);
  CHECK(check_morphism(fold).ok());
}

TEST_CASE("fiber products of presented categories") {
  auto chain = chain_sig(1);
  SUBCASE("over the diagonal the fiber product is the shared shape") {
    auto id = identity_morphism(chain);
    auto fp = fiber_product(id, id);
    CHECK(fp.objects.size() == 2);
    auto cat = saturate(fp.sig);
    REQUIRE(cat.has_value());
    CHECK(cat->size() == 3);
    CHECK(check_morphism(fp.to_left).ok());
    CHECK(check_morphism(fp.to_right).ok());
  }
  SUBCASE("over the point it is the plain product") {
    auto pt = point_sig();
    TypedSignatureMorphism to_pt{
        chain, pt, {{"v0", "s"}, {"v1", "s"}}, {{"s0", p("s", {})}}, {}};
    REQUIRE(check_morphism(to_pt).ok());
    auto fp = fiber_product(to_pt, to_pt);
    CHECK(fp.objects.size() == 4);  // all node pairs
    auto cat = saturate(fp.sig);
    REQUIRE(cat.has_value());
    CHECK(cat->size() == 9);  // 3 x 3 commutative square
    CHECK(check_morphism(fp.to_left).ok());
    CHECK(check_morphism(fp.to_right).ok());
    CHECK(fp.name_of.count(FiberProductResult::obj_key("v0", "v1")) == 1);
  }
}

TEST_CASE("comma of two identities is the arrow shape") {
  auto chain = chain_sig(1);
  auto id = identity_morphism(chain);
  auto cm = comma(id, id);
  // Objects are morphisms of the chain: two identities and the step.
  CHECK(cm.objects.size() == 3);
  CHECK(check_morphism(cm.to_left).ok());
  CHECK(check_morphism(cm.to_right).ok());
  REQUIRE(cm.target_cat != nullptr);
  CHECK(cm.target_cat->size() == 3);
}

TEST_CASE("comma construction refuses unenumerable targets") {
  auto id_loop = identity_morphism(loop_sig());
  CHECK_THROWS_AS(comma(id_loop, id_loop), FinitenessUnknownError);
}

TEST_CASE("slices under an object count arrows into each fiber") {
  auto sm = split_merge();
  auto under_n = comma_from_object("N", sm.F);
  CHECK(under_n.objects.size() == 2);  // one per source node, identity leg
  std::set<std::string> rights;
  for (const auto& [name, obj] : under_n.objects) rights.insert(obj.right);
  CHECK(rights == std::set<std::string>{"N1", "N2"});
  CHECK(check_morphism(under_n.to_right).ok());

  auto abc = abc_union();
  auto under_a = comma_from_object("A", abc.F);
  // Three a-nodes via identities, two b-nodes via G, four c-nodes via H.
  CHECK(under_a.objects.size() == 9);
  auto under_b = comma_from_object("B", abc.F);
  CHECK(under_b.objects.size() == 2);  // only b1 and b2, via identities
}

TEST_CASE("the table of elements projects back onto its base") {
  auto abc = abc_union();
  auto gr = grothendieck(abc.I, false);
  CHECK(gr.sig->nodes().size() == 18);  // one node per row
  CHECK(gr.sig->edges().size() == 12);  // one edge per edge entry
  CHECK(check_morphism(gr.proj).ok());
  CHECK(gr.proj.target == abc.C);
  auto pro = profile(gr.proj);
  CHECK(pro.is_dop);

  // The rebuilt instance lives on a stripped copy of the base; rehome it
  // for the pointer-sensitive comparisons.
  auto back = rehome(degrothendieck(gr.proj), abc.C);
  CHECK(validate(back).ok());
  CHECK(isomorphic(back, abc.I).has_value());
  CHECK(iso_by_exhaustion(back, abc.I));
}

TEST_CASE("typed tables of elements carry the attributes along") {
  auto sm = split_merge();
  auto gr = grothendieck(sm.J, true);
  CHECK(gr.sig->nodes().size() == 3);
  CHECK(gr.sig->attributes().size() == 3 * 3);  // every attribute per row
  CHECK(check_morphism(gr.proj).ok());
  for (const auto& [name, obj] : gr.objects) {
    CHECK(obj.node == "N");
  }
}

TEST_CASE("size budgets stop runaway constructions") {
  auto chain = chain_sig(1);
  auto pt = point_sig();
  TypedSignatureMorphism to_pt{
      chain, pt, {{"v0", "s"}, {"v1", "s"}}, {{"s0", p("s", {})}}, {}};
  CatBudget tiny;
  tiny.max_nodes = 2;
  tiny.max_edges = 1;
  CHECK_THROWS_AS(fiber_product(to_pt, to_pt, kDefaultFuel, tiny),
                  BudgetExceededError);
  auto id = identity_morphism(chain);
  CHECK_THROWS_AS(comma(id, id, false, kDefaultFuel, CatBudget{1, 0}),
                  BudgetExceededError);
}
