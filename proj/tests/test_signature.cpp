#include <doctest.h>

#include <string>
#include <vector>

#include "fql/signature.hpp"
#include "support/fixtures.hpp"
#include "support/gen.hpp"

using namespace fql;
using namespace fql::testing;

namespace {

Path p(std::string start, std::vector<std::string> edges) {
  return Path{std::move(start), std::move(edges)};
}

Graph square_graph() {
  Graph g;
  g.add_node("A");
  g.add_node("B");
  g.add_edge("f", "A", "B");
  g.add_edge("g", "A", "B");
  return g;
}

}  // namespace

TEST_CASE("signature construction validates its pieces") {
  SUBCASE("equation sides must be paths of the graph") {
    CHECK_THROWS_AS(
        make_signature(square_graph(), {{p("A", {"nope"}), p("A", {"f"})}}),
        SignatureError);
    CHECK_THROWS_AS(
        make_signature(square_graph(), {{p("C", {}), p("A", {"f"})}}),
        SignatureError);
  }
  SUBCASE("equation sides must be parallel") {
    // f lands in B, the trivial path stays at A.
    CHECK_THROWS_AS(
        make_signature(square_graph(), {{p("A", {"f"}), p("A", {})}}),
        ParallelityError);
  }
  SUBCASE("attributes must sit on existing nodes") {
    CHECK_THROWS_AS(
        make_signature(square_graph(), {}, {{"label", "C", BaseType::String}}),
        SignatureError);
  }
  SUBCASE("attribute names are unique across the signature") {
    CHECK_THROWS_AS(
        make_signature(square_graph(), {},
                       {{"label", "A", BaseType::String},
                        {"label", "B", BaseType::Nat}}),
        SignatureError);
  }
  SUBCASE("graphs reject duplicate and dangling declarations") {
    Graph g;
    g.add_node("A");
    CHECK_THROWS_AS(g.add_node("A"), SignatureError);
    CHECK_THROWS_AS(g.add_edge("e", "A", "missing"), SignatureError);
    g.add_edge("e", "A", "A");
    CHECK_THROWS_AS(g.add_edge("e", "A", "A"), SignatureError);
  }
}

TEST_CASE("attribute lookup on the employees world") {
  auto sig = employees().sig;
  CHECK(sig->has_attribute("FName"));
  CHECK_FALSE(sig->has_attribute("Salary"));
  CHECK(sig->attribute("DName").node == "Dept");
  CHECK(sig->attribute("DName").type == BaseType::String);
  auto on_emp = sig->attributes_of("Emp");
  REQUIRE(on_emp.size() == 2);
  CHECK(on_emp[0].name == "FName");
  CHECK(on_emp[1].name == "LName");
  CHECK(sig->attributes_of("Dept").size() == 1);
}

TEST_CASE("identity and composition of signature morphisms") {
  auto fx = split_merge();
  auto id_c = identity_morphism(fx.C);
  CHECK(check_morphism(id_c).ok());
  CHECK(morphisms_equal(compose(id_c, fx.F), fx.F));
  CHECK(morphisms_equal(compose(fx.F, identity_morphism(fx.D)), fx.F));

  auto abc = abc_union();
  Path q = p("a2", {"g2"});
  CHECK(apply(identity_morphism(abc.C), q) == q);
  CHECK(apply(abc.F, q) == p("A", {"G"}));
  CHECK(apply(abc.F, p("a3", {})) == p("A", {}));
}

TEST_CASE("apply distributes over composition") {
  Rng r(81);
  int checked = 0;
  for (int trial = 0; trial < 60 && checked < 15; ++trial) {
    auto S = make_signature(random_graph(r, 3, 3, true));
    auto T = make_signature(random_graph(r, 3, 3, true));
    auto U = make_signature(random_graph(r, 3, 3, true));
    auto f = random_morphism(r, S, T, 2);
    auto g = random_morphism(r, T, U, 2);
    if (!f || !g) continue;
    auto fg = compose(*f, *g);
    CHECK(check_morphism(fg).ok());
    for (const auto& e : S->edges()) {
      Path q = p(e.src, {e.name});
      CHECK(apply(fg, q) == apply(*g, apply(*f, q)));
    }
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("morphism validation catches broken maps") {
  auto fx = abc_union();
  SUBCASE("edge image endpoints must line up") {
    auto bad = fx.F;
    bad.edge_map["g1"] = p("A", {"H"});  // g1 : a1 -> b1 must land in B
    bad.node_map["b1"] = "B";
    CHECK_FALSE(check_morphism(bad).ok());
  }
  SUBCASE("every node needs an image") {
    auto bad = fx.F;
    bad.node_map.erase("c3");
    CHECK_FALSE(check_morphism(bad).ok());
  }
  SUBCASE("every edge needs an image") {
    auto bad = fx.F;
    bad.edge_map.erase("h2");
    CHECK_FALSE(check_morphism(bad).ok());
  }
  SUBCASE("source equations must map to equivalent target paths") {
    Graph src;
    src.add_node("s");
    src.add_edge("f", "s", "s");
    auto S = make_signature(std::move(src),
                            {{p("s", {"f", "f"}), p("s", {"f"})}});
    auto T = loop_sig();  // free loop: f.f is not f there
    TypedSignatureMorphism m{S, T, {{"s", "s"}}, {{"f", p("s", {"f"})}}, {}};
    auto report = check_morphism(m);
    CHECK_FALSE(report.ok());
    // Mapping f to the trivial path collapses the equation and is fine.
    m.edge_map["f"] = p("s", {});
    CHECK(check_morphism(m).ok());
  }
  SUBCASE("attribute images must match anchor and base type") {
    auto sm = split_merge();
    auto bad = sm.F;
    bad.attr_map["Age"] = "Name";  // Age is Nat, Name is String
    CHECK_FALSE(check_morphism(bad).ok());
    bad = sm.F;
    bad.attr_map.erase("Salary");
    CHECK_FALSE(check_morphism(bad).ok());
  }
  SUBCASE("require_valid throws with the caller's label") {
    auto bad = fx.F;
    bad.node_map.erase("c3");
    CHECK_THROWS_WITH_AS(require_valid(bad, "collapse"),
                         doctest::Contains("collapse"), MorphismError);
  }
}

TEST_CASE("morphisms compare up to target equations") {
  auto fx = employees();
  Graph g;
  g.add_node("X");
  g.add_node("Y");
  g.add_edge("e", "X", "Y");
  auto S = make_signature(std::move(g));
  TypedSignatureMorphism via_manager{
      S, fx.sig, {{"X", "Emp"}, {"Y", "Dept"}},
      {{"e", p("Emp", {"manager", "worksIn"})}}, {}};
  TypedSignatureMorphism direct{
      S, fx.sig, {{"X", "Emp"}, {"Y", "Dept"}},
      {{"e", p("Emp", {"worksIn"})}}, {}};
  REQUIRE(check_morphism(via_manager).ok());
  REQUIRE(check_morphism(direct).ok());
  CHECK(morphisms_equal(via_manager, direct));

  TypedSignatureMorphism other{
      S, fx.sig, {{"X", "Dept"}, {"Y", "Emp"}},
      {{"e", p("Dept", {"secretary"})}}, {}};
  REQUIRE(check_morphism(other).ok());
  CHECK_FALSE(morphisms_equal(direct, other));
}

TEST_CASE("profiles classify the fixture morphisms") {
  auto sm = split_merge();
  auto spro = profile(sm.F);
  CHECK(spro.is_dop);          // the target has no edges to lift
  CHECK(spro.is_pi_ready);     // same attribute names on both sides
  CHECK_FALSE(spro.is_sigma_ready);  // N1 carries two attributes, N three

  auto abc = abc_union();
  auto apro = profile(abc.F);
  CHECK(apro.is_dop);
  CHECK(apro.is_pi_ready);
  CHECK(apro.is_sigma_ready);

  auto ppro = profile(point_to_loop());
  CHECK_FALSE(ppro.is_dop);  // the loop edge has no lift from the point
  CHECK(ppro.is_pi_ready);
}

TEST_CASE("profiling refuses when the source denotation cannot be counted") {
  auto id_loop = identity_morphism(loop_sig());
  CHECK_THROWS_WITH_AS(profile(id_loop),
                       doctest::Contains("cannot certify the lift search"),
                       FinitenessUnknownError);
}

TEST_CASE("readiness modes differ on collapsing attribute maps") {
  Graph src;
  src.add_node("M");
  auto S = make_signature(std::move(src), {},
                          {{"P", "M", BaseType::String},
                           {"Q", "M", BaseType::String}});
  Graph dst;
  dst.add_node("N");
  auto T = make_signature(std::move(dst), {}, {{"R", "N", BaseType::String}});
  TypedSignatureMorphism f{S, T, {{"M", "N"}}, {}, {{"P", "R"}, {"Q", "R"}}};
  REQUIRE(check_morphism(f).ok());
  CHECK_FALSE(profile(f, kDefaultFuel, PiReadiness::Strict).is_pi_ready);
  CHECK(profile(f, kDefaultFuel, PiReadiness::Surjective).is_pi_ready);
}

TEST_CASE("attribute stripping and regrafting") {
  auto sig = employees().sig;
  auto bare = strip_attributes(sig);
  CHECK(bare->attributes().empty());
  CHECK(bare->nodes() == sig->nodes());
  CHECK(bare->equations().size() == sig->equations().size());
  auto back = with_attributes(bare, {{"Nick", "Emp", BaseType::String}});
  CHECK(back->has_attribute("Nick"));
  CHECK_THROWS_AS(with_attributes(bare, {{"Bad", "Nope", BaseType::Nat}}),
                  SignatureError);
}
