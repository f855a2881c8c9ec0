#include <doctest.h>

#include <string>
#include <vector>

#include "fql/catops.hpp"
#include "fql/migrate.hpp"
#include "fql/query.hpp"
#include "support/fixtures.hpp"
#include "support/gen.hpp"
#include "support/nt.hpp"

using namespace fql;
using namespace fql::testing;

TEST_CASE("lifted migrations evaluate like the bare operation") {
  auto sm = split_merge();
  KeyGen k1(1), k2(1);
  SUBCASE("pullback leg") {
    Query q = lift_delta(sm.F);
    CHECK(q.source() == sm.D);
    CHECK(q.target() == sm.C);
    CHECK(check_query(q).ok());
    Instance via_query = eval(q, sm.J, k1);
    Instance direct = delta(sm.F, sm.J, k2);
    CHECK(isomorphic(via_query, direct).has_value());
  }
  SUBCASE("limit leg") {
    Query q = lift_pi(sm.F);
    CHECK(q.source() == sm.C);
    CHECK(q.target() == sm.D);
    CHECK(check_query(q).ok());
    Instance via_query = eval(q, sm.I, k1);
    Instance direct = pi(sm.F, sm.I, k2);
    CHECK(isomorphic(via_query, direct).has_value());
    CHECK(via_query.nodes.at("N").size() == 9);
  }
  SUBCASE("pushforward leg") {
    auto abc = abc_union();
    Query q = lift_sigma(abc.F);
    CHECK(q.source() == abc.C);
    CHECK(q.target() == abc.D);
    CHECK(check_query(q).ok());
    Instance via_query = eval(q, abc.I, k1);
    Instance direct = sigma(abc.F, abc.I);
    CHECK(isomorphic(via_query, direct).has_value());
  }
}

TEST_CASE("identity queries act as the identity") {
  auto sm = split_merge();
  Query q = lift_delta(identity_morphism(sm.C));
  KeyGen keys;
  Instance got = eval(q, sm.I, keys);
  CHECK(isomorphic(got, sm.I).has_value());
  CHECK(iso_by_exhaustion(got, rehome(sm.I, got.sig)));
}

TEST_CASE("query validation inspects all three legs") {
  auto sm = split_merge();
  SUBCASE("mismatched leg endpoints") {
    Query q;
    q.delta_leg = identity_morphism(sm.C);
    q.pi_leg = sm.F;                       // lands in D
    q.sigma_leg = identity_morphism(sm.C); // but this one starts at C
    CHECK_FALSE(check_query(q).ok());
  }
  SUBCASE("a limit leg that is not ready") {
    Graph src;
    src.add_node("M");
    auto S = make_signature(std::move(src), {},
                            {{"P1", "M", BaseType::String},
                             {"P2", "M", BaseType::String}});
    Graph dst;
    dst.add_node("N");
    auto T = make_signature(std::move(dst), {},
                            {{"P", "N", BaseType::String}});
    TypedSignatureMorphism F{S, T, {{"M", "N"}},
                             {}, {{"P1", "P"}, {"P2", "P"}}};
    REQUIRE(check_morphism(F).ok());
    CHECK_FALSE(check_query(lift_pi(F)).ok());
    CHECK(check_query(lift_pi(F), kDefaultFuel, PiReadiness::Surjective).ok());
  }
  SUBCASE("a pushforward leg without unique liftings") {
    CHECK_FALSE(check_query(lift_sigma(point_to_loop())).ok());
  }
  SUBCASE("require_valid names the query") {
    Query q;
    q.delta_leg = identity_morphism(sm.C);
    q.pi_leg = sm.F;
    q.sigma_leg = identity_morphism(sm.C);
    CHECK_THROWS_WITH_AS(require_valid(q, "join"),
                         doctest::Contains("join"), QueryError);
  }
}

TEST_CASE("validation reports the unknown rather than guessing") {
  CHECK_THROWS_AS(check_query(lift_pi(point_to_loop())),
                  FinitenessUnknownError);
}

TEST_CASE("evaluation refuses unenumerable limit shapes") {
  auto F = point_to_loop();
  Query q = lift_pi(F);
  Instance I = empty_instance(F.source);
  I.nodes["s"] = {"x", "y"};
  KeyGen keys;
  CHECK_THROWS_AS(eval(q, I, keys), FinitenessUnknownError);
}

TEST_CASE("the full triple runs pullback, limit, pushforward in order") {
  auto sm = split_merge();
  Query join;
  join.delta_leg = identity_morphism(sm.C);
  join.pi_leg = sm.F;
  join.sigma_leg = identity_morphism(sm.D);
  REQUIRE(check_query(join).ok());
  CHECK(join.source() == sm.C);
  CHECK(join.target() == sm.D);
  KeyGen keys;
  Instance got = eval(join, sm.I, keys);
  CHECK(got.nodes.at("N").size() == 9);
  KeyGen k2;
  CHECK(isomorphic(got, pi(sm.F, sm.I, k2)).has_value());
}

TEST_CASE("composition matches running the two queries in sequence") {
  auto sm = split_merge();
  Query there = lift_pi(sm.F);     // C -> D instances
  Query back = lift_delta(sm.F);   // D -> C instances
  Query round_trip = compose_queries(back, there);
  CHECK(round_trip.source() == sm.C);
  CHECK(round_trip.target() == sm.C);
  CHECK(check_query(round_trip).ok());
  KeyGen k1(7), k2(7), k3(7);
  Instance composed = eval(round_trip, sm.I, k1);
  Instance stepwise = eval(back, eval(there, sm.I, k2), k3);
  CHECK(validate(composed).ok());
  CHECK(isomorphic(composed, stepwise).has_value());
  // Nine joined rows pulled back onto both halves.
  CHECK(composed.nodes.at("N1").size() == 9);
  CHECK(composed.nodes.at("N2").size() == 9);
}

TEST_CASE("composing with lifted identities changes nothing") {
  auto sm = split_merge();
  Query q = lift_pi(sm.F);
  Query idq = lift_delta(identity_morphism(sm.D));
  Query same = compose_queries(idq, q);
  KeyGen k1(3), k2(3);
  Instance a = eval(same, sm.I, k1);
  Instance b = eval(q, sm.I, k2);
  CHECK(isomorphic(a, b).has_value());
}

TEST_CASE("budgets cut off oversized compositions") {
  auto sm = split_merge();
  Query there = lift_pi(sm.F);
  Query back = lift_delta(sm.F);
  EvalOptions opts;
  opts.budget = CatBudget{1, 0};
  CHECK_THROWS_AS(compose_queries(back, there, opts), BudgetExceededError);
}

TEST_CASE("composition agrees with sequencing on random acyclic worlds") {
  Rng r(97);
  int done = 0;
  for (int trial = 0; trial < 80 && done < 8; ++trial) {
    auto S = make_signature(random_graph(r, 2, 2, true));
    auto T = make_signature(random_graph(r, 2, 2, true));
    auto F = random_morphism(r, S, T, 2);
    if (!F) continue;
    Query q1 = lift_delta(*F);   // T-instances to S-instances
    Query q2 = lift_pi(*F);      // S-instances back to T-instances
    Query both = compose_queries(q2, q1);
    if (!check_query(both).ok()) continue;
    auto J = random_instance(r, T, 2, "j" + std::to_string(trial));
    if (!J) continue;
    KeyGen k1(trial), k2(trial), k3(trial);
    Instance composed = eval(both, *J, k1);
    Instance stepwise = eval(q2, eval(q1, *J, k2), k3);
    CHECK(isomorphic(composed, stepwise).has_value());
    ++done;
  }
  CHECK(done >= 5);
}
