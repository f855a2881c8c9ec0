#pragma once

#include "fql/migrate.hpp"

namespace fql {

// A migration program from the target of delta_leg to the target of
// sigma_leg: pull rows back along delta_leg, push them right along pi_leg
// (limits), then push them left along sigma_leg (unions).  The three legs
// share middle signatures:
//
//     source() <--delta_leg-- U --pi_leg--> V --sigma_leg--> target()
//
// pi_leg must pass the attribute-readiness check and sigma_leg the
// edge-lifting and attribute-bijectivity checks; check_query verifies all
// of it.
struct Query {
  TypedSignatureMorphism delta_leg;
  TypedSignatureMorphism pi_leg;
  TypedSignatureMorphism sigma_leg;

  SigPtr source() const { return delta_leg.target; }
  SigPtr target() const { return sigma_leg.target; }
};

// One-operation queries: the other two legs are identities.
Query lift_delta(TypedSignatureMorphism F);
Query lift_pi(TypedSignatureMorphism G);
Query lift_sigma(TypedSignatureMorphism H);

struct EvalOptions {
  int fuel = kDefaultFuel;
  PiReadiness readiness = PiReadiness::Strict;
  CatBudget budget;
};

// Leg validity, endpoint agreement, and the two leg profiles. Propagates
// FinitenessUnknownError when a profile cannot be decided within fuel.
ValidationReport check_query(const Query& q, int fuel = kDefaultFuel,
                             PiReadiness readiness = PiReadiness::Strict);

// Throws QueryError when check_query finds anything.
void require_valid(const Query& q, const std::string& what,
                   int fuel = kDefaultFuel,
                   PiReadiness readiness = PiReadiness::Strict);

// Runs the three legs in order on an instance over source().
Instance eval(const Query& q, const Instance& I, KeyGen& keys,
              const EvalOptions& opts = {});

// A single query equivalent to running `inner` and then `outer`: evaluating
// the result against any instance gives the same tables, up to row renaming,
// as the two-pass evaluation. inner's target and outer's source must be the
// same signature (structural equality is enough). The intermediate
// constructions respect opts.budget and raise BudgetExceededError naming
// the stage that overflowed.
Query compose_queries(const Query& outer, const Query& inner,
                      const EvalOptions& opts = {});

}  // namespace fql
