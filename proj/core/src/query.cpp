#include "fql/query.hpp"

namespace fql {

Query lift_delta(TypedSignatureMorphism F) {
  Query q;
  SigPtr u = F.source;
  q.delta_leg = std::move(F);
  q.pi_leg = identity_morphism(u);
  q.sigma_leg = identity_morphism(u);
  return q;
}

Query lift_pi(TypedSignatureMorphism G) {
  Query q;
  q.delta_leg = identity_morphism(G.source);
  q.sigma_leg = identity_morphism(G.target);
  q.pi_leg = std::move(G);
  return q;
}

Query lift_sigma(TypedSignatureMorphism H) {
  Query q;
  q.delta_leg = identity_morphism(H.source);
  q.pi_leg = identity_morphism(H.source);
  q.sigma_leg = std::move(H);
  return q;
}

ValidationReport check_query(const Query& q, int fuel,
                             PiReadiness readiness) {
  ValidationReport report;
  for (const auto* leg : {&q.delta_leg, &q.pi_leg, &q.sigma_leg}) {
    if (!leg->source || !leg->target) {
      report.add("legs", "a query leg has no signatures attached");
      return report;
    }
  }
  auto sub = check_morphism(q.delta_leg);
  for (auto& v : sub.items) report.add("delta-leg " + v.kind, v.message);
  sub = check_morphism(q.pi_leg);
  for (auto& v : sub.items) report.add("pi-leg " + v.kind, v.message);
  sub = check_morphism(q.sigma_leg);
  for (auto& v : sub.items) report.add("sigma-leg " + v.kind, v.message);
  if (!report.ok()) return report;

  if (q.delta_leg.source != q.pi_leg.source) {
    report.add("legs",
               "the pullback and limit legs must start from the same "
               "signature object");
  }
  if (q.pi_leg.target != q.sigma_leg.source) {
    report.add("legs",
               "the limit leg must end where the union leg starts (same "
               "signature object)");
  }
  if (!report.ok()) return report;

  MorphismProfile pp = profile(q.pi_leg, fuel, readiness);
  if (!pp.is_pi_ready) {
    report.add("pi-leg",
               "attribute sets do not line up along the limit leg");
  }
  MorphismProfile sp = profile(q.sigma_leg, fuel, readiness);
  if (!sp.is_dop) {
    report.add("sigma-leg",
               "edge liftings along the union leg are not unique");
  }
  if (!sp.is_sigma_ready) {
    report.add("sigma-leg",
               "attribute transport along the union leg is not node-wise "
               "bijective");
  }
  return report;
}

void require_valid(const Query& q, const std::string& what, int fuel,
                   PiReadiness readiness) {
  auto report = check_query(q, fuel, readiness);
  if (!report.ok()) {
    throw QueryError("invalid query (" + what + "):\n" + report.to_string());
  }
}

Instance eval(const Query& q, const Instance& I, KeyGen& keys,
              const EvalOptions& opts) {
  require_valid(q, "eval", opts.fuel, opts.readiness);
  Instance pulled = delta(q.delta_leg, I, keys);
  Instance limited =
      pi(q.pi_leg, pulled, keys, opts.fuel, opts.readiness, opts.budget);
  return sigma(q.sigma_leg, limited, opts.fuel);
}

}  // namespace fql
