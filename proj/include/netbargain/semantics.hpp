#pragma once

// Outside options, stability and balance for solutions (M, z), plus the
// unit-capacity specialization on (M, x).

#include "netbargain/instance.hpp"

#include <optional>
#include <string>
#include <vector>

namespace netbargain {

struct OutsideOptionWitness {
  VertexIndex best_outside;                  // v'
  std::optional<VertexIndex> weakest_partner;  // u', only when v' is saturated
};

struct OutsideOptionReport {
  VertexIndex vertex = 0;
  Rational value = 0;
  std::optional<OutsideOptionWitness> witness;
};

namespace detail {

// Minimum matched split of each vertex, with the lexicographically least
// partner attaining it. Empty for unmatched vertices.
struct WeakestContract {
  std::optional<Rational> value;
  std::optional<VertexIndex> partner;
};

inline std::vector<WeakestContract> weakest_contracts(const Instance& inst, const Solution& s) {
  std::vector<WeakestContract> out(inst.vertex_count());
  for (VertexIndex v = 0; v < inst.vertex_count(); ++v) {
    for (const auto& [partner, e] : s.matching().partners(v)) {
      const auto& z = s.share(inst, e, v);
      if (!out[v].value || z < *out[v].value) {
        out[v].value = z;
        out[v].partner = partner;
      }
    }
  }
  return out;
}

inline OutsideOptionReport outside_option_with(const Instance& inst, const Solution& s,
                                               const std::vector<WeakestContract>& weakest,
                                               VertexIndex u) {
  OutsideOptionReport report;
  report.vertex = u;
  std::optional<Rational> best;
  for (const auto& [v, e] : inst.incident(u)) {
    if (s.matching().contains(e)) continue;
    Rational candidate = inst.edge(e).weight;
    std::optional<VertexIndex> partner;
    if (s.matching().saturated(inst, v)) {
      // A saturated vertex has at least one contract (capacities are >= 1).
      candidate -= *weakest[v].value;
      partner = weakest[v].partner;
    }
    // Neighbors arrive in lexicographic order, so strict > keeps the least id.
    if (!best || candidate > *best) {
      best = candidate;
      report.witness = OutsideOptionWitness{v, partner};
    }
  }
  if (!best || *best <= 0) {
    // Witness kept only when the best expression is exactly zero.
    if (!best || *best < 0) report.witness.reset();
    report.value = 0;
  } else {
    report.value = *best;
  }
  return report;
}

}  // namespace detail

inline OutsideOptionReport outside_option(const Instance& inst, const Solution& s, VertexIndex u) {
  if (u >= inst.vertex_count()) throw ValidationError("unknown vertex index");
  return detail::outside_option_with(inst, s, detail::weakest_contracts(inst, s), u);
}

inline OutsideOptionReport outside_option(const Instance& inst, const Solution& s,
                                          const VertexId& u) {
  return outside_option(inst, s, inst.index_of(u));
}

inline std::vector<Rational> outside_options(const Instance& inst, const Solution& s) {
  const auto weakest = detail::weakest_contracts(inst, s);
  std::vector<Rational> alpha(inst.vertex_count());
  for (VertexIndex u = 0; u < inst.vertex_count(); ++u) {
    alpha[u] = detail::outside_option_with(inst, s, weakest, u).value;
  }
  return alpha;
}

struct StabilityViolation {
  enum class Kind { share_below_option, unsaturated_with_option };
  Kind kind;
  VertexIndex vertex;
  std::optional<VertexIndex> partner;  // for share_below_option
  Rational share;                      // z_{vertex,partner}; 0 for the other kind
  Rational option;                     // alpha_vertex
};

struct StabilityReport {
  bool stable = true;
  std::vector<Rational> alpha;
  std::vector<StabilityViolation> violations;
};

inline StabilityReport is_stable(const Instance& inst, const Solution& s) {
  StabilityReport report;
  report.alpha = outside_options(inst, s);
  for (VertexIndex u = 0; u < inst.vertex_count(); ++u) {
    for (const auto& [v, e] : s.matching().partners(u)) {
      const auto& z = s.share(inst, e, u);
      if (z < report.alpha[u]) {
        report.violations.push_back(
            {StabilityViolation::Kind::share_below_option, u, v, z, report.alpha[u]});
      }
    }
    if (!s.matching().saturated(inst, u) && report.alpha[u] != 0) {
      report.violations.push_back(
          {StabilityViolation::Kind::unsaturated_with_option, u, std::nullopt, 0, report.alpha[u]});
    }
  }
  report.stable = report.violations.empty();
  return report;
}

struct EdgeBalance {
  EdgeIndex edge;
  VertexIndex u;
  VertexIndex v;
  Rational z_uv, alpha_u, z_vu, alpha_v;
  Rational asymmetry;  // (z_uv - alpha_u) - (z_vu - alpha_v)
};

struct BalanceReport {
  bool stable = false;
  bool balanced = false;
  std::vector<EdgeBalance> edges;
  std::vector<StabilityViolation> stability_violations;
  std::vector<EdgeBalance> balance_violations;
};

inline BalanceReport is_balanced(const Instance& inst, const Solution& s) {
  auto stability = is_stable(inst, s);
  BalanceReport report;
  report.stable = stability.stable;
  report.stability_violations = std::move(stability.violations);
  const auto& alpha = stability.alpha;
  for (EdgeIndex e : s.matching().edges()) {
    const auto& ed = inst.edge(e);
    EdgeBalance b{e, ed.u, ed.v, s.shares()[2 * e], alpha[ed.u], s.shares()[2 * e + 1],
                  alpha[ed.v], 0};
    b.asymmetry = (b.z_uv - b.alpha_u) - (b.z_vu - b.alpha_v);
    if (b.asymmetry != 0) report.balance_violations.push_back(b);
    report.edges.push_back(std::move(b));
  }
  report.balanced = report.stable && report.balance_violations.empty();
  return report;
}

// Unit-capacity outside option on (M, x):
//   max(0, max over non-matching neighbors v of w_uv - x_v).
// The zero floor keeps it identical to the general definition.
inline Rational unit_outside_option(const Instance& inst, const CMatching& m, const Allocation& x,
                                    VertexIndex u) {
  if (!inst.all_unit_capacity()) {
    throw ValidationError("unit outside option requested on an instance with capacity > 1");
  }
  Rational best = 0;
  for (const auto& [v, e] : inst.incident(u)) {
    if (m.contains(e)) continue;
    Rational candidate = inst.edge(e).weight - x.payoff[v];
    if (candidate > best) best = candidate;
  }
  return best;
}

// Builds the solution (M, z) implied by a unit allocation: z_uv = x_u on matched
// edges. Throws if x is not a valid unit solution on m.
inline Solution unit_solution(const Instance& inst, const CMatching& m, const Allocation& x) {
  if (!inst.all_unit_capacity()) throw ValidationError("instance is not unit-capacity");
  if (x.payoff.size() != inst.vertex_count()) throw ValidationError("allocation has wrong length");
  std::vector<Rational> shares(2 * inst.edge_count(), Rational(0));
  for (VertexIndex v = 0; v < inst.vertex_count(); ++v) {
    if (m.degree(v) == 0 && x.payoff[v] != 0) {
      throw ValidationError("uncovered vertex '" + inst.id(v) + "' has nonzero payoff");
    }
  }
  for (EdgeIndex e : m.edges()) {
    shares[2 * e] = x.payoff[inst.edge(e).u];
    shares[2 * e + 1] = x.payoff[inst.edge(e).v];
  }
  return Solution::make(inst, m, std::move(shares));
}

}  // namespace netbargain
