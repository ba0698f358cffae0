#pragma once

// End-to-end computation of a balanced solution for a capacitated instance:
//   1. maximum-weight c-matching M;
//   2. auxiliary unit-capacity instance with matching M';
//   3. balanced solution x on M';
//   4. z = phi(x).
// Every intermediate claim is re-checked and logged in the transcript.

#include "netbargain/cmatching.hpp"
#include "netbargain/reduction.hpp"
#include "netbargain/semantics.hpp"
#include "netbargain/unit_solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace netbargain {

struct PipelineResult {
  OutcomeStatus status = OutcomeStatus::inconclusive;
  MaxCMatching matching;
  AuxiliaryBundle bundle;
  BalancedOutcome unit;
  std::optional<Solution> solution;
  std::optional<BalanceReport> report;  // is_balanced on the returned solution
  std::vector<std::string> transcript;
};

namespace detail {

inline void certify_bundle(const Instance& inst, const AuxiliaryBundle& b,
                           std::vector<std::string>& log) {
  long long copies = 0;
  long long expected_edges = static_cast<long long>(b.matching.size());
  for (VertexIndex u = 0; u < inst.vertex_count(); ++u) copies += inst.capacity(u);
  for (EdgeIndex e = 0; e < inst.edge_count(); ++e) {
    if (!b.matching.contains(e)) {
      expected_edges += inst.capacity(inst.edge(e).u) * inst.capacity(inst.edge(e).v);
    }
  }
  if (static_cast<long long>(b.aux.vertex_count()) != copies ||
      static_cast<long long>(b.aux.edge_count()) != expected_edges ||
      b.aux_matching.size() != b.matching.size() || !b.aux.all_unit_capacity() ||
      b.aux_matching.weight(b.aux) != b.matching.weight(inst)) {
    throw std::logic_error("auxiliary construction failed its own count certification");
  }
  log.push_back("aux: " + std::to_string(copies) + " vertices, " +
                std::to_string(expected_edges) + " edges, |M'| = " +
                std::to_string(b.aux_matching.size()) + ", w'(M') = w(M)");
}

}  // namespace detail

inline PipelineResult solve_pipeline(const Instance& inst, const SolverConfig& cfg = {}) {
  PipelineResult r;
  r.matching = max_weight_c_matching(inst);
  if (!is_c_matching(inst, r.matching.matching.edges()).ok) {
    throw std::logic_error("solver returned an invalid c-matching");
  }
  r.transcript.push_back("step 1: maximum c-matching of weight " + to_string(r.matching.weight) +
                         " with " + std::to_string(r.matching.matching.size()) + " edges");

  r.bundle = build_auxiliary(inst, r.matching.matching);
  detail::certify_bundle(inst, r.bundle, r.transcript);
  r.transcript.push_back("step 2: auxiliary instance built");

  // M is maximum, hence so is M' (the weights agree and the reduction maps
  // maximum matchings to maximum matchings).
  r.unit = solve_balanced_unit(r.bundle.aux, r.bundle.aux_matching, cfg, r.matching.weight);
  r.transcript.push_back(std::string("step 3: unit solver -> ") + to_string(r.unit.status) +
                         " via " + r.unit.method);
  r.status = r.unit.status;
  if (r.unit.status != OutcomeStatus::balanced_found) {
    if (!r.unit.note.empty()) r.transcript.push_back("note: " + r.unit.note);
    return r;
  }

  r.solution = phi(r.bundle, *r.unit.allocation);
  r.report = is_balanced(inst, *r.solution);
  if (!r.report->balanced) {
    r.status = OutcomeStatus::inconclusive;
    r.transcript.push_back("step 4: mapped solution failed the balance check; not reported");
    r.solution.reset();
    return r;
  }
  r.transcript.push_back("step 4: z = phi(x) verified balanced");
  return r;
}

// A stable solution on the maximum c-matching, found on the auxiliary
// instance and mapped back; nullopt when none exists on that matching.
inline std::optional<Solution> find_stable_solution(const Instance& inst,
                                                    const std::vector<Rational>& aux_objective = {}) {
  const auto best = max_weight_c_matching(inst);
  const auto bundle = build_auxiliary(inst, best.matching);
  auto x = find_stable_unit(bundle.aux, bundle.aux_matching, aux_objective);
  if (!x) return std::nullopt;
  auto z = phi(bundle, *x);
  if (!is_stable(inst, z).stable) {
    throw std::logic_error("stable auxiliary point mapped to an unstable solution");
  }
  return z;
}

}  // namespace netbargain
