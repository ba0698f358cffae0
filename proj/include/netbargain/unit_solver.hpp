#pragma once

// Balanced solutions of unit-capacity games on a fixed maximum-weight
// matching M.
//
// Two routes:
//  * numeric-then-exact: damped synchronous edge rebalancing in floating
//    point, then bounded-denominator snapping and an exact certificate;
//  * exact-enumeration: for each group of vertices sharing the same outside
//    option function, enumerate which candidate attains the option, and solve
//    the induced linear feasibility problem exactly.
// Nothing is reported as balanced unless exact_verify returns all-zero
// residuals.

#include "netbargain/cmatching.hpp"
#include "netbargain/instance.hpp"
#include "netbargain/lp.hpp"
#include "netbargain/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace netbargain {

inline constexpr std::size_t kExactEnumerationMatchedLimit = 12;

enum class SolverMode { numeric_then_exact, exact_enumeration };

struct SolverConfig {
  SolverMode mode = SolverMode::numeric_then_exact;
  double tolerance = 1e-9;
  long long max_iterations = 100000;
  double damping = 0.5;

  void validate() const {
    if (!(tolerance > 0)) throw ValidationError("tolerance must be positive");
    if (max_iterations < 1) throw ValidationError("max-iterations must be positive");
    if (!(damping > 0 && damping <= 1)) throw ValidationError("damping must lie in (0, 1]");
  }
};

// ---------------------------------------------------------------------------
// Exact verification

struct Condition {
  enum class Kind { stability, uncovered_option, balance };
  Kind kind;
  VertexIndex vertex;
  std::optional<VertexIndex> partner;
  Rational residual;  // zero iff the condition holds with equality / is met
};

struct VerificationTranscript {
  bool balanced = false;
  std::vector<Rational> alpha;
  std::vector<Condition> conditions;
};

// Evaluates every stability and balance condition of (M, x) exactly.
// Stability residuals are max(0, alpha_u - x_u); uncovered residuals are
// alpha_u; balance residuals are (x_u - alpha_u) - (x_v - alpha_v).
inline VerificationTranscript exact_verify(const Instance& inst, const CMatching& m,
                                           const Allocation& x) {
  if (!inst.all_unit_capacity()) throw ValidationError("exact_verify needs a unit-capacity instance");
  if (x.payoff.size() != inst.vertex_count()) throw ValidationError("allocation has wrong length");
  for (VertexIndex v = 0; v < inst.vertex_count(); ++v) {
    if (x.payoff[v] < 0) throw ValidationError("negative payoff at '" + inst.id(v) + "'");
  }
  unit_solution(inst, m, x);  // matched pairs must sum to the edge weight

  VerificationTranscript t;
  t.alpha.resize(inst.vertex_count());
  for (VertexIndex u = 0; u < inst.vertex_count(); ++u) {
    t.alpha[u] = unit_outside_option(inst, m, x, u);
  }
  bool ok = true;
  for (VertexIndex u = 0; u < inst.vertex_count(); ++u) {
    if (m.degree(u) == 0) {
      t.conditions.push_back({Condition::Kind::uncovered_option, u, std::nullopt, t.alpha[u]});
      ok = ok && t.alpha[u] == 0;
    } else {
      Rational gap = t.alpha[u] - x.payoff[u];
      Rational residual = gap > 0 ? gap : Rational(0);
      t.conditions.push_back(
          {Condition::Kind::stability, u, m.partners(u).front().neighbor, residual});
      ok = ok && residual == 0;
    }
  }
  for (EdgeIndex e : m.edges()) {
    const auto& ed = inst.edge(e);
    Rational residual =
        (x.payoff[ed.u] - t.alpha[ed.u]) - (x.payoff[ed.v] - t.alpha[ed.v]);
    t.conditions.push_back({Condition::Kind::balance, ed.u, ed.v, residual});
    ok = ok && residual == 0;
  }
  t.balanced = ok;
  return t;
}

// ---------------------------------------------------------------------------
// Linear programs over a unit instance

// Fractional optimum of the c-matching relaxation (0 <= x_e <= 1,
// sum_{e ~ u} x_e <= c_u) by exact simplex. Works for any capacities.
inline lp::Result matching_relaxation(const Instance& inst) {
  lp::Problem p;
  p.variables = inst.edge_count();
  p.objective.resize(p.variables);
  for (EdgeIndex e = 0; e < inst.edge_count(); ++e) {
    p.objective[e] = inst.edge(e).weight;
    p.add_row(lp::Sense::less_equal, 1).coefficients[e] = 1;
  }
  for (VertexIndex v = 0; v < inst.vertex_count(); ++v) {
    if (inst.incident(v).empty()) continue;
    auto& row = p.add_row(lp::Sense::less_equal, Rational(inst.capacity(v)));
    for (const auto& inc : inst.incident(v)) row.coefficients[inc.edge] = 1;
  }
  return lp::solve(p);
}

namespace detail {

// Variables are the covered vertices of m, in vertex order.
struct CoveredIndex {
  std::vector<long long> column;  // vertex -> column, -1 if uncovered
  std::vector<VertexIndex> vertex;

  CoveredIndex(const Instance& inst, const CMatching& m) : column(inst.vertex_count(), -1) {
    for (VertexIndex v = 0; v < inst.vertex_count(); ++v) {
      if (m.degree(v) > 0) {
        column[v] = static_cast<long long>(vertex.size());
        vertex.push_back(v);
      }
    }
  }
  std::size_t size() const { return vertex.size(); }
};

// Rows shared by every unit feasibility problem on m: matched sums and the
// zero outside option of uncovered vertices. Returns false if some uncovered
// pair already violates stability.
inline bool add_base_rows(const Instance& inst, const CMatching& m, const CoveredIndex& cols,
                          lp::Problem& p) {
  for (EdgeIndex e : m.edges()) {
    const auto& ed = inst.edge(e);
    auto& row = p.add_row(lp::Sense::equal, ed.weight);
    row.coefficients[cols.column[ed.u]] = 1;
    row.coefficients[cols.column[ed.v]] = 1;
  }
  for (VertexIndex s = 0; s < inst.vertex_count(); ++s) {
    if (m.degree(s) > 0) continue;
    for (const auto& [t, e] : inst.incident(s)) {
      const auto& w = inst.edge(e).weight;
      if (cols.column[t] < 0) {
        if (w > 0) return false;
        continue;
      }
      p.add_row(lp::Sense::greater_equal, w).coefficients[cols.column[t]] = 1;
    }
  }
  return true;
}

inline Allocation allocation_from_columns(const Instance& inst, const CoveredIndex& cols,
                                          const std::vector<Rational>& values) {
  Allocation x{std::vector<Rational>(inst.vertex_count(), Rational(0))};
  for (std::size_t c = 0; c < cols.size(); ++c) x.payoff[cols.vertex[c]] = values[c];
  return x;
}

}  // namespace detail

// A stable solution on m (a point with x_u + x_v >= w_uv on every unmatched
// edge), or nullopt if none exists. `objective` (per vertex, maximized)
// selects among stable solutions; empty picks an arbitrary vertex.
inline std::optional<Allocation> find_stable_unit(const Instance& inst, const CMatching& m,
                                                  const std::vector<Rational>& objective = {}) {
  if (!inst.all_unit_capacity()) throw ValidationError("find_stable_unit needs unit capacities");
  detail::CoveredIndex cols(inst, m);
  lp::Problem p;
  p.variables = cols.size();
  if (!objective.empty()) {
    p.objective.resize(p.variables);
    for (std::size_t c = 0; c < cols.size(); ++c) p.objective[c] = objective.at(cols.vertex[c]);
  }
  if (!detail::add_base_rows(inst, m, cols, p)) return std::nullopt;
  for (EdgeIndex e = 0; e < inst.edge_count(); ++e) {
    if (m.contains(e)) continue;
    const auto& ed = inst.edge(e);
    if (cols.column[ed.u] < 0 || cols.column[ed.v] < 0) continue;  // handled in base rows
    auto& row = p.add_row(lp::Sense::greater_equal, ed.weight);
    row.coefficients[cols.column[ed.u]] = 1;
    row.coefficients[cols.column[ed.v]] = 1;
  }
  auto result = lp::solve(p);
  if (result.status != lp::Status::optimal) return std::nullopt;
  return detail::allocation_from_columns(inst, cols, result.x);
}

struct StableExistence {
  bool exists = false;
  LPRelaxationResult lp;
};

// Unit-capacity stable solutions exist iff the matching relaxation has an
// integral optimum (half-integral enumeration, |E| <= 16).
inline StableExistence stable_exists_unit(const Instance& inst) {
  if (!inst.all_unit_capacity()) throw ValidationError("stable_exists_unit needs unit capacities");
  StableExistence out;
  out.lp = lp_integrality_check(inst);
  out.exists = out.lp.has_integral_optimal;
  return out;
}

// ---------------------------------------------------------------------------
// Balanced solver

enum class OutcomeStatus { balanced_found, none_exists, inconclusive };

inline const char* to_string(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::balanced_found: return "balanced-found";
    case OutcomeStatus::none_exists: return "none-exists";
    case OutcomeStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

struct GapCertificate {
  Rational fractional_optimum;
  Rational matching_weight;
  std::vector<Rational> fractional_point;  // per edge of the unit instance
};

struct BalancedOutcome {
  OutcomeStatus status = OutcomeStatus::inconclusive;
  std::optional<Allocation> allocation;
  std::optional<GapCertificate> gap;
  std::optional<VerificationTranscript> transcript;
  std::string method;             // "numeric", "exact-enumeration", "lp-gap", ...
  long long iterations = 0;       // numeric sweeps performed
  double numeric_residual = 0;    // at the last sweep
  std::string note;
};

class NotMaximumError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

namespace detail {

struct NumericRun {
  std::vector<double> x;
  bool converged = false;
  long long iterations = 0;
  double residual = 0;
};

inline NumericRun rebalance(const Instance& inst, const CMatching& m, const SolverConfig& cfg) {
  const std::size_t n = inst.vertex_count();
  std::vector<double> w(inst.edge_count());
  for (EdgeIndex e = 0; e < inst.edge_count(); ++e) w[e] = to_double(inst.edge(e).weight);
  NumericRun run;
  run.x.assign(n, 0.0);
  for (EdgeIndex e : m.edges()) {
    run.x[inst.edge(e).u] = w[e] / 2;
    run.x[inst.edge(e).v] = w[e] / 2;
  }
  std::vector<double> alpha(n);
  auto options = [&] {
    for (VertexIndex u = 0; u < n; ++u) {
      double best = 0;
      for (const auto& [v, e] : inst.incident(u)) {
        if (!m.contains(e)) best = std::max(best, w[e] - run.x[v]);
      }
      alpha[u] = best;
    }
  };
  auto residual = [&] {
    double r = 0;
    for (VertexIndex u = 0; u < n; ++u) {
      if (m.degree(u) == 0) {
        r = std::max(r, alpha[u]);
      } else {
        r = std::max(r, alpha[u] - run.x[u]);
      }
    }
    for (EdgeIndex e : m.edges()) {
      const auto& ed = inst.edge(e);
      r = std::max(r, std::abs((run.x[ed.u] - alpha[ed.u]) - (run.x[ed.v] - alpha[ed.v])));
    }
    return r;
  };

  for (run.iterations = 0; run.iterations < cfg.max_iterations; ++run.iterations) {
    options();
    run.residual = residual();
    if (run.residual < cfg.tolerance) {
      run.converged = true;
      return run;
    }
    for (EdgeIndex e : m.edges()) {
      const auto& ed = inst.edge(e);
      double target = alpha[ed.u] + (w[e] - alpha[ed.u] - alpha[ed.v]) / 2;
      target = std::clamp(target, 0.0, w[e]);
      const double next = (1 - cfg.damping) * run.x[ed.u] + cfg.damping * target;
      run.x[ed.u] = next;
      run.x[ed.v] = w[e] - next;
    }
  }
  options();
  run.residual = residual();
  run.converged = run.residual < cfg.tolerance;
  return run;
}

inline std::optional<Allocation> snap(const Instance& inst, const CMatching& m,
                                      const std::vector<double>& x) {
  Integer denominators = 1;
  for (const auto& e : inst.edges()) {
    denominators = lcm(denominators, boost::multiprecision::denominator(e.weight));
  }
  for (int k = 0; k <= 20; ++k) {
    const Integer bound = Integer(3) * (Integer(1) << k) * denominators;
    Allocation candidate{std::vector<Rational>(inst.vertex_count(), Rational(0))};
    bool in_range = true;
    for (EdgeIndex e : m.edges()) {
      const auto& ed = inst.edge(e);
      Rational xu = limit_denominator(from_double(x[ed.u]), bound);
      if (xu < 0 || xu > ed.weight) {
        in_range = false;
        break;
      }
      candidate.payoff[ed.u] = xu;
      candidate.payoff[ed.v] = ed.weight - xu;
    }
    if (!in_range) continue;
    if (exact_verify(inst, m, candidate).balanced) return candidate;
  }
  return std::nullopt;
}

// One candidate for alpha_u: either the constant floor (zero or the best
// uncovered neighbor) or w_ut - x_t for a covered unmatched neighbor t.
struct OptionCandidate {
  std::optional<VertexIndex> target;
  Rational weight;  // the constant itself when target is empty
  friend bool operator<(const OptionCandidate& a, const OptionCandidate& b) {
    return std::tie(a.target, a.weight) < std::tie(b.target, b.weight);
  }
  friend bool operator==(const OptionCandidate&, const OptionCandidate&) = default;
};

struct OptionClass {
  std::vector<OptionCandidate> candidates;  // [0] is the constant
  std::vector<VertexIndex> members;
};

inline std::vector<OptionClass> option_classes(const Instance& inst, const CMatching& m) {
  std::map<std::vector<OptionCandidate>, std::size_t> seen;
  std::vector<OptionClass> classes;
  for (VertexIndex u = 0; u < inst.vertex_count(); ++u) {
    if (m.degree(u) == 0) continue;
    Rational floor = 0;
    std::vector<OptionCandidate> variable;
    for (const auto& [t, e] : inst.incident(u)) {
      if (m.contains(e)) continue;
      const auto& w = inst.edge(e).weight;
      if (m.degree(t) == 0) {
        floor = std::max(floor, w);
      } else {
        variable.push_back({t, w});
      }
    }
    std::vector<OptionCandidate> key{{std::nullopt, floor}};
    key.insert(key.end(), variable.begin(), variable.end());
    auto [it, inserted] = seen.emplace(key, classes.size());
    if (inserted) classes.push_back({key, {}});
    classes[it->second].members.push_back(u);
  }
  return classes;
}

class PatternSearch {
 public:
  PatternSearch(const Instance& inst, const CMatching& m)
      : inst_(inst), m_(m), cols_(inst, m), classes_(option_classes(inst, m)),
        class_of_(inst.vertex_count(), static_cast<std::size_t>(-1)) {
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      for (VertexIndex u : classes_[c].members) class_of_[u] = c;
    }
    choice_.assign(classes_.size(), 0);
  }

  std::optional<Allocation> run() {
    base_ = lp::Problem{};
    base_.variables = cols_.size();
    if (!add_base_rows(inst_, m_, cols_, base_)) return std::nullopt;
    return descend(0);
  }

  std::size_t patterns_tried() const { return tried_; }

 private:
  // alpha_u under the current choice, as (coefficients over columns, constant).
  void option_expression(VertexIndex u, std::vector<Rational>& coef, Rational& constant) const {
    const auto& cand = classes_[class_of_[u]].candidates[choice_[class_of_[u]]];
    std::fill(coef.begin(), coef.end(), Rational(0));
    constant = cand.weight;
    if (cand.target) coef[cols_.column[*cand.target]] = -1;
  }

  lp::Problem build(std::size_t assigned) const {
    lp::Problem p = base_;
    const std::size_t n = cols_.size();
    // Dominance rows: the chosen candidate is >= every other one.
    for (std::size_t c = 0; c < assigned; ++c) {
      const auto& cands = classes_[c].candidates;
      const auto& chosen = cands[choice_[c]];
      for (std::size_t k = 0; k < cands.size(); ++k) {
        if (k == choice_[c]) continue;
        // chosen - other >= 0
        auto& row = p.add_row(lp::Sense::greater_equal, Rational(0));
        Rational constant = chosen.weight - cands[k].weight;
        if (chosen.target) row.coefficients[cols_.column[*chosen.target]] -= 1;
        if (cands[k].target) row.coefficients[cols_.column[*cands[k].target]] += 1;
        row.rhs = -constant;
      }
    }
    std::vector<Rational> cu(n), cv(n);
    Rational ku, kv;
    for (EdgeIndex e : m_.edges()) {
      const auto& ed = inst_.edge(e);
      if (class_of_[ed.u] >= assigned || class_of_[ed.v] >= assigned) continue;
      option_expression(ed.u, cu, ku);
      option_expression(ed.v, cv, kv);
      // (x_u - a_u) - (x_v - a_v) = 0
      auto& bal = p.add_row(lp::Sense::equal, Rational(0));
      for (std::size_t j = 0; j < n; ++j) bal.coefficients[j] = cv[j] - cu[j];
      bal.coefficients[cols_.column[ed.u]] += 1;
      bal.coefficients[cols_.column[ed.v]] -= 1;
      bal.rhs = ku - kv;
      // x_u - a_u >= 0 (x_v side follows from balance)
      auto& st = p.add_row(lp::Sense::greater_equal, Rational(0));
      for (std::size_t j = 0; j < n; ++j) st.coefficients[j] = -cu[j];
      st.coefficients[cols_.column[ed.u]] += 1;
      st.rhs = ku;
    }
    return p;
  }

  std::optional<Allocation> descend(std::size_t c) {
    ++tried_;
    auto result = lp::solve(build(c));
    if (result.status != lp::Status::optimal) return std::nullopt;
    if (c == classes_.size()) {
      auto x = allocation_from_columns(inst_, cols_, result.x);
      if (exact_verify(inst_, m_, x).balanced) return x;
      return std::nullopt;
    }
    for (std::size_t k = 0; k < classes_[c].candidates.size(); ++k) {
      choice_[c] = k;
      if (auto found = descend(c + 1)) return found;
    }
    choice_[c] = 0;
    return std::nullopt;
  }

  const Instance& inst_;
  const CMatching& m_;
  CoveredIndex cols_;
  std::vector<OptionClass> classes_;
  std::vector<std::size_t> class_of_;
  std::vector<std::size_t> choice_;
  lp::Problem base_;
  std::size_t tried_ = 0;
};

}  // namespace detail

// `certified_optimum`, when given, is a maximum matching weight established
// elsewhere (used when the instance is too large to re-check exhaustively).
inline BalancedOutcome solve_balanced_unit(const Instance& inst, const CMatching& m,
                                           const SolverConfig& cfg = {},
                                           const std::optional<Rational>& certified_optimum = {}) {
  cfg.validate();
  if (!inst.all_unit_capacity()) throw ValidationError("solve_balanced_unit needs unit capacities");
  BalancedOutcome out;
  const Rational weight = m.weight(inst);
  const auto relaxation = matching_relaxation(inst);
  if (relaxation.objective != weight) {
    // Either m is not maximum or the relaxation has no integral optimum.
    Rational optimum;
    if (certified_optimum) {
      optimum = *certified_optimum;
    } else if (inst.edge_count() <= kExhaustiveEdgeLimit) {
      optimum = max_weight_c_matching(inst).weight;
    } else {
      throw GuardError("cannot certify that the matching is maximum: " +
                       std::to_string(inst.edge_count()) + " edges");
    }
    if (weight != optimum) {
      throw NotMaximumError("matching has weight " + to_string(weight) +
                            " but the maximum is " + to_string(optimum) +
                            "; balanced solutions live on maximum-weight matchings only");
    }
    out.status = OutcomeStatus::none_exists;
    out.method = "lp-gap";
    out.gap = GapCertificate{relaxation.objective, weight, relaxation.x};
    return out;
  }

  if (cfg.mode == SolverMode::numeric_then_exact) {
    auto run = detail::rebalance(inst, m, cfg);
    out.iterations = run.iterations;
    out.numeric_residual = run.residual;
    if (run.converged) {
      if (auto x = detail::snap(inst, m, run.x)) {
        out.status = OutcomeStatus::balanced_found;
        out.method = "numeric";
        out.transcript = exact_verify(inst, m, *x);
        out.allocation = std::move(x);
        return out;
      }
      out.note = "numeric fixed point could not be snapped to an exact balanced point";
    } else {
      out.note = "rebalancing did not converge";
    }
  }

  if (m.size() > kExactEnumerationMatchedLimit) {
    out.status = OutcomeStatus::inconclusive;
    out.method = "none";
    out.note += (out.note.empty() ? "" : "; ") + std::string("exact enumeration needs at most ") +
                std::to_string(kExactEnumerationMatchedLimit) + " matched edges";
    return out;
  }
  detail::PatternSearch search(inst, m);
  if (auto x = search.run()) {
    out.status = OutcomeStatus::balanced_found;
    out.method = "exact-enumeration";
    out.transcript = exact_verify(inst, m, *x);
    out.allocation = std::move(x);
    return out;
  }
  // A stable point exists (integral relaxation) but no pattern was feasible;
  // this contradicts the unit-capacity existence theorem, so never claim none.
  out.status = OutcomeStatus::inconclusive;
  out.method = "exact-enumeration";
  out.note = "no witness pattern admitted a balanced point";
  return out;
}

}  // namespace netbargain
