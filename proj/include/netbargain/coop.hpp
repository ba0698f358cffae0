#pragma once

// The matching game (N, nu) of an instance: coalition values, powers, core
// and prekernel membership, gadget / bad-vertex detection, and a harness
// checking "balanced <=> prekernel" under the acyclic, gadget-free conditions.

#include "netbargain/cmatching.hpp"
#include "netbargain/instance.hpp"
#include "netbargain/semantics.hpp"

#include <bit>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

namespace netbargain {

inline constexpr std::size_t kCoalitionVertexLimit = 16;

using Coalition = std::uint32_t;  // bit v set <=> vertex index v in the coalition

inline std::vector<VertexIndex> members(Coalition s) {
  std::vector<VertexIndex> out;
  for (VertexIndex v = 0; s != 0; ++v, s >>= 1) {
    if (s & 1U) out.push_back(v);
  }
  return out;
}

// Lexicographic order on sorted member sequences; a proper prefix is smaller.
inline bool coalition_less(Coalition a, Coalition b) {
  const auto ma = members(a);
  const auto mb = members(b);
  return std::lexicographical_compare(ma.begin(), ma.end(), mb.begin(), mb.end());
}

inline std::string coalition_name(const Instance& inst, Coalition s) {
  std::string out = "{";
  bool first = true;
  for (VertexIndex v : members(s)) {
    if (!first) out += ",";
    out += inst.id(v);
    first = false;
  }
  return out + "}";
}

inline void require_coalition_guard(const Instance& inst) {
  if (inst.vertex_count() > kCoalitionVertexLimit) {
    throw GuardError("coalition enumeration needs at most " +
                     std::to_string(kCoalitionVertexLimit) + " vertices, got " +
                     std::to_string(inst.vertex_count()) +
                     "; analyze a smaller instance or a sub-instance");
  }
}

inline Coalition coalition_of(const Instance& inst, const std::vector<VertexId>& ids) {
  require_coalition_guard(inst);
  Coalition s = 0;
  for (const auto& id : ids) s |= Coalition{1} << inst.index_of(id);
  return s;
}

// nu(S): maximum-weight c-matching of the induced subgraph G[S].
inline Rational coalition_value(const Instance& inst, Coalition s) {
  std::vector<EdgeIndex> inside;
  for (EdgeIndex e = 0; e < inst.edge_count(); ++e) {
    const auto& ed = inst.edge(e);
    if ((s >> ed.u & 1U) && (s >> ed.v & 1U)) inside.push_back(e);
  }
  return max_weight_c_matching_value(inst, std::move(inside));
}

inline Rational coalition_value(const Instance& inst, const std::vector<VertexId>& ids) {
  return coalition_value(inst, coalition_of(inst, ids));
}

class CoalitionValueTable {
 public:
  explicit CoalitionValueTable(const Instance& inst) : n_(inst.vertex_count()) {
    require_coalition_guard(inst);
    values_.resize(std::size_t{1} << n_);
    for (Coalition s = 0; s < values_.size(); ++s) values_[s] = coalition_value(inst, s);
  }

  const Rational& operator[](Coalition s) const { return values_.at(s); }
  std::size_t vertex_count() const { return n_; }
  std::size_t size() const { return values_.size(); }
  Coalition grand() const { return static_cast<Coalition>(values_.size() - 1); }

 private:
  std::size_t n_;
  std::vector<Rational> values_;
};

inline Rational coalition_payoff(const Allocation& x, Coalition s) {
  Rational total = 0;
  for (VertexIndex v : members(s)) total += x.payoff[v];
  return total;
}

// Excess nu(S) - x(S) for every coalition.
inline std::vector<Rational> excesses(const CoalitionValueTable& nu, const Allocation& x) {
  if (x.payoff.size() != nu.vertex_count()) throw ValidationError("allocation has wrong length");
  std::vector<Rational> out(nu.size());
  std::vector<Rational> payoff(nu.size(), Rational(0));
  for (Coalition s = 1; s < nu.size(); ++s) {
    const auto low = static_cast<VertexIndex>(std::countr_zero(s));
    payoff[s] = payoff[s & (s - 1)] + x.payoff[low];
  }
  for (Coalition s = 0; s < nu.size(); ++s) out[s] = nu[s] - payoff[s];
  return out;
}

struct Power {
  Rational value;
  Coalition witness = 0;
};

namespace detail {

inline Power power_from_excess(const std::vector<Rational>& excess, VertexIndex u, VertexIndex v) {
  std::optional<Power> best;
  const Coalition with_u = Coalition{1} << u;
  const Coalition with_v = Coalition{1} << v;
  for (Coalition s = 0; s < excess.size(); ++s) {
    if (!(s & with_u) || (s & with_v)) continue;
    if (!best || excess[s] > best->value ||
        (excess[s] == best->value && coalition_less(s, best->witness))) {
      best = Power{excess[s], s};
    }
  }
  return *best;
}

}  // namespace detail

// s_uv(x) = max over T with u in T, v not in T of nu(T) - x(T), with the
// lexicographically least maximizing T.
inline Power power(const CoalitionValueTable& nu, const Allocation& x, VertexIndex u,
                   VertexIndex v) {
  if (u == v) throw ValidationError("power needs two distinct vertices");
  return detail::power_from_excess(excesses(nu, x), u, v);
}

inline Power power(const Instance& inst, const Allocation& x, VertexIndex u, VertexIndex v) {
  return power(CoalitionValueTable(inst), x, u, v);
}

class PowerMatrix {
 public:
  PowerMatrix(const CoalitionValueTable& nu, const Allocation& x) : n_(nu.vertex_count()) {
    const auto excess = excesses(nu, x);
    entries_.resize(n_ * n_);
    for (VertexIndex u = 0; u < n_; ++u) {
      for (VertexIndex v = 0; v < n_; ++v) {
        if (u != v) entries_[u * n_ + v] = detail::power_from_excess(excess, u, v);
      }
    }
  }

  const Power& at(VertexIndex u, VertexIndex v) const { return entries_.at(u * n_ + v); }
  std::size_t vertex_count() const { return n_; }

 private:
  std::size_t n_;
  std::vector<Power> entries_;
};

struct CoreVerdict {
  bool in_core = false;
  Rational grand_value;
  Rational grand_payoff;
  std::optional<Coalition> violating;  // first S with x(S) < nu(S)
};

inline CoreVerdict in_core(const CoalitionValueTable& nu, const Allocation& x) {
  const auto excess = excesses(nu, x);
  CoreVerdict v;
  v.grand_value = nu[nu.grand()];
  v.grand_payoff = v.grand_value - excess[nu.grand()];
  for (Coalition s = 1; s < excess.size(); ++s) {
    if (excess[s] > 0) {
      v.violating = s;
      break;
    }
  }
  v.in_core = !v.violating && v.grand_value == v.grand_payoff;
  return v;
}

inline CoreVerdict in_core(const Instance& inst, const Allocation& x) {
  return in_core(CoalitionValueTable(inst), x);
}

struct PrekernelVerdict {
  bool in_prekernel = false;
  std::optional<std::pair<VertexIndex, VertexIndex>> violating;
  std::optional<Power> forward;   // s_uv at the violating pair
  std::optional<Power> backward;  // s_vu
};

inline PrekernelVerdict in_prekernel(const PowerMatrix& powers) {
  PrekernelVerdict v;
  const auto n = powers.vertex_count();
  for (VertexIndex a = 0; a < n && !v.violating; ++a) {
    for (VertexIndex b = a + 1; b < n; ++b) {
      if (powers.at(a, b).value != powers.at(b, a).value) {
        v.violating = std::pair{a, b};
        v.forward = powers.at(a, b);
        v.backward = powers.at(b, a);
        break;
      }
    }
  }
  v.in_prekernel = !v.violating;
  return v;
}

inline PrekernelVerdict in_prekernel(const CoalitionValueTable& nu, const Allocation& x) {
  return in_prekernel(PowerMatrix(nu, x));
}

inline PrekernelVerdict in_prekernel(const Instance& inst, const Allocation& x) {
  return in_prekernel(CoalitionValueTable(inst), x);
}

// ---------------------------------------------------------------------------
// Gadgets

namespace detail {

// Path from `from` to `to` in the graph (V, M) with `removed` deleted.
inline std::optional<std::vector<VertexIndex>> matching_path(const Instance& inst,
                                                             const CMatching& m, VertexIndex from,
                                                             VertexIndex to,
                                                             std::optional<VertexIndex> removed) {
  if (removed && (*removed == from || *removed == to)) return std::nullopt;
  const std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> prev(inst.vertex_count(), none);
  std::queue<VertexIndex> q;
  prev[from] = from;
  q.push(from);
  while (!q.empty()) {
    const auto a = q.front();
    q.pop();
    if (a == to) break;
    for (const auto& [b, e] : m.partners(a)) {
      if (prev[b] != none || (removed && b == *removed)) continue;
      prev[b] = a;
      q.push(b);
    }
  }
  if (prev[to] == none) return std::nullopt;
  std::vector<VertexIndex> path{to};
  while (path.back() != from) path.push_back(prev[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace detail

struct GadgetEntry {
  VertexIndex u;
  VertexIndex v;                          // matched neighbor of u
  VertexIndex best_outside;               // v'
  std::optional<VertexIndex> weakest;     // u'
  Rational option;                        // alpha_u
  std::optional<std::vector<VertexIndex>> type1_path;  // v ... v' in M
  std::optional<std::vector<VertexIndex>> type2_path;  // u ... u' in M avoiding v'
};

struct GadgetReport {
  std::vector<GadgetEntry> entries;
  std::vector<VertexIndex> bad_vertices;
  // Vertices whose bad/not-bad verdict depends on how ties for v' or u' are
  // broken.
  std::vector<VertexIndex> tie_sensitive;

  bool empty() const { return bad_vertices.empty(); }
};

namespace detail {

struct OptionResolution {
  VertexIndex best_outside;
  std::optional<VertexIndex> weakest;
};

// Every (v', u') pair attaining alpha_u > 0, in lexicographic order.
inline std::vector<OptionResolution> all_option_resolutions(const Instance& inst,
                                                            const Solution& s, VertexIndex u,
                                                            const Rational& alpha) {
  std::vector<OptionResolution> out;
  const auto& m = s.matching();
  for (const auto& [vp, e] : inst.incident(u)) {
    if (m.contains(e)) continue;
    if (!m.saturated(inst, vp)) {
      if (inst.edge(e).weight == alpha) out.push_back({vp, std::nullopt});
      continue;
    }
    std::optional<Rational> weakest;
    for (const auto& [w, f] : m.partners(vp)) {
      const auto& z = s.share(inst, f, vp);
      if (!weakest || z < *weakest) weakest = z;
    }
    if (inst.edge(e).weight - *weakest != alpha) continue;
    for (const auto& [w, f] : m.partners(vp)) {
      if (s.share(inst, f, vp) == *weakest) out.push_back({vp, w});
    }
  }
  return out;
}

inline bool is_bad_under(const Instance& inst, const CMatching& m, VertexIndex u,
                         const OptionResolution& r) {
  for (const auto& p : m.partners(u)) {
    if (matching_path(inst, m, p.neighbor, r.best_outside, std::nullopt)) return true;
  }
  return r.weakest && matching_path(inst, m, u, *r.weakest, r.best_outside).has_value();
}

}  // namespace detail

inline GadgetReport detect_bad_vertices(const Instance& inst, const Solution& s) {
  GadgetReport report;
  const auto& m = s.matching();
  const auto weakest = detail::weakest_contracts(inst, s);
  for (VertexIndex u = 0; u < inst.vertex_count(); ++u) {
    const auto option = detail::outside_option_with(inst, s, weakest, u);
    if (option.value <= 0 || !option.witness) continue;
    const auto vp = option.witness->best_outside;
    const auto up = option.witness->weakest_partner;
    bool bad = false;
    for (const auto& p : m.partners(u)) {
      GadgetEntry entry{u, p.neighbor, vp, up, option.value, std::nullopt, std::nullopt};
      entry.type1_path = detail::matching_path(inst, m, p.neighbor, vp, std::nullopt);
      if (up) entry.type2_path = detail::matching_path(inst, m, u, *up, vp);
      bad = bad || entry.type1_path || entry.type2_path;
      report.entries.push_back(std::move(entry));
    }
    if (bad) report.bad_vertices.push_back(u);

    const auto resolutions = detail::all_option_resolutions(inst, s, u, option.value);
    for (const auto& r : resolutions) {
      if (detail::is_bad_under(inst, m, u, r) != bad) {
        report.tie_sensitive.push_back(u);
        break;
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Balanced <=> prekernel harness

struct Lemma2Check {
  VertexIndex u;
  VertexIndex v;
  Rational power;  // s_uv
  Rational bound;  // -z_uv + alpha_u
  bool holds;      // power <= bound
};

struct Theorem1Verdict {
  bool acyclic = false;
  bool gadget_free = false;
  bool conditions_met = false;
  bool balanced = false;
  bool in_prekernel = false;
  bool equivalence_holds = false;  // balanced == in_prekernel
  bool lemma2_holds = true;
  bool bound_tight = true;         // s_uv == -z_uv + alpha_u on every matched (u, v)
  std::vector<Lemma2Check> lemma2;
  GadgetReport gadgets;
};

class HarnessPreconditionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Requires x in the core, s stable and allocation_of(s) == x. When the
// matching is acyclic and gadget-free, equivalence_holds is the claim under
// test; otherwise both sides are still reported.
inline Theorem1Verdict theorem1_harness(const Instance& inst, const CoalitionValueTable& nu,
                                        const Allocation& x, const Solution& s) {
  if (!(allocation_of(inst, s) == x)) {
    throw HarnessPreconditionError("allocation does not match the solution's payoffs");
  }
  if (!in_core(nu, x).in_core) throw HarnessPreconditionError("allocation is not in the core");
  const auto balance = is_balanced(inst, s);
  if (!balance.stable) throw HarnessPreconditionError("solution is not stable");

  Theorem1Verdict v;
  v.acyclic = is_acyclic(inst, s.matching());
  v.gadgets = detect_bad_vertices(inst, s);
  v.gadget_free = v.gadgets.empty();
  v.conditions_met = v.acyclic && v.gadget_free;
  v.balanced = balance.balanced;
  const PowerMatrix powers(nu, x);
  v.in_prekernel = in_prekernel(powers).in_prekernel;
  v.equivalence_holds = v.balanced == v.in_prekernel;

  const auto alpha = outside_options(inst, s);
  for (EdgeIndex e : s.matching().edges()) {
    const auto& ed = inst.edge(e);
    for (auto [a, b] : {std::pair{ed.u, ed.v}, std::pair{ed.v, ed.u}}) {
      Lemma2Check c{a, b, powers.at(a, b).value, alpha[a] - s.share(inst, e, a), false};
      c.holds = c.power <= c.bound;
      v.lemma2_holds = v.lemma2_holds && c.holds;
      v.bound_tight = v.bound_tight && c.power == c.bound;
      v.lemma2.push_back(std::move(c));
    }
  }
  return v;
}

inline Theorem1Verdict theorem1_harness(const Instance& inst, const Allocation& x,
                                        const Solution& s) {
  return theorem1_harness(inst, CoalitionValueTable(inst), x, s);
}

}  // namespace netbargain
