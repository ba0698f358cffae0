#pragma once

// Pinned worked examples with exact end-to-end certification.
//
// Six-vertex example (all capacities 2): outer cycle A-B-C-D-E-F-A plus the
// chord B-E. The weights are the unique solution of the following constraints
// under the A<->D, B<->E, C<->F symmetry:
//   nu({A,F}) = nu({C,D}) = 30            -> w_FA = w_CD = 30
//   x = 20 with even splits on CD, FA     -> z_CB = 5, so w_BC = z_BC + 5 = 15 + 5 = 20
//   alpha_B = 10 - 5 (weakest contract 5) -> w_BE = 10
//   optimum 120 = 30 + 30 + 2*w_BC + 2*w_AB -> w_AB = w_DE = 10
//   nu(C2) = nu(C3) = 70 then follows (20 + 30 + 10 + 10).
//
// Reduction example: u (capacity 4) matched to a, b, x, y; x (capacity 2)
// matched to u, c; y (capacity 2) matched to u, d; unmatched edges u-v and
// u-w; every other vertex has capacity 1; all weights 1.

#include "netbargain/cmatching.hpp"
#include "netbargain/coop.hpp"
#include "netbargain/reduction.hpp"
#include "netbargain/semantics.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace netbargain::repro {

struct Certification {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Transcript {
  std::vector<Certification> items;
  bool passed() const {
    return !items.empty() &&
           std::all_of(items.begin(), items.end(), [](const auto& c) { return c.passed; });
  }
};

inline Instance lemma1_instance(const Rational& w_be = 10, long long capacity = 2) {
  std::vector<VertexSpec> vs;
  for (const char* id : {"A", "B", "C", "D", "E", "F"}) vs.push_back({id, capacity});
  return Instance::create(vs, {{"A", "B", 10},
                               {"B", "C", 20},
                               {"C", "D", 30},
                               {"D", "E", 10},
                               {"E", "F", 20},
                               {"F", "A", 30},
                               {"B", "E", w_be}});
}

inline CMatching lemma1_outer_cycle(const Instance& inst) {
  std::vector<EdgeIndex> edges;
  for (auto [a, b] : {std::pair{"A", "B"}, {"B", "C"}, {"C", "D"}, {"D", "E"}, {"E", "F"},
                      {"F", "A"}}) {
    edges.push_back(inst.edge_between(a, b));
  }
  return CMatching::make(inst, edges);
}

// z_AB = z_DE = 10/3, z_BA = z_ED = 20/3, z_BC = z_EF = 35/3, z_CB = z_FE = 25/3,
// and even splits of 15 on CD and FA.
inline Solution lemma1_balanced_solution(const Instance& inst) {
  const Rational third(1, 3);
  std::map<std::pair<VertexId, VertexId>, Rational> z{
      {{"A", "B"}, 10 * third}, {{"B", "A"}, 20 * third}, {{"B", "C"}, 35 * third},
      {{"C", "B"}, 25 * third}, {{"C", "D"}, 15},         {{"D", "C"}, 15},
      {{"D", "E"}, 10 * third}, {{"E", "D"}, 20 * third}, {{"E", "F"}, 35 * third},
      {{"F", "E"}, 25 * third}, {{"F", "A"}, 15},         {{"A", "F"}, 15}};
  return Solution::from_splits(inst, lemma1_outer_cycle(inst), z);
}

// Walks a cycle-shaped matching starting with an even split on (first, second),
// filling each next share from the allocation. Returns nullopt if the walk
// does not close consistently or yields a negative share.
inline std::optional<Solution> splits_from_allocation_on_cycle(const Instance& inst,
                                                               const CMatching& m,
                                                               const Allocation& x,
                                                               VertexIndex first,
                                                               VertexIndex second) {
  std::vector<Rational> shares(2 * inst.edge_count(), Rational(0));
  auto set = [&](VertexIndex owner, VertexIndex other, const Rational& value) {
    const EdgeIndex e = *inst.find_edge(owner, other);
    shares[2 * e + (inst.edge(e).u == owner ? 0 : 1)] = value;
  };
  auto get = [&](VertexIndex owner, VertexIndex other) {
    const EdgeIndex e = *inst.find_edge(owner, other);
    return shares[2 * e + (inst.edge(e).u == owner ? 0 : 1)];
  };
  const Rational half = inst.edge(*inst.find_edge(first, second)).weight / 2;
  set(first, second, half);
  set(second, first, half);
  VertexIndex prev = first;
  VertexIndex cur = second;
  for (std::size_t steps = 0; steps < inst.vertex_count(); ++steps) {
    const auto partners = m.partners(cur);
    if (partners.size() != 2) return std::nullopt;
    const VertexIndex next =
        partners[0].neighbor == prev ? partners[1].neighbor : partners[0].neighbor;
    if (next == first) {
      // Close the cycle: cur-first must match both allocations.
      const Rational z_cur = x.payoff[cur] - get(cur, prev);
      const Rational w = inst.edge(*inst.find_edge(cur, first)).weight;
      set(cur, first, z_cur);
      set(first, cur, w - z_cur);
      if (get(first, cur) + get(first, second) != x.payoff[first]) return std::nullopt;
      try {
        return Solution::make(inst, m, shares);
      } catch (const ValidationError&) {
        return std::nullopt;
      }
    }
    const Rational z_cur = x.payoff[cur] - get(cur, prev);
    const Rational w = inst.edge(*inst.find_edge(cur, next)).weight;
    set(cur, next, z_cur);
    set(next, cur, w - z_cur);
    prev = cur;
    cur = next;
  }
  return std::nullopt;
}

namespace detail {

class Recorder {
 public:
  explicit Recorder(Transcript& t) : t_(t) {}
  // Returns false once anything has failed; later items are skipped.
  bool check(std::string name, bool ok, std::string detail) {
    if (failed_) return false;
    t_.items.push_back({std::move(name), ok, std::move(detail)});
    failed_ = !ok;
    return ok;
  }
  bool failed() const { return failed_; }

 private:
  Transcript& t_;
  bool failed_ = false;
};

inline std::string show(const Rational& q) { return to_string(q); }

}  // namespace detail

// Certifies every stated quantity of the example from the weights alone.
inline Transcript lemma1_verify(const Instance& inst) {
  Transcript t;
  detail::Recorder rec(t);
  const std::vector<VertexId> ids{"A", "B", "C", "D", "E", "F"};

  bool shape = inst.vertex_count() == 6;
  for (const auto& id : ids) {
    shape = shape && inst.find(id) && inst.capacity(inst.index_of(id)) == 2;
  }
  shape = shape && inst.edge_count() == 7;
  if (!rec.check("fixture", shape,
                 shape ? "vertices A..F with capacity 2, 7 edges"
                       : "fixture mismatch: expected vertices A..F, all capacity 2, 7 edges")) {
    return t;
  }
  auto idx = [&](const char* id) { return inst.index_of(id); };

  // (1) unique optimum
  const auto best = max_weight_c_matching(inst);
  CMatching cycle;
  try {
    cycle = lemma1_outer_cycle(inst);
  } catch (const ValidationError& e) {
    rec.check("optimum", false, std::string("fixture mismatch: ") + e.what());
    return t;
  }
  const bool unique = is_unique_optimum(inst);
  if (!rec.check("optimum", best.matching == cycle && best.weight == 120 && unique,
                 "max c-matching weight " + detail::show(best.weight) +
                     (best.matching == cycle ? ", equals outer cycle" : ", differs from outer cycle") +
                     (unique ? ", unique" : ", not unique"))) {
    return t;
  }
  const CoalitionValueTable nu(inst);
  auto value = [&](std::vector<VertexId> s) { return nu[coalition_of(inst, s)]; };
  const auto af = value({"A", "F"});
  const auto cd = value({"C", "D"});
  const auto c2 = value({"B", "C", "D", "E"});
  const auto c3 = value({"E", "F", "A", "B"});
  if (!rec.check("coalition values", af == 30 && cd == 30 && c2 == 70 && c3 == 70,
                 "nu(AF)=" + detail::show(af) + " nu(CD)=" + detail::show(cd) +
                     " nu(C2)=" + detail::show(c2) + " nu(C3)=" + detail::show(c3))) {
    return t;
  }

  // (2) x = 20 in core and prekernel
  const Allocation x20 = uniform_allocation(inst, 20);
  const PowerMatrix p20(nu, x20);
  const bool core20 = in_core(nu, x20).in_core;
  const bool kernel20 = in_prekernel(p20).in_prekernel;
  auto s = [&](const char* a, const char* b) { return p20.at(idx(a), idx(b)).value; };
  const bool powers_ok = s("A", "B") == -10 && s("B", "A") == -10 && s("B", "C") == -10 &&
                         s("C", "B") == -10 && s("C", "D") == -20 && s("D", "C") == -20;
  if (!rec.check("x=20 in core and prekernel", core20 && kernel20 && powers_ok,
                 std::string("core ") + (core20 ? "yes" : "no") + ", prekernel " +
                     (kernel20 ? "yes" : "no") + ", s_AB=" + detail::show(s("A", "B")) +
                     " s_BA=" + detail::show(s("B", "A")) + " s_BC=" + detail::show(s("B", "C")) +
                     " s_CB=" + detail::show(s("C", "B")) + " s_CD=" + detail::show(s("C", "D")) +
                     " s_DC=" + detail::show(s("D", "C")))) {
    return t;
  }

  // (3) the split forced by x = 20 fails balance at BC
  bool zero_options = true;
  for (const char* id : {"A", "C", "D", "F"}) {
    for (const auto& inc : inst.incident(idx(id))) zero_options = zero_options && cycle.contains(inc.edge);
  }
  const auto forced = splits_from_allocation_on_cycle(inst, cycle, x20, idx("C"), idx("D"));
  if (!rec.check("forced split", zero_options && forced.has_value(),
                 zero_options ? (forced ? "A, C, D, F have no unmatched edges; CD split evenly "
                                          "determines z uniquely"
                                        : "no consistent split with allocation 20")
                              : "some of A, C, D, F have unmatched edges")) {
    return t;
  }
  const auto& z = *forced;
  const bool fa_even = z.z(inst, idx("F"), idx("A")) == z.z(inst, idx("A"), idx("F"));
  const auto alpha_b = outside_option(inst, z, "B").value;
  const auto forced_report = is_balanced(inst, z);
  const auto alpha = outside_options(inst, z);
  const Rational bc_gap = z.z(inst, idx("B"), idx("C")) - alpha[idx("B")];
  const Rational cb_gap = z.z(inst, idx("C"), idx("B")) - alpha[idx("C")];
  const bool bc_violated = std::any_of(
      forced_report.balance_violations.begin(), forced_report.balance_violations.end(),
      [&](const EdgeBalance& b) { return b.edge == inst.edge_between("B", "C"); });
  if (!rec.check("forced split violates balance at BC",
                 fa_even && forced_report.stable && alpha_b == 5 && bc_gap == 10 && cb_gap == 5 &&
                     bc_violated,
                 "z_BC=" + detail::show(z.z(inst, idx("B"), idx("C"))) +
                     " z_CB=" + detail::show(z.z(inst, idx("C"), idx("B"))) +
                     " alpha_B=" + detail::show(alpha_b) + " z_BC-alpha_B=" + detail::show(bc_gap) +
                     " z_CB-alpha_C=" + detail::show(cb_gap))) {
    return t;
  }

  // (4) nothing else has allocation 20 and the forced even splits
  if (!rec.check("no balanced solution with allocation 20",
                 !forced_report.balanced && allocation_of(inst, z) == x20,
                 "the only candidate split is unbalanced")) {
    return t;
  }

  // (5) the balanced solution
  Solution balanced;
  try {
    balanced = lemma1_balanced_solution(inst);
  } catch (const ValidationError& e) {
    rec.check("balanced solution", false, std::string("fixture mismatch: ") + e.what());
    return t;
  }
  const auto report = is_balanced(inst, balanced);
  const auto ab = outside_option(inst, balanced, "B").value;
  const auto ae = outside_option(inst, balanced, "E").value;
  if (!rec.check("balanced solution", report.balanced && ab == Rational(10, 3) && ae == Rational(10, 3),
                 std::string(report.balanced ? "balanced" : "not balanced") +
                     ", alpha_B=" + detail::show(ab) + " alpha_E=" + detail::show(ae))) {
    return t;
  }

  // (6) its allocation lies in core and prekernel
  const auto xb = allocation_of(inst, balanced);
  const bool core_b = in_core(nu, xb).in_core;
  const bool kernel_b = in_prekernel(nu, xb).in_prekernel;
  rec.check("balanced allocation in core and prekernel", core_b && kernel_b,
            std::string("core ") + (core_b ? "yes" : "no") + ", prekernel " +
                (kernel_b ? "yes" : "no") + ", x_A=" + detail::show(xb.payoff[idx("A")]) +
                " x_C=" + detail::show(xb.payoff[idx("C")]));
  return t;
}

inline Transcript lemma1_verify() { return lemma1_verify(lemma1_instance()); }

inline Instance example1_instance(long long u_capacity = 4) {
  std::vector<VertexSpec> vs{{"u", u_capacity}, {"x", 2}, {"y", 2}, {"a", 1}, {"b", 1},
                             {"c", 1},          {"d", 1}, {"v", 1}, {"w", 1}};
  std::vector<EdgeSpec> es;
  for (auto [a, b] : {std::pair{"u", "a"}, {"u", "b"}, {"u", "x"}, {"u", "y"}, {"x", "c"},
                      {"y", "d"}, {"u", "v"}, {"u", "w"}}) {
    es.push_back({a, b, 1});
  }
  return Instance::create(vs, es);
}

inline std::vector<EdgeIndex> example1_matching_edges(const Instance& inst) {
  std::vector<EdgeIndex> edges;
  for (auto [a, b] : {std::pair{"u", "a"}, {"u", "b"}, {"u", "x"}, {"u", "y"}, {"x", "c"},
                      {"y", "d"}}) {
    edges.push_back(inst.edge_between(a, b));
  }
  return edges;
}

inline Transcript example1_verify(const Instance& inst) {
  Transcript t;
  detail::Recorder rec(t);
  AuxiliaryBundle b;
  try {
    b = build_auxiliary(inst, CMatching::make(inst, example1_matching_edges(inst)));
  } catch (const ValidationError& e) {
    rec.check("construction", false, std::string("fixture mismatch: ") + e.what());
    return t;
  }
  rec.check("construction", true, "bundle built");

  const std::map<VertexId, long long> expected{{"u", 4}, {"x", 2}, {"y", 2}, {"a", 1}, {"b", 1},
                                               {"c", 1}, {"d", 1}, {"v", 1}, {"w", 1}};
  std::string counts;
  bool counts_ok = inst.vertex_count() == expected.size();
  for (VertexIndex u = 0; u < inst.vertex_count(); ++u) {
    const auto got = static_cast<long long>(b.copies[u].size());
    auto it = expected.find(inst.id(u));
    counts_ok = counts_ok && it != expected.end() && it->second == got;
    counts += inst.id(u) + ":" + std::to_string(got) + " ";
  }
  if (!rec.check("copy counts", counts_ok, counts + "(expected u:4 x:2 y:2, others 1)")) return t;

  bool mapping_ok = b.aux_matching.size() == b.matching.size();
  for (EdgeIndex e : b.matching.edges()) {
    const auto& ed = inst.edge(e);
    std::size_t between = 0;
    for (EdgeIndex f : b.aux_matching.edges()) {
      const auto& fe = b.aux.edge(f);
      const auto ou = b.origin[fe.u].original;
      const auto ov = b.origin[fe.v].original;
      if ((ou == ed.u && ov == ed.v) || (ou == ed.v && ov == ed.u)) ++between;
    }
    mapping_ok = mapping_ok && between == 1;
  }
  if (!rec.check("matched edges map one-to-one", mapping_ok,
                 std::to_string(b.matching.size()) + " edges in M, " +
                     std::to_string(b.aux_matching.size()) + " in M'")) {
    return t;
  }

  bool complete = true;
  std::size_t joined = 0;
  for (const char* other : {"v", "w"}) {
    const auto u = inst.index_of("u");
    const auto o = inst.index_of(other);
    for (VertexIndex cu : b.copies[u]) {
      for (VertexIndex co : b.copies[o]) {
        auto e = b.aux.find_edge(cu, co);
        complete = complete && e && !b.aux_matching.contains(*e);
        joined += e ? 1 : 0;
      }
    }
  }
  rec.check("unmatched edges become complete bipartite bundles", complete && joined == 8,
            std::to_string(joined) + " copy edges for u-v and u-w; aux has " +
                std::to_string(b.aux.vertex_count()) + " vertices, " +
                std::to_string(b.aux.edge_count()) + " edges");
  return t;
}

inline Transcript example1_verify() { return example1_verify(example1_instance()); }

}  // namespace netbargain::repro
