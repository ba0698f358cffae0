#pragma once

// Reduction of a capacitated instance with a c-matching M to a unit-capacity
// instance (G', w') with matching M', and the split mappings phi / phi^-1
// between solutions on M' and solutions on M.
//
// Construction:
//   1. every vertex u gets copies u#1 .. u#c_u, and a labelling sigma_u of its
//      matched neighbors onto 1 .. d_u;
//   2. a matched edge uv becomes the single edge u#sigma_u(v) -- v#sigma_v(u) in M';
//   3. an unmatched edge uv becomes all c_u * c_v edges u#i -- v#j.
// Every copy inherits the weight of the original edge.

#include "netbargain/instance.hpp"
#include "netbargain/semantics.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace netbargain {

struct CopyRef {
  VertexIndex original;
  long long position;  // 1-based
};

struct AuxiliaryBundle {
  Instance original;
  CMatching matching;         // M on the original instance
  Instance aux;               // unit-capacity (G', w')
  CMatching aux_matching;     // M'
  // sigma[u][v] = position of matched neighbor v in u's labelling.
  std::vector<std::map<VertexIndex, long long>> sigma;
  // copies[u][i - 1] = aux vertex index of u#i.
  std::vector<std::vector<VertexIndex>> copies;
  std::vector<CopyRef> origin;        // indexed by aux vertex
  std::vector<EdgeIndex> aux_edge_of;  // original matched edge -> aux edge; unused entries npos

  VertexIndex copy(VertexIndex u, long long position) const {
    return copies.at(u).at(static_cast<std::size_t>(position - 1));
  }
};

inline std::string copy_id(const VertexId& original, long long position) {
  return original + "#" + std::to_string(position);
}

// `order[u]` lists u's matched neighbors in label order (position 1 first).
inline AuxiliaryBundle build_auxiliary(const Instance& inst, const CMatching& m,
                                       const std::vector<std::vector<VertexIndex>>& order) {
  if (order.size() != inst.vertex_count()) throw ValidationError("labelling has wrong size");
  AuxiliaryBundle b;
  b.original = inst;
  b.matching = CMatching::make(inst, m.edges());
  b.sigma.resize(inst.vertex_count());
  for (VertexIndex u = 0; u < inst.vertex_count(); ++u) {
    const auto partners = b.matching.partners(u);
    if (order[u].size() != partners.size()) {
      throw ValidationError("labelling of '" + inst.id(u) + "' does not cover its matched neighbors");
    }
    long long position = 1;
    for (VertexIndex v : order[u]) {
      const bool matched = std::any_of(partners.begin(), partners.end(),
                                       [&](const Incidence& p) { return p.neighbor == v; });
      if (!matched || !b.sigma[u].emplace(v, position).second) {
        throw ValidationError("labelling of '" + inst.id(u) + "' is not a bijection");
      }
      ++position;
    }
  }

  std::vector<VertexSpec> vertices;
  for (VertexIndex u = 0; u < inst.vertex_count(); ++u) {
    for (long long i = 1; i <= inst.capacity(u); ++i) {
      vertices.push_back({copy_id(inst.id(u), i), 1});
    }
  }
  std::vector<EdgeSpec> edges;
  for (EdgeIndex e = 0; e < inst.edge_count(); ++e) {
    const auto& ed = inst.edge(e);
    const auto& uid = inst.id(ed.u);
    const auto& vid = inst.id(ed.v);
    if (b.matching.contains(e)) {
      edges.push_back({copy_id(uid, b.sigma[ed.u].at(ed.v)), copy_id(vid, b.sigma[ed.v].at(ed.u)),
                       ed.weight});
      continue;
    }
    for (long long i = 1; i <= inst.capacity(ed.u); ++i) {
      for (long long j = 1; j <= inst.capacity(ed.v); ++j) {
        edges.push_back({copy_id(uid, i), copy_id(vid, j), ed.weight});
      }
    }
  }
  b.aux = Instance::create(std::move(vertices), std::move(edges));

  b.copies.resize(inst.vertex_count());
  b.origin.resize(b.aux.vertex_count());
  for (VertexIndex u = 0; u < inst.vertex_count(); ++u) {
    for (long long i = 1; i <= inst.capacity(u); ++i) {
      const VertexIndex a = b.aux.index_of(copy_id(inst.id(u), i));
      b.copies[u].push_back(a);
      b.origin[a] = {u, i};
    }
  }
  b.aux_edge_of.assign(inst.edge_count(), static_cast<EdgeIndex>(-1));
  std::vector<EdgeIndex> aux_matched;
  for (EdgeIndex e : b.matching.edges()) {
    const auto& ed = inst.edge(e);
    auto ae = b.aux.find_edge(b.copy(ed.u, b.sigma[ed.u].at(ed.v)),
                              b.copy(ed.v, b.sigma[ed.v].at(ed.u)));
    b.aux_edge_of[e] = *ae;
    aux_matched.push_back(*ae);
  }
  b.aux_matching = CMatching::make(b.aux, std::move(aux_matched));
  return b;
}

// Labels every vertex's matched neighbors in lexicographic id order.
inline AuxiliaryBundle build_auxiliary(const Instance& inst, const CMatching& m) {
  std::vector<std::vector<VertexIndex>> order(inst.vertex_count());
  for (VertexIndex u = 0; u < inst.vertex_count(); ++u) {
    for (const auto& p : m.partners(u)) order[u].push_back(p.neighbor);
  }
  return build_auxiliary(inst, m, order);
}

// z = phi(x): z_uv = x of u's copy labelled for v, on matched edges.
inline Solution phi(const AuxiliaryBundle& b, const Allocation& x) {
  unit_solution(b.aux, b.aux_matching, x);  // validates (M', x)
  const auto& inst = b.original;
  std::vector<Rational> shares(2 * inst.edge_count(), Rational(0));
  for (EdgeIndex e : b.matching.edges()) {
    const auto& ed = inst.edge(e);
    shares[2 * e] = x.payoff[b.copy(ed.u, b.sigma[ed.u].at(ed.v))];
    shares[2 * e + 1] = x.payoff[b.copy(ed.v, b.sigma[ed.v].at(ed.u))];
  }
  return Solution::make(inst, b.matching, std::move(shares));
}

// x = phi^-1(z): copy u#sigma_u(v) receives z_uv; copies beyond d_u receive 0.
inline Allocation phi_inverse(const AuxiliaryBundle& b, const Solution& z) {
  if (!(z.matching() == b.matching)) {
    throw ValidationError("solution is not on the bundle's matching");
  }
  const auto& inst = b.original;
  Allocation x{std::vector<Rational>(b.aux.vertex_count(), Rational(0))};
  for (EdgeIndex e : b.matching.edges()) {
    const auto& ed = inst.edge(e);
    x.payoff[b.copy(ed.u, b.sigma[ed.u].at(ed.v))] = z.shares()[2 * e];
    x.payoff[b.copy(ed.v, b.sigma[ed.v].at(ed.u))] = z.shares()[2 * e + 1];
  }
  return x;
}

struct OptionMismatch {
  VertexIndex original;
  long long position;
  Rational original_option;
  Rational copy_option;
};

struct PreservationReport {
  bool options_equal = true;           // every u and every i <= d_u
  bool uncovered_options_equal = true; // copies i > d_u, reported separately
  bool stability_equivalent = true;
  bool balance_equivalent = true;
  bool original_stable = false;
  bool aux_stable = false;
  bool original_balanced = false;
  bool aux_balanced = false;
  std::vector<OptionMismatch> mismatches;
  std::vector<OptionMismatch> uncovered_mismatches;

  bool holds() const { return options_equal && stability_equivalent && balance_equivalent; }
};

// Requires z == phi(x); throws otherwise.
inline PreservationReport verify_preservation(const AuxiliaryBundle& b, const Solution& z,
                                              const Allocation& x) {
  if (!(phi_inverse(b, z) == x)) throw ValidationError("solutions are not related by phi");
  const Solution aux_solution = unit_solution(b.aux, b.aux_matching, x);
  const auto alpha = outside_options(b.original, z);
  const auto aux_alpha = outside_options(b.aux, aux_solution);

  PreservationReport r;
  for (VertexIndex u = 0; u < b.original.vertex_count(); ++u) {
    const long long d = b.matching.degree(u);
    for (long long i = 1; i <= b.original.capacity(u); ++i) {
      const auto& copy_alpha = aux_alpha[b.copy(u, i)];
      if (copy_alpha == alpha[u]) continue;
      OptionMismatch mm{u, i, alpha[u], copy_alpha};
      if (i <= d) {
        r.options_equal = false;
        r.mismatches.push_back(mm);
      } else {
        r.uncovered_options_equal = false;
        r.uncovered_mismatches.push_back(mm);
      }
    }
  }
  const auto original_report = is_balanced(b.original, z);
  const auto aux_report = is_balanced(b.aux, aux_solution);
  r.original_stable = original_report.stable;
  r.aux_stable = aux_report.stable;
  r.original_balanced = original_report.balanced;
  r.aux_balanced = aux_report.balanced;
  r.stability_equivalent = r.original_stable == r.aux_stable;
  r.balance_equivalent = r.original_balanced == r.aux_balanced;
  return r;
}

}  // namespace netbargain
