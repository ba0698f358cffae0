#pragma once

// Exact maximum-weight c-matching by exhaustive search, optimum uniqueness,
// acyclicity, and the half-integral LP relaxation check.

#include "netbargain/instance.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace netbargain {

inline constexpr std::size_t kExhaustiveEdgeLimit = 25;
inline constexpr std::size_t kHalfIntegralEdgeLimit = 16;

namespace detail {

// Weights rescaled by the lcm of their denominators so the searches can run
// on machine integers; value = scaled / scale.
struct ScaledWeights {
  std::vector<std::int64_t> scaled;
  Integer scale = 1;

  Rational value(std::int64_t s) const { return Rational(Integer(s), scale); }
};

inline ScaledWeights scale_weights(const Instance& inst, std::span<const EdgeIndex> edges) {
  ScaledWeights out;
  for (EdgeIndex e : edges) {
    out.scale = lcm(out.scale, boost::multiprecision::denominator(inst.edge(e).weight));
  }
  Integer total = 0;
  for (EdgeIndex e : edges) {
    Rational s = inst.edge(e).weight * Rational(out.scale);
    Integer n = boost::multiprecision::numerator(s);
    total += n;
    if (total > Integer(std::numeric_limits<std::int64_t>::max() / 4)) {
      throw GuardError("edge weights too large for exact search");
    }
    out.scaled.push_back(n.convert_to<std::int64_t>());
  }
  return out;
}

inline void require_exhaustive(std::size_t edges, std::size_t limit, const char* what) {
  if (edges > limit) {
    throw GuardError(std::string("instance too large for exact mode: ") + what + " needs at most " +
                     std::to_string(limit) + " edges, got " + std::to_string(edges));
  }
}

// Enumerates c-matchings of the edges in `edges` (indices into inst). Tracks the
// optimum value and every edge set attaining it, up to `keep` of them.
class CMatchingSearch {
 public:
  CMatchingSearch(const Instance& inst, std::vector<EdgeIndex> edges)
      : inst_(inst), edges_(std::move(edges)), weights_(scale_weights(inst, edges_)) {
    budget_.resize(inst.vertex_count());
    for (VertexIndex v = 0; v < inst.vertex_count(); ++v) budget_[v] = inst.capacity(v);
    suffix_.assign(edges_.size() + 1, 0);
    for (std::size_t k = edges_.size(); k-- > 0;) {
      suffix_[k] = suffix_[k + 1] + std::max<std::int64_t>(weights_.scaled[k], 0);
    }
  }

  void run() {
    best_ = -1;
    optima_count_ = 0;
    chosen_.clear();
    recurse(0, 0);
  }

  std::int64_t best_scaled() const { return best_; }
  Rational best_value() const { return weights_.value(best_); }
  const std::vector<EdgeIndex>& best_set() const { return best_set_; }
  std::size_t optima_count() const { return optima_count_; }

 private:
  void recurse(std::size_t k, std::int64_t current) {
    if (current + suffix_[k] < best_) return;
    if (k == edges_.size()) {
      consider(current);
      return;
    }
    const EdgeIndex e = edges_[k];
    const auto& ed = inst_.edge(e);
    if (budget_[ed.u] > 0 && budget_[ed.v] > 0) {
      --budget_[ed.u];
      --budget_[ed.v];
      chosen_.push_back(e);
      recurse(k + 1, current + weights_.scaled[k]);
      chosen_.pop_back();
      ++budget_[ed.u];
      ++budget_[ed.v];
    }
    recurse(k + 1, current);
  }

  void consider(std::int64_t value) {
    if (value > best_) {
      best_ = value;
      best_set_ = chosen_;
      optima_count_ = 1;
    } else if (value == best_) {
      ++optima_count_;
      if (std::lexicographical_compare(chosen_.begin(), chosen_.end(), best_set_.begin(),
                                       best_set_.end())) {
        best_set_ = chosen_;
      }
    }
  }

  const Instance& inst_;
  std::vector<EdgeIndex> edges_;
  ScaledWeights weights_;
  std::vector<long long> budget_;
  std::vector<std::int64_t> suffix_;
  std::vector<EdgeIndex> chosen_;
  std::vector<EdgeIndex> best_set_;
  std::int64_t best_ = -1;
  std::size_t optima_count_ = 0;
};

inline std::vector<EdgeIndex> all_edges(const Instance& inst) {
  std::vector<EdgeIndex> edges(inst.edge_count());
  std::iota(edges.begin(), edges.end(), EdgeIndex{0});
  return edges;
}

}  // namespace detail

struct MaxCMatching {
  CMatching matching;
  Rational weight;
};

// Maximum-weight c-matching; ties resolved to the lexicographically least
// sorted edge-index sequence (a proper prefix counts as smaller).
inline MaxCMatching max_weight_c_matching(const Instance& inst) {
  detail::require_exhaustive(inst.edge_count(), kExhaustiveEdgeLimit, "max_weight_c_matching");
  detail::CMatchingSearch search(inst, detail::all_edges(inst));
  search.run();
  return {CMatching::make(inst, search.best_set()), search.best_value()};
}

// Value of the maximum c-matching restricted to a subset of edges (used for
// coalition values on induced subgraphs).
inline Rational max_weight_c_matching_value(const Instance& inst, std::vector<EdgeIndex> edges) {
  detail::require_exhaustive(edges.size(), kExhaustiveEdgeLimit, "coalition value");
  detail::CMatchingSearch search(inst, std::move(edges));
  search.run();
  return search.best_value();
}

inline bool is_unique_optimum(const Instance& inst) {
  detail::require_exhaustive(inst.edge_count(), kExhaustiveEdgeLimit, "is_unique_optimum");
  detail::CMatchingSearch search(inst, detail::all_edges(inst));
  search.run();
  return search.optima_count() == 1;
}

// True iff the edge set (as an undirected graph) contains no cycle.
inline bool is_acyclic(const Instance& inst, std::span<const EdgeIndex> edges) {
  std::vector<VertexIndex> parent(inst.vertex_count());
  std::iota(parent.begin(), parent.end(), VertexIndex{0});
  auto find = [&](VertexIndex v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (EdgeIndex e : edges) {
    auto a = find(inst.edge(e).u);
    auto b = find(inst.edge(e).v);
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

inline bool is_acyclic(const Instance& inst, const CMatching& m) {
  return is_acyclic(inst, m.edges());
}

struct LPRelaxationResult {
  Rational fractional_optimum;
  Rational integral_optimum;
  bool has_integral_optimal = false;
  // Per edge, value in {0, 1/2, 1} attaining the fractional optimum.
  std::vector<Rational> witness;
};

// Fractional optimum of  max w.x  s.t.  sum_{e ~ u} x_e <= c_u,  0 <= x <= 1,
// searched over half-integral points, against the integral optimum.
inline LPRelaxationResult lp_integrality_check(const Instance& inst) {
  detail::require_exhaustive(inst.edge_count(), kHalfIntegralEdgeLimit, "lp_integrality_check");
  const auto edges = detail::all_edges(inst);
  const auto weights = detail::scale_weights(inst, edges);
  const std::size_t m = edges.size();

  // Budgets in half units.
  std::vector<long long> budget(inst.vertex_count());
  for (VertexIndex v = 0; v < inst.vertex_count(); ++v) budget[v] = 2 * inst.capacity(v);
  std::vector<std::int64_t> suffix(m + 1, 0);
  for (std::size_t k = m; k-- > 0;) suffix[k] = suffix[k + 1] + 2 * weights.scaled[k];

  std::vector<int> halves(m, 0), best_halves(m, 0);
  std::int64_t best = -1;  // in half units of scaled weight
  auto recurse = [&](auto&& self, std::size_t k, std::int64_t current) -> void {
    if (current + suffix[k] <= best) return;
    if (k == m) {
      best = current;
      best_halves = halves;
      return;
    }
    const auto& ed = inst.edge(edges[k]);
    for (int h = 2; h >= 0; --h) {
      if (budget[ed.u] < h || budget[ed.v] < h) continue;
      budget[ed.u] -= h;
      budget[ed.v] -= h;
      halves[k] = h;
      self(self, k + 1, current + h * weights.scaled[k]);
      halves[k] = 0;
      budget[ed.u] += h;
      budget[ed.v] += h;
    }
  };
  recurse(recurse, 0, 0);

  LPRelaxationResult result;
  result.fractional_optimum = Rational(Integer(best), weights.scale * 2);
  result.witness.resize(m);
  for (std::size_t k = 0; k < m; ++k) result.witness[k] = Rational(best_halves[k], 2);
  detail::CMatchingSearch integral(inst, edges);
  integral.run();
  result.integral_optimum = integral.best_value();
  result.has_integral_optimal = result.fractional_optimum == result.integral_optimum;
  return result;
}

}  // namespace netbargain
