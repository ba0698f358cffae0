#pragma once

// Data model for capacitated bargaining instances (G, w, c), c-matchings,
// solutions (M, z) and allocations x.
//
// Vertices are stored in lexicographic order of their ids, so a vertex index
// doubles as its rank in the deterministic ordering. Edges are stored with
// u < v and sorted by (u, v); edge indices give the deterministic edge order.

#include "netbargain/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace netbargain {

using VertexId = std::string;
using VertexIndex = std::size_t;
using EdgeIndex = std::size_t;

struct VertexSpec {
  VertexId id;
  long long capacity = 1;
};

struct EdgeSpec {
  VertexId u;
  VertexId v;
  Rational weight;
};

struct Edge {
  VertexIndex u = 0;
  VertexIndex v = 0;
  Rational weight;

  VertexIndex other(VertexIndex x) const { return x == u ? v : u; }
};

struct Incidence {
  VertexIndex neighbor;
  EdgeIndex edge;
};

class Instance {
 public:
  Instance() = default;

  // Validates and canonicalizes. Throws ValidationError naming the offending
  // vertex or edge.
  static Instance create(std::vector<VertexSpec> vertices, std::vector<EdgeSpec> edges) {
    Instance inst;
    std::sort(vertices.begin(), vertices.end(),
              [](const VertexSpec& a, const VertexSpec& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const auto& vs = vertices[i];
      if (vs.id.empty()) throw ValidationError("vertex with empty id");
      if (i > 0 && vertices[i - 1].id == vs.id) {
        throw ValidationError("duplicate vertex id '" + vs.id + "'");
      }
      if (vs.capacity < 1) {
        throw ValidationError("vertex '" + vs.id + "' has capacity " +
                              std::to_string(vs.capacity) + " < 1");
      }
      inst.index_.emplace(vs.id, i);
    }
    inst.vertices_ = std::move(vertices);

    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (const auto& es : edges) {
      const auto name = "edge " + es.u + "-" + es.v;
      auto iu = inst.index_.find(es.u);
      if (iu == inst.index_.end()) {
        throw ValidationError(name + " references unknown vertex '" + es.u + "'");
      }
      auto iv = inst.index_.find(es.v);
      if (iv == inst.index_.end()) {
        throw ValidationError(name + " references unknown vertex '" + es.v + "'");
      }
      if (iu->second == iv->second) throw ValidationError(name + " is a self-loop");
      if (es.weight < 0) {
        throw ValidationError(name + " has negative weight " + to_string(es.weight));
      }
      auto [a, b] = std::minmax(iu->second, iv->second);
      canon.push_back(Edge{a, b, es.weight});
    }
    std::sort(canon.begin(), canon.end(), [](const Edge& x, const Edge& y) {
      return std::pair(x.u, x.v) < std::pair(y.u, y.v);
    });
    for (std::size_t e = 1; e < canon.size(); ++e) {
      if (canon[e].u == canon[e - 1].u && canon[e].v == canon[e - 1].v) {
        throw ValidationError("parallel edge " + inst.vertices_[canon[e].u].id + "-" +
                              inst.vertices_[canon[e].v].id);
      }
    }
    inst.edges_ = std::move(canon);
    inst.adjacency_.assign(inst.vertices_.size(), {});
    for (EdgeIndex e = 0; e < inst.edges_.size(); ++e) {
      const auto& ed = inst.edges_[e];
      inst.adjacency_[ed.u].push_back({ed.v, e});
      inst.adjacency_[ed.v].push_back({ed.u, e});
      inst.edge_lookup_.emplace(inst.key(ed.u, ed.v), e);
    }
    for (auto& adj : inst.adjacency_) {
      std::sort(adj.begin(), adj.end(),
                [](const Incidence& a, const Incidence& b) { return a.neighbor < b.neighbor; });
    }
    return inst;
  }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const VertexId& id(VertexIndex v) const { return vertices_.at(v).id; }
  long long capacity(VertexIndex v) const { return vertices_.at(v).capacity; }
  const std::vector<VertexSpec>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
  std::span<const Incidence> incident(VertexIndex v) const { return adjacency_.at(v); }

  std::optional<VertexIndex> find(const VertexId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  VertexIndex index_of(const VertexId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw ValidationError("unknown vertex '" + id + "'");
    return it->second;
  }

  std::optional<EdgeIndex> find_edge(VertexIndex a, VertexIndex b) const {
    auto it = edge_lookup_.find(key(a, b));
    if (it == edge_lookup_.end()) return std::nullopt;
    return it->second;
  }

  EdgeIndex edge_between(const VertexId& a, const VertexId& b) const {
    auto e = find_edge(index_of(a), index_of(b));
    if (!e) throw ValidationError("unknown edge " + a + "-" + b);
    return *e;
  }

  std::string edge_name(EdgeIndex e) const {
    return id(edges_.at(e).u) + "-" + id(edges_.at(e).v);
  }

  bool all_unit_capacity() const {
    return std::all_of(vertices_.begin(), vertices_.end(),
                       [](const VertexSpec& v) { return v.capacity == 1; });
  }

  std::vector<EdgeSpec> edge_specs() const {
    std::vector<EdgeSpec> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back({id(e.u), id(e.v), e.weight});
    return out;
  }

 private:
  static std::size_t key(VertexIndex a, VertexIndex b) {
    auto [x, y] = std::minmax(a, b);
    return (x << 32) ^ y;
  }

  std::vector<VertexSpec> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
  std::unordered_map<VertexId, VertexIndex> index_;
  std::unordered_map<std::size_t, EdgeIndex> edge_lookup_;
};

struct CapacityViolation {
  VertexIndex vertex;
  long long degree;
  long long capacity;
};

struct CMatchingReport {
  bool ok = true;
  std::vector<CapacityViolation> violations;
};

// Checks d_u <= c_u for every vertex. Edge indices must belong to `inst`.
inline CMatchingReport is_c_matching(const Instance& inst, std::span<const EdgeIndex> edges) {
  std::vector<long long> degree(inst.vertex_count(), 0);
  std::vector<bool> seen(inst.edge_count(), false);
  for (EdgeIndex e : edges) {
    if (e >= inst.edge_count()) {
      throw ValidationError("unknown edge index " + std::to_string(e));
    }
    if (seen[e]) continue;
    seen[e] = true;
    ++degree[inst.edge(e).u];
    ++degree[inst.edge(e).v];
  }
  CMatchingReport report;
  for (VertexIndex v = 0; v < inst.vertex_count(); ++v) {
    if (degree[v] > inst.capacity(v)) {
      report.ok = false;
      report.violations.push_back({v, degree[v], inst.capacity(v)});
    }
  }
  return report;
}

// Edge-id form: each pair must name an instance edge.
inline CMatchingReport is_c_matching(const Instance& inst,
                                     const std::vector<std::pair<VertexId, VertexId>>& pairs) {
  std::vector<EdgeIndex> edges;
  for (const auto& [a, b] : pairs) edges.push_back(inst.edge_between(a, b));
  return is_c_matching(inst, edges);
}

// A validated c-matching. Keeps sorted edge indices plus per-vertex
// incidence for O(1) membership and degree queries.
class CMatching {
 public:
  CMatching() = default;

  static CMatching make(const Instance& inst, std::vector<EdgeIndex> edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    auto report = is_c_matching(inst, edges);
    if (!report.ok) {
      const auto& bad = report.violations.front();
      throw ValidationError("not a c-matching: vertex '" + inst.id(bad.vertex) + "' has degree " +
                            std::to_string(bad.degree) + " > capacity " +
                            std::to_string(bad.capacity));
    }
    CMatching m;
    m.edges_ = std::move(edges);
    m.member_.assign(inst.edge_count(), false);
    m.partners_.assign(inst.vertex_count(), {});
    for (EdgeIndex e : m.edges_) {
      m.member_[e] = true;
      const auto& ed = inst.edge(e);
      m.partners_[ed.u].push_back({ed.v, e});
      m.partners_[ed.v].push_back({ed.u, e});
    }
    for (auto& p : m.partners_) {
      std::sort(p.begin(), p.end(),
                [](const Incidence& a, const Incidence& b) { return a.neighbor < b.neighbor; });
    }
    return m;
  }

  const std::vector<EdgeIndex>& edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  bool contains(EdgeIndex e) const { return e < member_.size() && member_[e]; }
  long long degree(VertexIndex v) const { return static_cast<long long>(partners_.at(v).size()); }
  std::span<const Incidence> partners(VertexIndex v) const { return partners_.at(v); }
  bool saturated(const Instance& inst, VertexIndex v) const {
    return degree(v) == inst.capacity(v);
  }

  Rational weight(const Instance& inst) const {
    Rational total = 0;
    for (EdgeIndex e : edges_) total += inst.edge(e).weight;
    return total;
  }

  friend bool operator==(const CMatching& a, const CMatching& b) { return a.edges_ == b.edges_; }

 private:
  std::vector<EdgeIndex> edges_;
  std::vector<bool> member_;
  std::vector<std::vector<Incidence>> partners_;
};

// (M, z). Splits are stored per edge: share_[2e] goes to edge(e).u,
// share_[2e + 1] to edge(e).v.
class Solution {
 public:
  Solution() = default;

  static Solution make(const Instance& inst, CMatching matching, std::vector<Rational> shares) {
    if (shares.size() != 2 * inst.edge_count()) {
      throw ValidationError("split vector has wrong length");
    }
    for (EdgeIndex e = 0; e < inst.edge_count(); ++e) {
      const auto& a = shares[2 * e];
      const auto& b = shares[2 * e + 1];
      if (a < 0 || b < 0) {
        throw ValidationError("negative split on edge " + inst.edge_name(e));
      }
      if (matching.contains(e)) {
        if (a + b != inst.edge(e).weight) {
          throw ValidationError("splits on edge " + inst.edge_name(e) + " sum to " +
                                to_string(a + b) + ", expected " +
                                to_string(inst.edge(e).weight));
        }
      } else if (a != 0 || b != 0) {
        throw ValidationError("nonzero split on unmatched edge " + inst.edge_name(e));
      }
    }
    Solution s;
    s.matching_ = std::move(matching);
    s.shares_ = std::move(shares);
    return s;
  }

  // Convenience: keyed by (u, v) -> z_uv for matched edges.
  static Solution from_splits(const Instance& inst, CMatching matching,
                              const std::map<std::pair<VertexId, VertexId>, Rational>& z) {
    std::vector<Rational> shares(2 * inst.edge_count(), Rational(0));
    for (const auto& [key, value] : z) {
      EdgeIndex e = inst.edge_between(key.first, key.second);
      const bool first = inst.edge(e).u == inst.index_of(key.first);
      shares[2 * e + (first ? 0 : 1)] = value;
    }
    return make(inst, std::move(matching), std::move(shares));
  }

  const CMatching& matching() const { return matching_; }
  const std::vector<Rational>& shares() const { return shares_; }

  // z_{owner, other} on edge e.
  const Rational& share(const Instance& inst, EdgeIndex e, VertexIndex owner) const {
    return shares_[2 * e + (inst.edge(e).u == owner ? 0 : 1)];
  }

  const Rational& z(const Instance& inst, VertexIndex a, VertexIndex b) const {
    auto e = inst.find_edge(a, b);
    if (!e) throw ValidationError("unknown edge " + inst.id(a) + "-" + inst.id(b));
    return share(inst, *e, a);
  }

 private:
  CMatching matching_;
  std::vector<Rational> shares_;
};

struct Allocation {
  std::vector<Rational> payoff;  // indexed by vertex

  Rational total() const {
    Rational t = 0;
    for (const auto& p : payoff) t += p;
    return t;
  }
  friend bool operator==(const Allocation&, const Allocation&) = default;
};

inline Allocation allocation_of(const Instance& inst, const Solution& s) {
  Allocation x{std::vector<Rational>(inst.vertex_count(), Rational(0))};
  for (EdgeIndex e : s.matching().edges()) {
    x.payoff[inst.edge(e).u] += s.shares()[2 * e];
    x.payoff[inst.edge(e).v] += s.shares()[2 * e + 1];
  }
  return x;
}

inline Allocation uniform_allocation(const Instance& inst, const Rational& value) {
  return Allocation{std::vector<Rational>(inst.vertex_count(), value)};
}

}  // namespace netbargain
