#pragma once

// JSON documents for instances, solutions, allocations and reports.
//
//   instance:   {"vertices": [{"id": "A", "capacity": 2}, ...],
//                "edges":    [{"u": "A", "v": "B", "weight": "10"}, ...]}
//   solution:   {"matching": [["A", "B"], ...],
//                "splits":   [{"u": "A", "v": "B", "z_uv": "10/3", "z_vu": "20/3"}, ...]}
//   allocation: {"allocation": {"A": "20", ...}}
//
// Rationals are written as strings ("35/3"); integers are also accepted as
// JSON numbers on input.

#include "netbargain/coop.hpp"
#include "netbargain/instance.hpp"
#include "netbargain/pipeline.hpp"
#include "netbargain/reduction.hpp"
#include "netbargain/repro.hpp"
#include "netbargain/semantics.hpp"
#include "netbargain/unit_solver.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace netbargain::io {

using nlohmann::json;

namespace detail {

inline json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed ") + what + " document: " + e.what());
  }
}

inline const json& field(const json& obj, const char* name, const std::string& where) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw ParseError(where + ": missing field '" + name + "'");
  }
  return obj.at(name);
}

inline std::string string_field(const json& obj, const char* name, const std::string& where) {
  const auto& f = field(obj, name, where);
  if (!f.is_string()) throw ParseError(where + ": field '" + name + "' must be a string");
  return f.get<std::string>();
}

inline Rational rational_value(const json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  throw ParseError(where + ": expected an integer or a rational string");
}

inline const json& array_field(const json& obj, const char* name, const std::string& where) {
  const auto& f = field(obj, name, where);
  if (!f.is_array()) throw ParseError(where + ": field '" + name + "' must be an array");
  return f;
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes through a temporary file and renames it into place.
inline void write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << content;
    if (!out) throw ParseError("cannot write '" + path + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw ParseError("cannot move output into '" + path + "'");
  }
}

// --- instances --------------------------------------------------------------

inline Instance instance_from_json(const json& doc) {
  std::vector<VertexSpec> vertices;
  std::vector<EdgeSpec> edges;
  std::size_t k = 0;
  for (const auto& v : detail::array_field(doc, "vertices", "instance")) {
    const auto where = "vertices[" + std::to_string(k++) + "]";
    VertexSpec spec;
    spec.id = detail::string_field(v, "id", where);
    const auto& cap = detail::field(v, "capacity", where);
    if (!cap.is_number_integer()) throw ParseError(where + ": capacity must be an integer");
    spec.capacity = cap.get<long long>();
    vertices.push_back(std::move(spec));
  }
  k = 0;
  for (const auto& e : detail::array_field(doc, "edges", "instance")) {
    const auto where = "edges[" + std::to_string(k++) + "]";
    EdgeSpec spec;
    spec.u = detail::string_field(e, "u", where);
    spec.v = detail::string_field(e, "v", where);
    spec.weight = detail::rational_value(detail::field(e, "weight", where), where + ".weight");
    edges.push_back(std::move(spec));
  }
  return Instance::create(std::move(vertices), std::move(edges));
}

inline Instance load_instance(std::string_view text) {
  return instance_from_json(detail::parse(text, "instance"));
}

inline json instance_to_json(const Instance& inst) {
  json doc;
  doc["vertices"] = json::array();
  for (const auto& v : inst.vertices()) {
    doc["vertices"].push_back({{"id", v.id}, {"capacity", v.capacity}});
  }
  doc["edges"] = json::array();
  for (const auto& e : inst.edges()) {
    doc["edges"].push_back({{"u", inst.id(e.u)}, {"v", inst.id(e.v)}, {"weight", to_string(e.weight)}});
  }
  return doc;
}

inline std::string write_instance(const Instance& inst) { return instance_to_json(inst).dump(2) + "\n"; }

// --- solutions --------------------------------------------------------------

inline Solution solution_from_json(const Instance& inst, const json& doc) {
  std::vector<EdgeIndex> matched;
  std::size_t k = 0;
  for (const auto& pair : detail::array_field(doc, "matching", "solution")) {
    const auto where = "matching[" + std::to_string(k++) + "]";
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
      throw ParseError(where + ": expected a pair of vertex ids");
    }
    matched.push_back(inst.edge_between(pair[0].get<std::string>(), pair[1].get<std::string>()));
  }
  auto matching = CMatching::make(inst, matched);
  std::vector<Rational> shares(2 * inst.edge_count(), Rational(0));
  std::vector<bool> seen(inst.edge_count(), false);
  k = 0;
  for (const auto& s : detail::array_field(doc, "splits", "solution")) {
    const auto where = "splits[" + std::to_string(k++) + "]";
    const auto u = inst.index_of(detail::string_field(s, "u", where));
    const auto v = inst.index_of(detail::string_field(s, "v", where));
    auto e = inst.find_edge(u, v);
    if (!e) throw ValidationError(where + ": unknown edge " + inst.id(u) + "-" + inst.id(v));
    if (seen[*e]) throw ValidationError(where + ": duplicate split for edge " + inst.edge_name(*e));
    seen[*e] = true;
    const auto zuv = detail::rational_value(detail::field(s, "z_uv", where), where + ".z_uv");
    const auto zvu = detail::rational_value(detail::field(s, "z_vu", where), where + ".z_vu");
    const bool forward = inst.edge(*e).u == u;
    shares[2 * *e] = forward ? zuv : zvu;
    shares[2 * *e + 1] = forward ? zvu : zuv;
  }
  for (EdgeIndex e : matching.edges()) {
    if (!seen[e]) throw ValidationError("matched edge " + inst.edge_name(e) + " has no split");
  }
  return Solution::make(inst, std::move(matching), std::move(shares));
}

inline Solution load_solution(const Instance& inst, std::string_view text) {
  return solution_from_json(inst, detail::parse(text, "solution"));
}

inline json solution_to_json(const Instance& inst, const Solution& s) {
  json doc;
  doc["matching"] = json::array();
  doc["splits"] = json::array();
  for (EdgeIndex e : s.matching().edges()) {
    const auto& ed = inst.edge(e);
    doc["matching"].push_back({inst.id(ed.u), inst.id(ed.v)});
    doc["splits"].push_back({{"u", inst.id(ed.u)},
                             {"v", inst.id(ed.v)},
                             {"z_uv", to_string(s.shares()[2 * e])},
                             {"z_vu", to_string(s.shares()[2 * e + 1])}});
  }
  return doc;
}

inline std::string write_solution(const Instance& inst, const Solution& s) {
  return solution_to_json(inst, s).dump(2) + "\n";
}

// --- allocations ------------------------------------------------------------

inline Allocation allocation_from_json(const Instance& inst, const json& doc) {
  const auto& map = detail::field(doc, "allocation", "allocation document");
  if (!map.is_object()) throw ParseError("allocation must be an object keyed by vertex id");
  Allocation x{std::vector<Rational>(inst.vertex_count(), Rational(0))};
  std::vector<bool> seen(inst.vertex_count(), false);
  for (const auto& [id, value] : map.items()) {
    const auto v = inst.index_of(id);
    x.payoff[v] = detail::rational_value(value, "allocation." + id);
    if (x.payoff[v] < 0) throw ValidationError("negative payoff for '" + id + "'");
    seen[v] = true;
  }
  for (VertexIndex v = 0; v < inst.vertex_count(); ++v) {
    if (!seen[v]) throw ValidationError("allocation has no payoff for '" + inst.id(v) + "'");
  }
  return x;
}

inline Allocation load_allocation(const Instance& inst, std::string_view text) {
  return allocation_from_json(inst, detail::parse(text, "allocation"));
}

inline json allocation_to_json(const Instance& inst, const Allocation& x) {
  json map = json::object();
  for (VertexIndex v = 0; v < inst.vertex_count(); ++v) map[inst.id(v)] = to_string(x.payoff[v]);
  return json{{"allocation", map}};
}

// --- reports ----------------------------------------------------------------

inline json balance_report_to_json(const Instance& inst, const BalanceReport& r) {
  json doc;
  doc["stable"] = r.stable;
  doc["balanced"] = r.balanced;
  auto edge_json = [&](const EdgeBalance& b) {
    return json{{"u", inst.id(b.u)},
                {"v", inst.id(b.v)},
                {"z_uv", to_string(b.z_uv)},
                {"alpha_u", to_string(b.alpha_u)},
                {"z_vu", to_string(b.z_vu)},
                {"alpha_v", to_string(b.alpha_v)},
                {"surplus_asymmetry", to_string(b.asymmetry)}};
  };
  doc["edges"] = json::array();
  for (const auto& b : r.edges) doc["edges"].push_back(edge_json(b));
  doc["stability_violations"] = json::array();
  for (const auto& v : r.stability_violations) {
    json item{{"vertex", inst.id(v.vertex)}, {"alpha", to_string(v.option)}};
    if (v.kind == StabilityViolation::Kind::share_below_option) {
      item["kind"] = "share-below-outside-option";
      item["partner"] = inst.id(*v.partner);
      item["share"] = to_string(v.share);
    } else {
      item["kind"] = "unsaturated-with-positive-option";
    }
    doc["stability_violations"].push_back(item);
  }
  doc["balance_violations"] = json::array();
  for (const auto& b : r.balance_violations) doc["balance_violations"].push_back(edge_json(b));
  return doc;
}

inline json coalition_json(const Instance& inst, Coalition s) {
  json out = json::array();
  for (VertexIndex v : members(s)) out.push_back(inst.id(v));
  return out;
}

inline json path_json(const Instance& inst, const std::vector<VertexIndex>& path) {
  json out = json::array();
  for (VertexIndex v : path) out.push_back(inst.id(v));
  return out;
}

inline json gadget_report_to_json(const Instance& inst, const GadgetReport& g) {
  json doc;
  doc["bad_vertices"] = json::array();
  for (VertexIndex v : g.bad_vertices) doc["bad_vertices"].push_back(inst.id(v));
  doc["tie_sensitive"] = json::array();
  for (VertexIndex v : g.tie_sensitive) doc["tie_sensitive"].push_back(inst.id(v));
  doc["entries"] = json::array();
  for (const auto& e : g.entries) {
    json item{{"u", inst.id(e.u)},
              {"v", inst.id(e.v)},
              {"alpha_u", to_string(e.option)},
              {"best_outside", inst.id(e.best_outside)},
              {"type1", e.type1_path.has_value()},
              {"type2", e.type2_path.has_value()}};
    item["weakest_partner"] = e.weakest ? json(inst.id(*e.weakest)) : json(nullptr);
    if (e.type1_path) item["type1_path"] = path_json(inst, *e.type1_path);
    if (e.type2_path) item["type2_path"] = path_json(inst, *e.type2_path);
    doc["entries"].push_back(item);
  }
  return doc;
}

inline json power_matrix_to_json(const Instance& inst, const PowerMatrix& p) {
  json out = json::array();
  for (VertexIndex u = 0; u < inst.vertex_count(); ++u) {
    for (VertexIndex v = 0; v < inst.vertex_count(); ++v) {
      if (u == v) continue;
      out.push_back({{"u", inst.id(u)},
                     {"v", inst.id(v)},
                     {"s_uv", to_string(p.at(u, v).value)},
                     {"witness", coalition_json(inst, p.at(u, v).witness)}});
    }
  }
  return out;
}

inline json coalition_table_to_json(const Instance& inst, const CoalitionValueTable& nu) {
  json out = json::array();
  for (Coalition s = 0; s < nu.size(); ++s) {
    out.push_back({{"coalition", coalition_json(inst, s)}, {"value", to_string(nu[s])}});
  }
  return out;
}

inline json theorem1_to_json(const Instance& inst, const Theorem1Verdict& v) {
  json doc{{"acyclic", v.acyclic},
           {"gadget_free", v.gadget_free},
           {"conditions_met", v.conditions_met},
           {"balanced", v.balanced},
           {"in_prekernel", v.in_prekernel},
           {"lemma2_holds", v.lemma2_holds}};
  doc["equivalence"] = v.conditions_met ? json(v.equivalence_holds ? "holds" : "FAILS")
                                        : json("conditions not met");
  doc["lemma2"] = json::array();
  for (const auto& c : v.lemma2) {
    doc["lemma2"].push_back({{"u", inst.id(c.u)},
                             {"v", inst.id(c.v)},
                             {"s_uv", to_string(c.power)},
                             {"bound", to_string(c.bound)},
                             {"holds", c.holds}});
  }
  return doc;
}

inline json aux_sidecar_to_json(const AuxiliaryBundle& b) {
  const auto& inst = b.original;
  json sigma = json::object();
  json copies = json::object();
  for (VertexIndex u = 0; u < inst.vertex_count(); ++u) {
    json labels = json::object();
    for (const auto& [v, pos] : b.sigma[u]) labels[inst.id(v)] = pos;
    sigma[inst.id(u)] = labels;
    json list = json::array();
    for (VertexIndex c : b.copies[u]) list.push_back(b.aux.id(c));
    copies[inst.id(u)] = list;
  }
  json matching = json::array();
  for (EdgeIndex e : b.matching.edges()) {
    const auto& ed = inst.edge(e);
    const auto& ae = b.aux.edge(b.aux_edge_of[e]);
    matching.push_back({{"edge", {inst.id(ed.u), inst.id(ed.v)}},
                        {"aux_edge", {b.aux.id(ae.u), b.aux.id(ae.v)}}});
  }
  return json{{"sigma", sigma}, {"copies", copies}, {"matching", matching}};
}

inline json transcript_to_json(const repro::Transcript& t) {
  json items = json::array();
  for (const auto& c : t.items) {
    items.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return json{{"passed", t.passed()}, {"certifications", items}};
}

inline json gap_to_json(const Instance& aux, const GapCertificate& g) {
  json point = json::array();
  for (EdgeIndex e = 0; e < aux.edge_count(); ++e) {
    if (g.fractional_point[e] == 0) continue;
    point.push_back({{"u", aux.id(aux.edge(e).u)},
                     {"v", aux.id(aux.edge(e).v)},
                     {"x", to_string(g.fractional_point[e])}});
  }
  return json{{"fractional_optimum", to_string(g.fractional_optimum)},
              {"matching_weight", to_string(g.matching_weight)},
              {"gap", to_string(g.fractional_optimum - g.matching_weight)},
              {"fractional_point", point}};
}

}  // namespace netbargain::io
