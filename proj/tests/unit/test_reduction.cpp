#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace netbargain;

namespace {

Instance path_abc() {
  return Instance::create({{"a", 1}, {"b", 2}, {"c", 1}}, {{"a", "b", 10}, {"b", "c", 2}});
}

std::vector<std::vector<VertexIndex>> random_order(std::mt19937_64& rng, const Instance& inst,
                                                   const CMatching& m) {
  std::vector<std::vector<VertexIndex>> order(inst.vertex_count());
  for (VertexIndex u = 0; u < inst.vertex_count(); ++u) {
    for (const auto& p : m.partners(u)) order[u].push_back(p.neighbor);
    std::shuffle(order[u].begin(), order[u].end(), rng);
  }
  return order;
}

}  // namespace

TEST(BuildAuxiliary, PathExample) {
  auto inst = path_abc();
  auto b = build_auxiliary(inst, CMatching::make(inst, {0, 1}));
  EXPECT_EQ(b.aux.vertex_count(), 4u);
  EXPECT_TRUE(b.aux.all_unit_capacity());
  EXPECT_EQ(b.sigma[inst.index_of("b")].at(inst.index_of("a")), 1);
  EXPECT_EQ(b.sigma[inst.index_of("b")].at(inst.index_of("c")), 2);
  ASSERT_EQ(b.aux_matching.size(), 2u);
  EXPECT_TRUE(b.aux.find_edge(b.aux.index_of("a#1"), b.aux.index_of("b#1")));
  EXPECT_TRUE(b.aux.find_edge(b.aux.index_of("c#1"), b.aux.index_of("b#2")));
  EXPECT_EQ(b.aux.edge_count(), 2u);
  EXPECT_EQ(b.aux_matching.weight(b.aux), b.matching.weight(inst));
}

TEST(BuildAuxiliary, SixVertexFixtureCounts) {
  auto inst = repro::lemma1_instance();
  auto b = build_auxiliary(inst, repro::lemma1_outer_cycle(inst));
  EXPECT_EQ(b.aux.vertex_count(), 12u);
  EXPECT_EQ(b.aux_matching.size(), 6u);
  EXPECT_EQ(b.aux.edge_count(), 10u);
  int be_copies = 0;
  for (const auto& e : b.aux.edges()) {
    const auto ou = inst.id(b.origin[e.u].original);
    const auto ov = inst.id(b.origin[e.v].original);
    if ((ou == "B" && ov == "E") || (ou == "E" && ov == "B")) {
      ++be_copies;
      EXPECT_EQ(e.weight, 10);
    }
  }
  EXPECT_EQ(be_copies, 4);
}

TEST(BuildAuxiliary, Example1Counts) {
  auto inst = repro::example1_instance();
  auto b = build_auxiliary(inst, CMatching::make(inst, repro::example1_matching_edges(inst)));
  EXPECT_EQ(b.copies[inst.index_of("u")].size(), 4u);
  EXPECT_EQ(b.copies[inst.index_of("x")].size(), 2u);
  EXPECT_EQ(b.copies[inst.index_of("y")].size(), 2u);
  for (const char* id : {"a", "b", "c", "d", "v", "w"}) EXPECT_EQ(b.copies[inst.index_of(id)].size(), 1u);
}

TEST(BuildAuxiliary, RejectsBadLabelling) {
  auto inst = path_abc();
  auto m = CMatching::make(inst, {0, 1});
  std::vector<std::vector<VertexIndex>> order(3);
  EXPECT_THROW(build_auxiliary(inst, m, order), ValidationError);
}

TEST(BuildAuxiliaryProperty, CopyAndEdgeCounts) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = oracle::random_instance(rng, {});
    auto m = oracle::random_c_matching(rng, inst);
    auto b = build_auxiliary(inst, m);
    long long copies = 0;
    long long edges = static_cast<long long>(m.size());
    for (VertexIndex u = 0; u < inst.vertex_count(); ++u) copies += inst.capacity(u);
    for (EdgeIndex e = 0; e < inst.edge_count(); ++e) {
      if (!m.contains(e)) edges += inst.capacity(inst.edge(e).u) * inst.capacity(inst.edge(e).v);
    }
    EXPECT_EQ(static_cast<long long>(b.aux.vertex_count()), copies);
    EXPECT_EQ(static_cast<long long>(b.aux.edge_count()), edges);
    EXPECT_EQ(b.aux_matching.size(), m.size());
    EXPECT_EQ(b.aux_matching.weight(b.aux), m.weight(inst));
    for (VertexIndex u = 0; u < inst.vertex_count(); ++u) {
      std::set<long long> positions;
      for (const auto& [v, pos] : b.sigma[u]) positions.insert(pos);
      EXPECT_EQ(static_cast<long long>(positions.size()), m.degree(u));
      if (!positions.empty()) {
        EXPECT_EQ(*positions.begin(), 1);
        EXPECT_EQ(*positions.rbegin(), m.degree(u));
      }
    }
  }
}

TEST(Phi, PathTranscription) {
  auto inst = path_abc();
  auto b = build_auxiliary(inst, CMatching::make(inst, {0, 1}));
  Allocation x{std::vector<Rational>(b.aux.vertex_count(), Rational(0))};
  x.payoff[b.aux.index_of("a#1")] = 3;
  x.payoff[b.aux.index_of("b#1")] = 7;
  x.payoff[b.aux.index_of("b#2")] = 2;
  x.payoff[b.aux.index_of("c#1")] = 0;
  auto z = phi(b, x);
  EXPECT_EQ(z.z(inst, 0, 1), 3);
  EXPECT_EQ(z.z(inst, 1, 0), 7);
  EXPECT_EQ(z.z(inst, 1, 2), 2);
  EXPECT_EQ(z.z(inst, 2, 1), 0);
}

TEST(Phi, EmptyMatching) {
  auto inst = path_abc();
  auto b = build_auxiliary(inst, CMatching::make(inst, {}));
  auto z = phi(b, uniform_allocation(b.aux, 0));
  for (const auto& share : z.shares()) EXPECT_EQ(share, 0);
  EXPECT_EQ(phi_inverse(b, z), uniform_allocation(b.aux, 0));
}

TEST(Phi, RejectsInvalidUnitAllocation) {
  auto inst = path_abc();
  auto b = build_auxiliary(inst, CMatching::make(inst, {0}));
  EXPECT_THROW(phi(b, uniform_allocation(b.aux, 1)), ValidationError);
}

TEST(PhiInverse, SixVertexBalancedTranscription) {
  auto inst = repro::lemma1_instance();
  auto z = repro::lemma1_balanced_solution(inst);
  auto b = build_auxiliary(inst, z.matching());
  auto x = phi_inverse(b, z);
  const auto B = inst.index_of("B");
  EXPECT_EQ(x.payoff[b.copy(B, b.sigma[B].at(inst.index_of("A")))], Rational(20, 3));
  EXPECT_EQ(x.payoff[b.copy(B, b.sigma[B].at(inst.index_of("C")))], Rational(35, 3));
}

TEST(Preservation, SixVertexPairs) {
  auto inst = repro::lemma1_instance();
  auto balanced = repro::lemma1_balanced_solution(inst);
  auto b = build_auxiliary(inst, balanced.matching());
  auto r = verify_preservation(b, balanced, phi_inverse(b, balanced));
  EXPECT_TRUE(r.holds());
  EXPECT_TRUE(r.original_balanced);
  EXPECT_TRUE(r.aux_balanced);

  auto even = Solution::from_splits(
      inst, balanced.matching(),
      {{{"A", "B"}, 5}, {{"B", "A"}, 5}, {{"B", "C"}, 15}, {{"C", "B"}, 5}, {{"C", "D"}, 15},
       {{"D", "C"}, 15}, {{"D", "E"}, 5}, {{"E", "D"}, 5}, {{"E", "F"}, 15}, {{"F", "E"}, 5},
       {{"F", "A"}, 15}, {{"A", "F"}, 15}});
  auto r2 = verify_preservation(b, even, phi_inverse(b, even));
  EXPECT_TRUE(r2.holds());
  EXPECT_TRUE(r2.original_stable);
  EXPECT_TRUE(r2.aux_stable);
  EXPECT_FALSE(r2.original_balanced);
  EXPECT_FALSE(r2.aux_balanced);
}

TEST(Preservation, RejectsUnrelatedPair) {
  auto inst = repro::lemma1_instance();
  auto balanced = repro::lemma1_balanced_solution(inst);
  auto b = build_auxiliary(inst, balanced.matching());
  auto x = phi_inverse(b, balanced);
  std::swap(x.payoff[0], x.payoff[1]);
  EXPECT_THROW(verify_preservation(b, balanced, x), ValidationError);
}

TEST(Preservation, UnitInstanceIsRenaming) {
  std::mt19937_64 rng(53);
  oracle::Family f;
  f.max_capacity = 1;
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = oracle::random_instance(rng, f);
    auto m = oracle::random_c_matching(rng, inst);
    auto b = build_auxiliary(inst, m);
    EXPECT_EQ(b.aux.vertex_count(), inst.vertex_count());
    EXPECT_EQ(b.aux.edge_count(), inst.edge_count());
    auto z = oracle::random_solution(rng, inst, m);
    EXPECT_TRUE(verify_preservation(b, z, phi_inverse(b, z)).holds());
  }
}

TEST(PreservationProperty, RandomSplitsAndLabellings) {
  std::mt19937_64 rng(57);
  oracle::Family f;
  f.max_vertices = 7;
  int stable_seen = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto inst = oracle::random_instance(rng, f);
    auto m = oracle::random_c_matching(rng, inst);
    auto z = oracle::random_solution(rng, inst, m);
    for (auto b : {build_auxiliary(inst, m), build_auxiliary(inst, m, random_order(rng, inst, m))}) {
      auto x = phi_inverse(b, z);
      EXPECT_EQ(phi(b, x).shares(), z.shares());
      EXPECT_EQ(phi_inverse(b, phi(b, x)), x);
      auto r = verify_preservation(b, z, x);
      EXPECT_TRUE(r.holds());
      stable_seen += r.original_stable;
    }
  }
  EXPECT_GT(stable_seen, 0);
}

TEST(PreservationProperty, UncoveredCopiesReportedSeparately) {
  // c_u = 3, one matched edge, one unmatched neighbor: copies u#2, u#3 are
  // uncovered and see the same outside neighbors as u#1.
  auto inst = Instance::create({{"p", 1}, {"q", 1}, {"u", 3}}, {{"u", "p", 4}, {"u", "q", 6}});
  auto m = CMatching::make(inst, {inst.edge_between("u", "q")});
  auto z = Solution::from_splits(inst, m, {{{"u", "q"}, 3}, {{"q", "u"}, 3}});
  auto b = build_auxiliary(inst, m);
  auto r = verify_preservation(b, z, phi_inverse(b, z));
  EXPECT_TRUE(r.options_equal);
  // alpha_u = 4 (p unsaturated); the uncovered copies also see p at 4.
  EXPECT_TRUE(r.uncovered_options_equal);
  EXPECT_FALSE(r.original_stable);
  EXPECT_FALSE(r.aux_stable);
}
