#include <gtest/gtest.h>

#include <sstream>

#include "dlsh/packing_graph.hpp"
#include "dlsh/verify.hpp"

using namespace dlsh;

TEST(PackGraph, Triangle) {
  const std::vector<Edge> k3{{0, 1}, {0, 2}, {1, 2}};
  const auto g = pack_graph(3, k3);
  EXPECT_EQ(g.representatives, (std::vector<std::uint32_t>{0}));
  EXPECT_EQ(g.assignment, (std::vector<std::uint32_t>{0, 0, 0}));
  EXPECT_EQ(g.multiplicities, (std::vector<std::uint64_t>{3}));
  EXPECT_EQ(g.pair_sum(), 3u);
  EXPECT_TRUE(verify_packing(g, 3, k3));
}

TEST(PackGraph, EmptyEdgeSet) {
  const auto g = pack_graph(4, {});
  EXPECT_EQ(g.representatives, (std::vector<std::uint32_t>{0, 1, 2, 3}));
  EXPECT_EQ(g.multiplicities, (std::vector<std::uint64_t>{1, 1, 1, 1}));
  EXPECT_EQ(g.pair_sum(), 0u);
  EXPECT_TRUE(verify_packing(g, 4, {}));
}

TEST(PackGraph, StarAttachesCenterToLowestLeaf) {
  // Center 0, leaves 1..3: leaves have degree 1 and are visited first.
  const std::vector<Edge> star{{0, 1}, {0, 2}, {0, 3}};
  const auto g = pack_graph(4, star);
  EXPECT_EQ(g.representatives, (std::vector<std::uint32_t>{1, 2, 3}));
  EXPECT_EQ(g.assignment[0], 1u);
  EXPECT_EQ(g.multiplicities, (std::vector<std::uint64_t>{2, 1, 1}));
  EXPECT_EQ(g.pair_sum(), 1u);
  EXPECT_TRUE(verify_packing(g, 4, star));
}

TEST(PackGraph, PathPrefersLowerDegreeRepresentative) {
  // Path 0-1-2-3: order 0,3 (degree 1) then 1,2. Both ends become representatives.
  const std::vector<Edge> path{{0, 1}, {1, 2}, {2, 3}};
  const auto g = pack_graph(4, path);
  EXPECT_EQ(g.representatives, (std::vector<std::uint32_t>{0, 3}));
  EXPECT_EQ(g.assignment, (std::vector<std::uint32_t>{0, 0, 3, 3}));
}

TEST(PackGraph, RejectsMalformedEdges) {
  EXPECT_THROW(pack_graph(3, {{1, 1}}), argument_error);
  EXPECT_THROW(pack_graph(3, {{0, 5}}), argument_error);
  EXPECT_THROW(pack_graph(3, {{0, 1}, {1, 0}}), argument_error);
}

TEST(VerifyPacking, DetectsTampering) {
  const std::vector<Edge> path{{0, 1}, {1, 2}, {2, 3}, {3, 4}};
  const auto good = pack_graph(5, path);
  ASSERT_TRUE(verify_packing(good, 5, path));

  // Representative mapped elsewhere.
  auto moved = good;
  const auto rep = moved.representatives.front();
  moved.assignment[rep] = moved.representatives.back();
  EXPECT_EQ(verify_packing(moved, 5, path).fault, PackingFault::representative_moved);

  // Non-representative mapped to a non-neighbour representative.
  auto far = good;
  for (std::uint32_t v = 0; v < 5; ++v) {
    if (far.assignment[v] == v) continue;
    for (auto u : far.representatives) {
      if (u != far.assignment[v] && !(u + 1 == v || v + 1 == u)) {
        far.assignment[v] = u;
        break;
      }
    }
    break;
  }
  EXPECT_FALSE(verify_packing(far, 5, path));

  // Two adjacent representatives.
  PackedGraph adjacent;
  adjacent.representatives = {0, 1};
  adjacent.assignment = {0, 1};
  adjacent.multiplicities = {1, 1};
  EXPECT_EQ(verify_packing(adjacent, 2, {{0, 1}}).fault, PackingFault::adjacent_representatives);

  auto wrong_count = good;
  wrong_count.multiplicities.front() += 1;
  EXPECT_EQ(verify_packing(wrong_count, 5, path).fault, PackingFault::multiplicity_mismatch);

  auto short_map = good;
  short_map.assignment.pop_back();
  EXPECT_EQ(verify_packing(short_map, 5, path).fault, PackingFault::malformed);
}

TEST(VerifyPacking, PairSumCheck) {
  // Valid structure but a representative absorbing two non-adjacent vertices
  // is allowed only while the pair sum stays within |E|.
  PackedGraph g;
  g.representatives = {0};
  g.assignment = {0, 0, 0};
  g.multiplicities = {3};
  const std::vector<Edge> fan{{0, 1}, {0, 2}};
  EXPECT_EQ(verify_packing(g, 3, fan).fault, PackingFault::pair_sum_exceeds_edges);
}

TEST(PackGraph, EveryGraphOnFiveVertices) {
  std::vector<Edge> all;
  for (std::uint32_t i = 0; i < 5; ++i) {
    for (std::uint32_t j = i + 1; j < 5; ++j) all.emplace_back(i, j);
  }
  for (std::uint32_t mask = 0; mask < (1u << all.size()); ++mask) {
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < all.size(); ++k) {
      if (mask & (1u << k)) edges.push_back(all[k]);
    }
    const auto g = pack_graph(5, edges);
    const auto check = verify_packing(g, 5, edges);
    ASSERT_TRUE(check) << "mask " << mask << ": " << to_string(check.fault);
    ASSERT_GE(g.representatives.size() * (5 + 2 * edges.size()), 25u) << "mask " << mask;
  }
}

TEST(PackGraph, RandomGraphSuite) {
  const auto res = check_graph_packing(3, 200);
  EXPECT_TRUE(res.passed) << res.detail;
  EXPECT_EQ(res.checks, 600u);
}

TEST(EdgeIo, RoundTripAndErrors) {
  const std::vector<Edge> edges{{0, 3}, {1, 2}};
  std::stringstream buf;
  write_edges(buf, edges);
  EXPECT_EQ(buf.str(), "0,3\n1,2\n");
  EXPECT_EQ(read_edges(buf), edges);
  std::stringstream reversed("3,1\n");
  EXPECT_THROW(read_edges(reversed), format_error);
  std::stringstream junk("0;1\n");
  EXPECT_THROW(read_edges(junk), format_error);
}
