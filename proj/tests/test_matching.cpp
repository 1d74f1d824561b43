#include <gtest/gtest.h>

#include <random>

#include "pext/ears.hpp"
#include "pext/matching.hpp"
#include "pext/oracle.hpp"
#include "test_util.hpp"

using namespace pext;
using namespace pext::testing;

TEST(Matching, Counts) {
    for (int l = 2; l <= 8; ++l) EXPECT_EQ(count_perfect_matchings(cycle_graph(2 * l)), 2u);
    EXPECT_EQ(count_perfect_matchings(complete_graph(4)), 3u);
    EXPECT_EQ(count_perfect_matchings(complete_bipartite(3, 3)), 6u);
    EXPECT_EQ(count_perfect_matchings(complete_graph(10)), 945u);
    EXPECT_EQ(count_perfect_matchings(path_graph(5)), 0u);
}

TEST(Matching, CappedCounter) {
    EXPECT_EQ(count_perfect_matchings_capped(complete_graph(10), 50), 50u);
    EXPECT_EQ(count_perfect_matchings_capped(complete_graph(4), 50), 3u);
}

TEST(Matching, AgreesWithEnumerationOnRandomGraphs) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 2 * (1 + static_cast<int>(rng() % 6));
        Graph g = random_graph(n, 0.2 + 0.6 * (trial % 5) / 4.0, rng);
        ASSERT_EQ(count_perfect_matchings(g), oracle::brute_matchings(g)) << to_graph6(g);
    }
}

TEST(Matching, ClassifyExamples) {
    auto c6 = classify_edges(cycle_graph(6));
    EXPECT_EQ(c6.phi, 2u);
    EXPECT_EQ(c6.free_edge_count(), 0);
    auto k4 = classify_edges(complete_graph(4));
    EXPECT_EQ(k4.free_edge_count(), 0);
    auto d = classify_edges(k4_minus_edge());
    EXPECT_EQ(d.phi, 2u);
    EXPECT_EQ(d.free_edge_count(), 1);
    EXPECT_TRUE(d.free[0] & bit(1));
    EXPECT_THROW(classify_edges(Graph(4, {{0, 1}, {0, 2}, {0, 3}})), ContractError);
    EXPECT_THROW(classify_edges(path_graph(3)), ContractError);
}

TEST(Matching, ClassifyAgreesWithEnumeration) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 400; ++trial) {
        int n = 2 * (1 + static_cast<int>(rng() % 5));
        Graph g = random_graph(n, 0.5, rng);
        if (oracle::brute_matchings(g) == 0) continue;
        EXPECT_EQ(classify_edges(g).free_subgraph(), oracle::brute_free_subgraph(g));
    }
    // Past the enumeration budget the per-edge fallback is used.
    Graph k16 = complete_graph(16);
    k16.remove_edge(0, 1);
    auto prof = classify_edges(k16);
    EXPECT_EQ(prof.free_edge_count(), 0);
}

TEST(Matching, OneExtendable) {
    EXPECT_TRUE(is_one_extendable(cycle_graph(8)));
    EXPECT_FALSE(is_one_extendable(k4_minus_edge()));
    EXPECT_FALSE(is_one_extendable(disjoint_union(cycle_graph(4), cycle_graph(4))));
}

namespace {
// Reference: free edges nonempty and all on one ear of the fast ear listing.
bool almost_reference(const Graph& g) {
    Graph fr = oracle::brute_free_subgraph(g);
    if (fr.size() == 0) return false;
    for (const Ear& e : list_ears(g)) {
        auto path = e.path();
        Graph on(g.order());
        for (std::size_t i = 0; i + 1 < path.size(); ++i) on.add_edge(path[i], path[i + 1]);
        bool all = true;
        for (auto [u, v] : fr.edges())
            if (!on.adjacent(u, v)) all = false;
        if (all) return true;
    }
    return false;
}
}  // namespace

TEST(Matching, AlmostOneExtendable) {
    EXPECT_FALSE(is_almost_one_extendable(complete_graph(4)));
    EXPECT_FALSE(is_almost_one_extendable(cycle_graph(6)));
    EXPECT_TRUE(is_almost_one_extendable(k4_minus_edge()));

    Graph chord = cycle_graph(6);
    chord.add_edge(0, 3);
    EXPECT_EQ(is_almost_one_extendable(chord), almost_reference(chord));

    Graph eared = augment(cycle_graph(4), EarSpec{0, 1, 2});
    EXPECT_EQ(is_almost_one_extendable(eared), almost_reference(eared));

    std::mt19937 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        Graph g = random_two_connected(2 * (2 + static_cast<int>(rng() % 3)), rng);
        if (oracle::brute_matchings(g) == 0) continue;
        EXPECT_EQ(is_almost_one_extendable(g), almost_reference(g)) << to_graph6(g);
    }
}

TEST(Matching, Elementary) {
    EXPECT_TRUE(is_elementary(cycle_graph(6)));
    EXPECT_TRUE(is_elementary(k4_minus_edge()));
    EXPECT_FALSE(is_elementary(path_graph(4)));
    for (int n = 2; n <= 6; n += 2)
        for (const auto& g : oracle::all_graphs(n)) EXPECT_EQ(is_elementary(g), oracle::brute_is_elementary(g));
}
