#include <gtest/gtest.h>

#include <random>

#include "pext/graph.hpp"
#include "test_util.hpp"

using namespace pext;
using namespace pext::testing;

TEST(Graph, EdgeBookkeeping) {
    Graph g(5);
    g.add_edge(0, 1);
    g.add_edge(1, 0);
    g.add_edge(3, 4);
    EXPECT_EQ(g.size(), 2);
    EXPECT_TRUE(g.adjacent(1, 0));
    g.remove_edge(0, 1);
    EXPECT_EQ(g.size(), 1);
    EXPECT_TRUE(g.valid());
    EXPECT_THROW(g.add_edge(2, 2), ContractError);
    EXPECT_THROW(g.add_edge(0, 5), ContractError);
}

TEST(Graph, Excess) {
    EXPECT_EQ(excess(complete_graph(4)).value, 2);
    EXPECT_EQ(excess(k4_minus_edge()).value, 1);
    EXPECT_EQ(excess(cycle_graph(6)).value, -3);
    EXPECT_THROW(excess(path_graph(3)), ContractError);
}

TEST(Graph, OddComponents) {
    Graph c6 = cycle_graph(6);
    EXPECT_EQ(odd_components(c6, bit(2)), 1);
    EXPECT_EQ(odd_components(c6, bit(0) | bit(2) | bit(4)), 3);
    EXPECT_EQ(odd_components(complete_graph(4), bit(0) | bit(1)), 0);
}

TEST(Graph, OddComponentParity) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        int n = 2 + static_cast<int>(rng() % 11);
        Graph g = random_graph(n, 0.3, rng);
        VertexSet s = static_cast<VertexSet>(rng()) & g.vertices();
        EXPECT_EQ(odd_components(g, s) % 2, (n - popcount(s)) % 2);
    }
}

TEST(Graph, TwoConnectivity) {
    EXPECT_TRUE(is_two_connected(cycle_graph(4)));
    Graph bowtie(5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 2}});
    EXPECT_FALSE(is_two_connected(bowtie));
    EXPECT_FALSE(is_two_connected(path_graph(4)));
    EXPECT_THROW(is_two_connected(path_graph(2)), ContractError);
}

TEST(Graph, Bipartite) {
    VertexSet side = 0;
    EXPECT_TRUE(is_bipartite(cycle_graph(6), &side));
    EXPECT_EQ(popcount(side), 3);
    EXPECT_FALSE(is_bipartite(complete_graph(3)));
}

TEST(Graph6, FrozenReferences) {
    EXPECT_EQ(to_graph6(cycle_graph(4)), "Cl");
    EXPECT_EQ(to_graph6(cycle_graph(6)), "EhEG");
    EXPECT_EQ(to_graph6(complete_graph(4)), "C~");
    EXPECT_EQ(to_graph6(Graph(2)), "A?");
    EXPECT_EQ(to_graph6(path_graph(4)), "Ch");
    EXPECT_EQ(to_graph6(complete_bipartite(3, 3)), "EFz_");
    EXPECT_EQ(to_graph6(complete_graph(2)), "A_");
    EXPECT_EQ(to_graph6(complete_graph(32)), "_" + std::string(82, '~') + "{");
    EXPECT_EQ(to_graph6(Graph(13, {{0, 12}, {3, 7}, {5, 11}})), "L????_?????__?");
    Graph petersen(10, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 5}, {1, 6}, {2, 7}, {3, 8}, {4, 9},
                        {5, 7}, {7, 9}, {9, 6}, {6, 8}, {8, 5}});
    EXPECT_EQ(to_graph6(petersen), "IheA@GUAo");
}

TEST(Graph6, Decode) {
    Graph g = from_graph6("A?");
    EXPECT_EQ(g.order(), 2);
    EXPECT_EQ(g.size(), 0);
    EXPECT_EQ(from_graph6(">>graph6<<Cl\n"), cycle_graph(4));
}

TEST(Graph6, RoundTrip) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        int n = static_cast<int>(rng() % 33);
        Graph g = random_graph(n, 0.4, rng);
        EXPECT_EQ(from_graph6(to_graph6(g)), g);
    }
}

TEST(Graph6, MalformedInputReportsOffset) {
    auto offset_of = [](std::string_view s) -> long {
        try {
            from_graph6(s);
        } catch (const ParseError& e) {
            return static_cast<long>(e.offset());
        }
        return -1;
    };
    EXPECT_EQ(offset_of(""), 0);
    EXPECT_EQ(offset_of("C"), 1);      // body too short
    EXPECT_EQ(offset_of("Cl?"), 2);    // body too long
    EXPECT_EQ(offset_of("C\x01"), 1);  // byte out of range
    EXPECT_EQ(offset_of("Bx"), 1);     // padding bit set
    EXPECT_EQ(offset_of("~??"), 0);    // large-n form
    EXPECT_EQ(offset_of("`"), 0);      // 33 vertices
}
