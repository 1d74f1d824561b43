#include <gtest/gtest.h>

#include <random>

#include "pext/oracle.hpp"
#include "pext/spires.hpp"
#include "test_util.hpp"

using namespace pext;
using namespace pext::testing;

namespace {
const TableSolver& solved_through_ten() {
    static TableSolver solver = [] {
        TableSolver s;
        for (int p = 1; p <= 10; ++p) s.solve(p);
        return s;
    }();
    return solver;
}
}  // namespace

TEST(Spires, BuildExamples) {
    Chamber k4 = make_chamber(complete_graph(4));
    EXPECT_EQ(build_spire({k4}), complete_graph(4));
    Chamber k2 = make_chamber(complete_graph(2));
    EXPECT_EQ(k2.barrier_size(), 1);
    // The barrier vertex of the lower K_2 joins both vertices of the upper one.
    Graph two = build_spire({k2, k2});
    EXPECT_EQ(two.order(), 4);
    EXPECT_EQ(two.size(), 4);
    EXPECT_EQ(count_perfect_matchings(two), 1u);
    EXPECT_EQ(excess(two).value, 0);
}

TEST(Spires, MaximumBarrier) {
    EXPECT_EQ(maximum_barrier(cycle_graph(6)), bit(0) | bit(2) | bit(4));
    EXPECT_EQ(popcount(maximum_barrier(complete_graph(4))), 1);
}

TEST(Spires, Factorizations) {
    using F = std::vector<std::vector<int>>;
    EXPECT_EQ(factorizations(12), (F{{12}, {2, 6}, {3, 4}, {2, 2, 3}}));
    EXPECT_EQ(factorizations(13), (F{{13}}));
    EXPECT_EQ(factorizations(16), (F{{16}, {2, 8}, {4, 4}, {2, 2, 4}, {2, 2, 2, 2}}));
    EXPECT_EQ(factorizations(1), (F{{1}}));
}

TEST(Spires, ConjecturedBound) {
    EXPECT_EQ(conjectured_upper_bound(6), 3);
    EXPECT_EQ(conjectured_upper_bound(11), 4);
    EXPECT_EQ(conjectured_upper_bound(27), 6);
    const int want[] = {4, 5, 5, 5, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6};
    for (int p = 11; p <= 27; ++p) EXPECT_EQ(conjectured_upper_bound(p), want[p - 11]) << p;
}

TEST(Spires, ExcessFormulaMatchesAssembledGraph) {
    const auto& db = solved_through_ten().records();
    std::vector<Chamber> pool;
    for (const auto& [q, rec] : db)
        for (const auto& form : rec.graphs) pool.push_back(make_chamber(from_graph6(form)));
    std::mt19937 rng(47);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Chamber> pick;
        int n = 0;
        Count phi = 1;
        for (int k = 1 + static_cast<int>(rng() % 3); k > 0; --k) {
            const Chamber& ch = pool[rng() % pool.size()];
            if (n + ch.order() > 20) break;
            pick.push_back(ch);
            n += ch.order();
            phi *= ch.phi;
        }
        Graph g = build_spire(pick);
        EXPECT_EQ(excess(g).value, spire_excess(pick));
        EXPECT_EQ(count_perfect_matchings(g), phi);
    }
}

TEST(Spires, SixIsTwoTimesThree) {
    auto rep = characterize_extremal(6, solved_through_ten().records());
    EXPECT_EQ(rep.c_p, 3);
    bool split = false;
    for (const auto& cfg : rep.optimal)
        if (cfg.factors == std::vector<int>{2, 3}) split = true;
    EXPECT_TRUE(split);
    // K_4 - e has a half-size barrier; K_4 only a singleton, so it sits on top.
    for (const auto& ch : rep.chambers) {
        if (ch.phi == 2) {
            EXPECT_TRUE(ch.anywhere);
        }
        if (ch.phi == 3) {
            EXPECT_FALSE(ch.anywhere);
        }
    }
    for (const auto& cfg : rep.optimal) {
        if (cfg.factors == std::vector<int>{2, 3}) {
            EXPECT_EQ(cfg.chambers.back(), canonical_form(complete_graph(4)));
        }
    }
}

TEST(Spires, MissingDivisorsAreListed) {
    std::map<int, ExtremalRecord> db;
    db[2] = generate(2, 1).record;
    try {
        characterize_extremal(12, db);
        FAIL() << "expected MissingDivisors";
    } catch (const MissingDivisors& e) {
        EXPECT_EQ(e.missing, (std::vector<int>{3, 4, 6, 12}));
    }
}

TEST(Spires, PowersOfTwo) {
    // Stacking 2-extremal chambers gives excess k for p = 2^k.
    const auto& rows = solved_through_ten().rows();
    EXPECT_EQ(rows.at(4).c_p, 2);
    EXPECT_EQ(rows.at(8).c_p, 3);
}

TEST(Table, OneThroughTen) {
    const int c[] = {0, 1, 2, 2, 2, 3, 3, 3, 4, 4};
    const int n[] = {2, 4, 4, 6, 6, 6, 6, 6, 6, 6};
    for (int p = 1; p <= 10; ++p) {
        const auto& row = solved_through_ten().rows().at(p);
        EXPECT_EQ(row.c_p, c[p - 1]) << p;
        EXPECT_EQ(row.n_p, n[p - 1]) << p;
        EXPECT_LE(row.c_p, conjectured_upper_bound(p));
    }
    EXPECT_EQ(solved_through_ten().rows().at(10).N_p, 12);
}

TEST(Table, SolveMustProceedInOrder) {
    TableSolver s;
    EXPECT_THROW(s.solve(3), ContractError);
}
