#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "pext/search.hpp"
#include "test_util.hpp"

using namespace pext;
using namespace pext::testing;

namespace {
std::vector<std::string> forms(const std::vector<Emitted>& emitted) {
    std::vector<std::string> out;
    for (const auto& e : emitted) out.push_back(e.form);
    std::sort(out.begin(), out.end());
    return out;
}
}  // namespace

TEST(SizeBound, TableValues) {
    EXPECT_EQ(size_bound(10, 4), 12);
    EXPECT_EQ(size_bound(27, 6), 22);
    EXPECT_EQ(size_bound(15, 6), 16);
    EXPECT_EQ(size_bound(22, 5), 20);
    EXPECT_THROW(size_bound(2, 2), ContractError);
    EXPECT_THROW(size_bound(1, 0), ContractError);
}

TEST(PruneBudget, Examples) {
    EXPECT_EQ(prune_budget(3, 5, 5, 3, 8, 20), 8);
    EXPECT_EQ(prune_budget(2, 5, 5, 3, 8, 20), std::nullopt);
    EXPECT_EQ(prune_budget(-3, 4, 5, 0, 8, 20), std::nullopt);  // c_best + 2(p - phi) = c_target - 1
    EXPECT_EQ(prune_budget(0, 5, 6, 1, 6, 20), 6);
    EXPECT_EQ(prune_budget(5, 2, 9, 1, 6, 12), 12);  // clamped
}

TEST(Generate, SmallCases) {
    auto two = generate(2, 1);
    ASSERT_EQ(two.emitted.size(), 1u);
    EXPECT_EQ(two.emitted[0].form, canonical_form(k4_minus_edge()));
    EXPECT_EQ(two.record.c_found, 1);

    // K_4 is the only extremal one; a 6-vertex graph with excess 1 also qualifies.
    auto three = generate(3, 1);
    ASSERT_EQ(three.emitted.size(), 2u);
    EXPECT_EQ(three.record.graphs, std::vector<std::string>{canonical_form(complete_graph(4))});
    EXPECT_EQ(three.record.c_found, 2);
    EXPECT_EQ(generate(3, 2).emitted.size(), 1u);

    auto one = generate(1, 0);
    EXPECT_EQ(one.record.graphs, std::vector<std::string>{"A_"});
}

TEST(Generate, ElevenAndTwelve) {
    auto r11 = generate(11, 1).record;
    EXPECT_EQ(r11.c_found, 3);
    EXPECT_EQ(r11.graphs.size(), 2u);
    EXPECT_EQ(r11.n_min, 8);
    auto r12 = generate(12, 1).record;
    EXPECT_EQ(r12.c_found, 5);
    EXPECT_EQ(r12.n_min, 6);
}

TEST(Generate, Invariants) {
    for (int p = 2; p <= 8; ++p) {
        std::map<std::string, int> depth_phi;
        SearchHooks hooks;
        std::vector<std::pair<int, bool>> path;  // (phi, almost) along the current branch
        hooks.on_node = [&](const SearchNode& node) {
            path.resize(node.depth);
            if (node.depth > 0) {
                // Gradedness: phi strictly grows from the last 1-extendable ancestor,
                // and no two consecutive almost graphs.
                EXPECT_FALSE(node.almost && path.back().second);
                EXPECT_GE(static_cast<int>(node.phi), path.back().first);
                if (!node.almost) {
                    for (std::size_t i = path.size(); i-- > 0;)
                        if (!path[i].second) {
                            EXPECT_GT(static_cast<int>(node.phi), path[i].first);
                            break;
                        }
                }
            }
            path.push_back({static_cast<int>(node.phi), node.almost});
            EXPECT_EQ(count_perfect_matchings(node.h), node.phi);
            EXPECT_EQ(is_almost_one_extendable(node.h), node.almost);
            EXPECT_EQ(!node.almost, is_one_extendable(node.h));
        };
        auto res = generate(p, 1, true, hooks);
        int bound = size_bound(p, 1);
        std::set<std::string> seen;
        for (const auto& e : res.emitted) {
            EXPECT_TRUE(seen.insert(e.form).second) << "duplicate " << e.form;
            EXPECT_LE(e.n, bound);
            EXPECT_GE(e.excess, 1);
            Graph g = from_graph6(e.form);
            EXPECT_EQ(count_perfect_matchings(g), static_cast<Count>(p));
            EXPECT_TRUE(is_elementary(g));
            EXPECT_EQ(excess(g).value, e.excess);
        }
    }
}

TEST(Generate, PruningDoesNotChangeOutput) {
    for (int p = 2; p <= 8; ++p) {
        auto on = generate(p, 1, true), off = generate(p, 1, false);
        EXPECT_EQ(forms(on.emitted), forms(off.emitted)) << "p=" << p;
        EXPECT_LE(on.stats.nodes, off.stats.nodes);
    }
}

TEST(Jobs, DepthZeroIsFullRun) {
    auto jobs = split_jobs(6, 1, 0);
    ASSERT_EQ(jobs.size(), 1u);
    EXPECT_TRUE(jobs[0].full);
    JobProgress prog;
    run_job(jobs[0], 6, 1, true, prog);
    EXPECT_EQ(forms(prog.emitted), forms(generate(6, 1).emitted));
}

TEST(Jobs, PartitionLaw) {
    for (int p : {5, 8}) {
        auto want = forms(generate(p, 1).emitted);
        for (int depth = 1; depth <= 3; ++depth) {
            std::vector<Emitted> all;
            std::set<std::string> ids;
            for (const auto& jd : split_jobs(p, 1, depth)) {
                EXPECT_TRUE(ids.insert(jd.id()).second);
                JobProgress prog;
                run_job(jd, p, 1, true, prog);
                all.insert(all.end(), prog.emitted.begin(), prog.emitted.end());
            }
            EXPECT_EQ(forms(all), want) << "p=" << p << " depth=" << depth;
        }
    }
}

TEST(Jobs, ResumeSkipsCompletedBranches) {
    auto jobs = split_jobs(8, 1, 1);
    ASSERT_FALSE(jobs.empty());
    for (const auto& jd : jobs) {
        JobProgress full;
        std::vector<JobProgress> snapshots;
        run_job(jd, 8, 1, true, full, [&](const JobProgress& p) { snapshots.push_back(p); });
        for (const auto& snap : snapshots) {
            JobProgress resumed = snap;
            resumed.finished = false;
            run_job(jd, 8, 1, true, resumed);
            EXPECT_EQ(forms(resumed.emitted), forms(full.emitted));
        }
        JobProgress again;
        run_job(jd, 8, 1, true, again);
        EXPECT_EQ(forms(again.emitted), forms(full.emitted));
    }
}

TEST(Jobs, StopFlagInterrupts) {
    std::atomic<bool> stop{true};
    JobProgress prog;
    EXPECT_THROW(run_job(JobDescriptor{true, 0, {}, 0}, 8, 1, true, prog, {}, &stop), Interrupted);
    EXPECT_FALSE(prog.finished);
}

TEST(Jobs, BadPrefixIsRejected) {
    JobDescriptor jd{false, 4, {EarSpec{1, 3, 0}}, 2};  // (1,3) is not the orbit representative
    JobProgress prog;
    EXPECT_THROW(run_job(jd, 6, 1, true, prog), IntegrityError);
    JobDescriptor bad_root{false, 40, {}, 1};
    EXPECT_THROW(run_job(bad_root, 6, 1, true, prog), IntegrityError);
}
