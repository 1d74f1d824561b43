#pragma once

// Spire assembly from elementary chambers and the per-p table of extremal
// constants built on top of the search.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <climits>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pext/barriers.hpp"
#include "pext/graph.hpp"
#include "pext/matching.hpp"
#include "pext/search.hpp"

namespace pext {

struct Chamber {
    Graph g;
    Count phi = 0;
    VertexSet max_barrier = 0;

    int order() const { return g.order(); }
    int barrier_size() const { return popcount(max_barrier); }
    /// |X| / n as an exact fraction compared by cross-multiplication.
    bool rel_at_least(const Chamber& o) const { return barrier_size() * o.order() >= o.barrier_size() * order(); }
    bool half_barrier() const { return 2 * barrier_size() == order(); }
};

/// Lexicographically least (by sorted vertex list) among the largest barriers.
inline VertexSet maximum_barrier(const Graph& g) {
    auto cat = barrier_catalog_bruteforce(g);
    VertexSet best = 0;
    auto sorted_less = [](VertexSet a, VertexSet b) {
        while (a && b) {
            Vertex x = lowest(a), y = lowest(b);
            if (x != y) return x < y;
            a &= a - 1;
            b &= b - 1;
        }
        return a == 0 && b != 0;
    };
    for (VertexSet b : cat.barriers()) {
        if (popcount(b) > popcount(best) || (popcount(b) == popcount(best) && sorted_less(b, best))) best = b;
    }
    return best;
}

inline Chamber make_chamber(const Graph& g) {
    Chamber ch;
    ch.g = g;
    ch.phi = count_perfect_matchings(g);
    ch.max_barrier = maximum_barrier(g);
    return ch;
}

/// Disjoint union of the chambers plus every edge from X_i to all of chamber j, i < j.
inline Graph build_spire(const std::vector<Chamber>& chambers) {
    int total = 0;
    for (const auto& ch : chambers) total += ch.order();
    if (total > kMaxVertices) throw ContractError("spire exceeds vertex cap");
    Graph g(total);
    std::vector<int> offset;
    int at = 0;
    for (const auto& ch : chambers) {
        offset.push_back(at);
        for (auto [u, v] : ch.g.edges()) g.add_edge(at + u, at + v);
        at += ch.order();
    }
    for (std::size_t i = 0; i < chambers.size(); ++i)
        for_each_vertex(chambers[i].max_barrier, [&](Vertex x) {
            for (std::size_t j = i + 1; j < chambers.size(); ++j)
                for (int v = 0; v < chambers[j].order(); ++v) g.add_edge(offset[i] + x, offset[j] + v);
        });
    return g;
}

/// Excess of the spire in the given order, without building it.
inline int spire_excess(const std::vector<Chamber>& chambers) {
    // c = sum c_i + sum_{i<j} n_j (|X_i| - n_i/2), all terms integers times 1/2.
    long long twice = 0;
    int later = 0;
    for (std::size_t k = chambers.size(); k-- > 0;) {
        const auto& ch = chambers[k];
        twice += 2LL * excess(ch.g).value;
        twice += static_cast<long long>(later) * (2 * ch.barrier_size() - ch.order());
        later += ch.order();
    }
    return static_cast<int>(twice / 2);
}

/// Multisets of factors >= 2 with product p, by number of factors then
/// lexicographically; {p} first. p = 1 gives {{1}}.
inline std::vector<std::vector<int>> factorizations(int p) {
    if (p < 1) throw ContractError("factorizations requires p >= 1");
    if (p == 1) return {{1}};
    std::vector<std::vector<int>> all;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int rest, int min_factor) {
        if (rest == 1) {
            all.push_back(cur);
            return;
        }
        for (int f = min_factor; f <= rest; ++f) {
            if (rest % f != 0) continue;
            cur.push_back(f);
            rec(rest / f, f);
            cur.pop_back();
        }
    };
    rec(p, 2);
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return all;
}

/// t^2 - t + k - 1 for k(2t-1)!! <= p < (k+1)(2t-1)!!, 1 <= k <= 2t.
inline int conjectured_upper_bound(int p) {
    if (p < 1) throw ContractError("conjectured_upper_bound requires p >= 1");
    long long df = 1;  // (2t-1)!!
    for (int t = 1;; ++t) {
        df = (t == 1) ? 1 : df * (2 * t - 1);
        for (int k = 1; k <= 2 * t; ++k)
            if (k * df <= p && p < (k + 1) * df) return t * t - t + k - 1;
    }
}

// ---------------------------------------------------------------------------
// Characterization.

struct SpireConfig {
    std::vector<int> factors;
    std::vector<std::string> chambers;  // canonical graph6 in spire order (bottom first)
    int excess = 0;
    int n = 0;
};

struct ChamberReport {
    std::string form;
    Count phi = 0;
    int n = 0;
    int excess = 0;
    int max_barrier = 0;
    bool anywhere = false;  // relative barrier 1/2: may sit at any level
};

struct SpireReport {
    int p = 0;
    int c_p = 0;
    int n_p = 0;
    std::vector<ChamberReport> chambers;            // chambers used by optimal spires
    std::vector<std::vector<int>> factorizations_used;
    std::vector<SpireConfig> optimal;               // one entry per optimal chamber combination
};

class MissingDivisors : public std::runtime_error {
public:
    explicit MissingDivisors(const std::vector<int>& qs) : std::runtime_error(message(qs)), missing(qs) {}
    std::vector<int> missing;

private:
    static std::string message(const std::vector<int>& qs) {
        std::string s = "missing elementary results for q =";
        for (int q : qs) s += " " + std::to_string(q);
        return s;
    }
};

/// Best spires over factorizations of p using the extremal elementary graphs
/// of each factor. `only_proper` skips the single-factor {p}.
inline SpireReport characterize_extremal(int p, const std::map<int, ExtremalRecord>& db, bool only_proper = false) {
    SpireReport rep;
    rep.p = p;
    if (p == 1) {
        rep.c_p = 0;
        rep.n_p = 2;
        rep.chambers.push_back({k2_form(), 1, 2, 0, 1, true});
        rep.factorizations_used = {{1}};
        rep.optimal.push_back({{1}, {k2_form()}, 0, 2});
        return rep;
    }
    std::vector<int> missing;
    for (int q = 2; q <= p; ++q)
        if (p % q == 0 && !(only_proper && q == p) && !db.count(q)) missing.push_back(q);
    if (!missing.empty()) throw MissingDivisors(missing);

    std::map<int, std::vector<Chamber>> pool;
    std::map<std::string, Chamber> by_form;
    for (int q = 2; q <= p; ++q) {
        if (p % q != 0 || (only_proper && q == p)) continue;
        for (const auto& form : db.at(q).graphs) {
            auto it = by_form.find(form);
            if (it == by_form.end()) it = by_form.emplace(form, make_chamber(from_graph6(form))).first;
            pool[q].push_back(it->second);
        }
    }
    std::optional<int> best;
    struct Candidate {
        SpireConfig cfg;
        std::vector<Chamber> order;
    };
    std::vector<Candidate> cands;
    for (const auto& fac : factorizations(p)) {
        if (only_proper && fac.size() < 2) continue;
        bool usable = std::all_of(fac.begin(), fac.end(), [&](int q) { return !pool[q].empty(); });
        if (!usable) continue;
        std::vector<std::size_t> pick(fac.size(), 0);
        while (true) {
            // Multisets only: equal factors take nondecreasing picks.
            bool canonical = true;
            for (std::size_t i = 1; i < fac.size(); ++i)
                if (fac[i] == fac[i - 1] && pick[i] < pick[i - 1]) canonical = false;
            if (canonical) {
                std::vector<std::pair<Chamber, std::string>> chosen;
                for (std::size_t i = 0; i < fac.size(); ++i) {
                    const Chamber& ch = pool[fac[i]][pick[i]];
                    chosen.emplace_back(ch, to_graph6(ch.g));
                }
                std::stable_sort(chosen.begin(), chosen.end(), [](const auto& a, const auto& b) {
                    bool ab = a.first.rel_at_least(b.first), ba = b.first.rel_at_least(a.first);
                    if (ab != ba) return ab;
                    return a.second < b.second;
                });
                Candidate cand;
                cand.cfg.factors = fac;
                for (auto& [ch, form] : chosen) {
                    cand.order.push_back(ch);
                    cand.cfg.chambers.push_back(form);
                    cand.cfg.n += ch.order();
                }
                cand.cfg.excess = spire_excess(cand.order);
                if (!best || cand.cfg.excess > *best) best = cand.cfg.excess;
                cands.push_back(std::move(cand));
            }
            std::size_t i = 0;
            while (i < fac.size() && ++pick[i] == pool[fac[i]].size()) pick[i++] = 0;
            if (i == fac.size()) break;
        }
    }
    if (!best) return rep;
    rep.c_p = *best;
    rep.n_p = INT_MAX;
    std::set<std::string> seen_chambers;
    std::set<std::vector<int>> used;
    for (const auto& cand : cands) {
        if (cand.cfg.excess != *best) continue;
        rep.n_p = std::min(rep.n_p, cand.cfg.n);
        rep.optimal.push_back(cand.cfg);
        used.insert(cand.cfg.factors);
        for (std::size_t i = 0; i < cand.order.size(); ++i) {
            const auto& ch = cand.order[i];
            const auto& form = cand.cfg.chambers[i];
            if (!seen_chambers.insert(form).second) continue;
            rep.chambers.push_back({form, ch.phi, ch.order(), excess(ch.g).value, ch.barrier_size(), ch.half_barrier()});
        }
    }
    rep.factorizations_used.assign(used.begin(), used.end());
    return rep;
}

// ---------------------------------------------------------------------------
// Table of constants.

struct TableRow {
    int p = 0;
    int c_p = 0;
    int n_p = 0;
    int N_p = 0;
    int count = 0;                   // extremal elementary graphs at c_p
    std::optional<int> elementary_c;  // best elementary excess found
    std::vector<int> thresholds;     // thresholds tried, in order
    double seconds = 0;
};

/// Solves p = 1, 2, ... in order. The threshold for p starts one above the
/// best constant of smaller p and walks down to the spire lower bound.
class TableSolver {
public:
    explicit TableSolver(bool prune = true, const std::atomic<bool>* stop = nullptr) : prune_(prune), stop_(stop) {}

    const std::map<int, ExtremalRecord>& records() const { return db_; }
    const std::map<int, TableRow>& rows() const { return rows_; }
    const std::map<int, SpireReport>& reports() const { return reports_; }
    int solved_through() const { return static_cast<int>(rows_.size()); }

    /// Lower bound from spires over proper factorizations, at least 1.
    int spire_lower_bound(int p) const {
        auto rep = characterize_extremal(p, db_, true);
        return rep.optimal.empty() ? 1 : std::max(1, rep.c_p);
    }

    /// Upper bound max_{q<p} c_q + 1.
    int upper_bound(int p) const {
        int best = 0;
        for (const auto& [q, row] : rows_)
            if (q < p) best = std::max(best, row.c_p);
        return best + 1;
    }

    const TableRow& solve(int p, const std::function<void(const std::string&)>& log = {}) {
        if (rows_.count(p)) return rows_.at(p);
        if (p != solved_through() + 1) throw ContractError("TableSolver::solve must proceed in order of p");
        auto start = std::chrono::steady_clock::now();
        TableRow row;
        row.p = p;
        if (p == 1) {
            db_[1] = generate(1, 0).record;
        } else {
            int hi = upper_bound(p), lo = spire_lower_bound(p);
            ExtremalRecord rec;
            rec.p = p;
            rec.c_threshold = lo;
            for (int c = hi; c >= lo; --c) {
                if (16LL * p - 8LL * c - 23 < 0) continue;  // no elementary graph is that dense
                row.thresholds.push_back(c);
                if (log) log("p=" + std::to_string(p) + " threshold " + std::to_string(c));
                SearchHooks hooks;
                hooks.stop = stop_;
                auto res = generate(p, c, prune_, hooks);
                if (!res.record.graphs.empty()) {
                    rec = res.record;
                    break;
                }
                rec.size_bound = res.record.size_bound;
                rec.c_threshold = c;
            }
            db_[p] = rec;
        }
        const auto& rec = db_[p];
        row.elementary_c = rec.c_found;
        auto rep = characterize_extremal(p, db_);
        row.c_p = rep.c_p;
        row.n_p = rep.n_p;
        row.N_p = p >= 2 ? size_bound(p, row.c_p) : 2;
        row.count = (rec.c_found && *rec.c_found == row.c_p) ? static_cast<int>(rec.graphs.size()) : 0;
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        reports_[p] = rep;
        return rows_[p] = row;
    }

private:
    bool prune_;
    const std::atomic<bool>* stop_;
    std::map<int, ExtremalRecord> db_;
    std::map<int, TableRow> rows_;
    std::map<int, SpireReport> reports_;
};

}  // namespace pext
