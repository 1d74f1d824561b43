#pragma once

// Exhaustive reference implementations for small graphs. Nothing here calls
// the fast paths; only the Graph container is shared.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pext/graph.hpp"

namespace pext::oracle {

using Matrix = std::vector<std::vector<char>>;

inline Matrix matrix_of(const Graph& g) {
    int n = g.order();
    Matrix m(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i][j] = g.adjacent(i, j) ? 1 : 0;
    return m;
}

// ---------------------------------------------------------------------------
// Canonical form: color refinement, then exhaustive placement class by class,
// keeping the lexicographically greatest upper triangle (column order).

inline std::vector<int> refine_colors(const Matrix& m) {
    int n = static_cast<int>(m.size());
    std::vector<int> color(n, 0);
    for (int round = 0; round <= n; ++round) {
        std::vector<std::pair<std::vector<int>, int>> sig(n);
        for (int v = 0; v < n; ++v) {
            std::vector<int> s{color[v]};
            std::vector<int> nb;
            for (int w = 0; w < n; ++w)
                if (m[v][w]) nb.push_back(color[w]);
            std::sort(nb.begin(), nb.end());
            s.insert(s.end(), nb.begin(), nb.end());
            sig[v] = {s, v};
        }
        std::vector<std::vector<int>> keys;
        for (auto& [s, v] : sig) keys.push_back(s);
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        std::vector<int> next(n);
        for (int v = 0; v < n; ++v)
            next[v] = static_cast<int>(std::lower_bound(keys.begin(), keys.end(), sig[v].first) - keys.begin());
        if (next == color) break;
        color = next;
    }
    return color;
}

inline std::string brute_canonical_form(const Graph& g) {
    Matrix m = matrix_of(g);
    int n = g.order();
    std::vector<int> color = refine_colors(m);
    std::vector<int> slot_color(n);
    {
        std::vector<int> sorted = color;
        std::sort(sorted.begin(), sorted.end());
        slot_color = sorted;
    }
    std::vector<int> placed;
    std::vector<char> taken(n, 0);
    std::string best, cur;
    bool have_best = false;
    auto rec = [&](auto& self, int pos, bool greater) -> void {
        if (pos == n) {
            if (!have_best || cur > best) {
                best = cur;
                have_best = true;
            }
            return;
        }
        for (int v = 0; v < n; ++v) {
            if (taken[v] || color[v] != slot_color[pos]) continue;
            std::size_t mark = cur.size();
            for (int i = 0; i < pos; ++i) cur.push_back(m[placed[i]][v] ? '1' : '0');
            bool g2 = greater;
            bool prune = false;
            if (have_best && !greater) {
                int c = cur.compare(0, cur.size(), best, 0, cur.size());
                if (c < 0) prune = true;
                if (c > 0) g2 = true;
            }
            if (!prune) {
                taken[v] = 1;
                placed.push_back(v);
                self(self, pos + 1, g2);
                placed.pop_back();
                taken[v] = 0;
            }
            cur.resize(mark);
        }
    };
    rec(rec, 0, false);
    return std::to_string(n) + ":" + best;
}

inline bool brute_isomorphic(const Graph& a, const Graph& b) {
    return a.order() == b.order() && a.size() == b.size() && brute_canonical_form(a) == brute_canonical_form(b);
}

/// One representative per isomorphism class on n vertices, by vertex addition.
inline std::vector<Graph> all_graphs(int n) {
    std::vector<Graph> level{Graph(0)};
    for (int k = 1; k <= n; ++k) {
        std::map<std::string, Graph> next;
        for (const auto& g : level) {
            for (std::uint32_t s = 0; s < (1u << (k - 1)); ++s) {
                Graph h(k);
                for (auto [u, v] : g.edges()) h.add_edge(u, v);
                for (int u = 0; u < k - 1; ++u)
                    if (s >> u & 1) h.add_edge(u, k - 1);
                next.emplace(brute_canonical_form(h), std::move(h));
            }
        }
        level.clear();
        for (auto& [form, g] : next) level.push_back(std::move(g));
    }
    return level;
}

// ---------------------------------------------------------------------------
// Matchings, by always matching the highest remaining vertex.

inline void for_each_matching(const Matrix& m, std::vector<int>& mate, int remaining,
                              const std::function<void(const std::vector<int>&)>& f) {
    int n = static_cast<int>(m.size());
    int v = -1;
    for (int u = n - 1; u >= 0; --u)
        if (mate[u] < 0) {
            v = u;
            break;
        }
    if (v < 0) {
        f(mate);
        return;
    }
    for (int w = v - 1; w >= 0; --w) {
        if (mate[w] >= 0 || !m[v][w]) continue;
        mate[v] = w;
        mate[w] = v;
        for_each_matching(m, mate, remaining - 2, f);
        mate[v] = mate[w] = -1;
    }
}

inline std::vector<std::vector<int>> brute_matching_list(const Graph& g) {
    std::vector<std::vector<int>> out;
    if (g.order() % 2) return out;
    Matrix m = matrix_of(g);
    std::vector<int> mate(g.order(), -1);
    for_each_matching(m, mate, g.order(), [&](const std::vector<int>& mt) { out.push_back(mt); });
    return out;
}

inline std::uint64_t brute_matchings(const Graph& g) { return brute_matching_list(g).size(); }

/// Connected pieces of g restricted to `keep`, via its own union-find.
inline std::vector<std::vector<int>> brute_pieces(const Graph& g, const std::vector<char>& keep) {
    int n = g.order();
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (keep[u] && keep[v] && g.adjacent(u, v)) parent[find(u)] = find(v);
    std::map<int, std::vector<int>> by_root;
    for (int v = 0; v < n; ++v)
        if (keep[v]) by_root[find(v)].push_back(v);
    std::vector<std::vector<int>> out;
    for (auto& [r, vs] : by_root) out.push_back(vs);
    return out;
}

/// Elementary: some perfect matching, and the edges lying in perfect
/// matchings form a connected spanning subgraph.
inline bool brute_is_elementary(const Graph& g) {
    int n = g.order();
    auto ms = brute_matching_list(g);
    if (ms.empty()) return false;
    Graph allowed(n);
    for (const auto& mt : ms)
        for (int v = 0; v < n; ++v)
            if (mt[v] > v) allowed.add_edge(v, mt[v]);
    std::vector<char> all(n, 1);
    return brute_pieces(allowed, all).size() == 1;
}

/// Free subgraph: edges of g lying in no perfect matching.
inline Graph brute_free_subgraph(const Graph& g) {
    int n = g.order();
    Graph used(n);
    for (const auto& mt : brute_matching_list(g))
        for (int v = 0; v < n; ++v)
            if (mt[v] > v) used.add_edge(v, mt[v]);
    Graph free(n);
    for (auto [u, v] : g.edges())
        if (!used.adjacent(u, v)) free.add_edge(u, v);
    return free;
}

// ---------------------------------------------------------------------------
// Barriers and cover sets.

inline int odd_pieces_without(const Graph& g, const std::vector<int>& removed) {
    std::vector<char> keep(g.order(), 1);
    for (int v : removed) keep[v] = 0;
    int odd = 0;
    for (const auto& piece : brute_pieces(g, keep)) odd += static_cast<int>(piece.size() % 2);
    return odd;
}

inline std::vector<int> members(std::uint32_t mask, int n) {
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
        if (mask >> v & 1) out.push_back(v);
    return out;
}

/// All nonempty vertex sets X with o(G - X) = |X|, as ascending masks.
inline std::vector<std::uint32_t> brute_barriers(const Graph& g) {
    int n = g.order();
    std::vector<std::uint32_t> out;
    for (std::uint32_t s = 1; s < (1u << n); ++s) {
        auto xs = members(s, n);
        if (odd_pieces_without(g, xs) == static_cast<int>(xs.size())) out.push_back(s);
    }
    return out;
}

inline bool brute_conflict(const Graph& g, std::uint32_t a, std::uint32_t b) {
    if (a & b) return true;
    int n = g.order();
    auto spans = [&](std::uint32_t x, std::uint32_t y) {
        std::vector<char> keep(n, 1);
        for (int v : members(y, n)) keep[v] = 0;
        int hit = 0;
        for (const auto& piece : brute_pieces(g, keep)) {
            bool touches = false;
            for (int v : piece)
                if (x >> v & 1) touches = true;
            hit += touches ? 1 : 0;
        }
        return hit > 1;
    };
    return spans(a, b) || spans(b, a);
}

/// Every partition of V(g) into pairwise non-conflicting barriers.
inline std::vector<std::vector<std::uint32_t>> brute_cover_sets(const Graph& g) {
    int n = g.order();
    auto bars = brute_barriers(g);
    std::set<std::uint32_t> is_bar(bars.begin(), bars.end());
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> parts;
    auto rec = [&](auto& self, std::uint32_t left) -> void {
        if (left == 0) {
            out.push_back(parts);
            return;
        }
        int v = 0;
        while (!(left >> v & 1)) ++v;
        std::uint32_t rest = left & ~(1u << v);
        // Blocks containing v drawn from the remaining vertices.
        for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
            std::uint32_t block = sub | (1u << v);
            if (is_bar.count(block)) {
                bool ok = true;
                for (auto q : parts)
                    if (brute_conflict(g, q, block)) ok = false;
                if (ok) {
                    parts.push_back(block);
                    self(self, left & ~block);
                    parts.pop_back();
                }
            }
            if (sub == 0) break;
        }
    };
    rec(rec, (n == 32) ? ~0u : ((1u << n) - 1));
    for (auto& cs : out) std::sort(cs.begin(), cs.end());
    std::sort(out.begin(), out.end());
    return out;
}

inline Graph brute_fill(const Graph& g, const std::vector<std::uint32_t>& parts) {
    Graph h = g;
    for (auto b : parts) {
        auto xs = members(b, g.order());
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = i + 1; j < xs.size(); ++j)
                if (!h.adjacent(xs[i], xs[j])) h.add_edge(xs[i], xs[j]);
    }
    return h;
}

inline int doubled_excess(const Graph& g) {
    int n = g.order();
    return 4 * g.size() - n * n;  // 4c
}

// ---------------------------------------------------------------------------
// Extremal search by exhaustion.

struct BruteExtremal {
    std::optional<int> excess;         // best excess over elementary graphs with Phi = p
    std::set<std::string> witnesses;   // oracle canonical forms achieving it
};

class BruteCatalog {
public:
    /// Elementary graphs of even order up to n_cap, grouped by matching count.
    explicit BruteCatalog(int n_cap) : n_cap_(n_cap) {
        for (int n = 2; n <= n_cap; n += 2)
            for (auto& g : all_graphs(n)) {
                std::uint64_t phi = brute_matchings(g);
                if (phi == 0 || !brute_is_elementary(g)) continue;
                by_phi_[phi].push_back(std::move(g));
            }
    }

    int n_cap() const { return n_cap_; }

    const std::vector<Graph>& elementary(std::uint64_t p) const {
        static const std::vector<Graph> none;
        auto it = by_phi_.find(p);
        return it == by_phi_.end() ? none : it->second;
    }

    BruteExtremal extremal(std::uint64_t p) const {
        BruteExtremal out;
        for (const auto& g : elementary(p)) {
            int c4 = doubled_excess(g);
            if (c4 % 4) continue;
            int c = c4 / 4;
            if (!out.excess || c > *out.excess) {
                out.excess = c;
                out.witnesses.clear();
            }
            if (c == *out.excess) out.witnesses.insert(brute_canonical_form(g));
        }
        return out;
    }

    /// Elementary graphs with Phi = p, order <= max_n, excess >= c, whose free
    /// subgraph is a disjoint union of cliques each of which is a barrier.
    std::set<std::string> clique_fills(std::uint64_t p, int c, int max_n) const {
        std::set<std::string> out;
        for (const auto& g : elementary(p)) {
            if (g.order() > max_n || doubled_excess(g) < 4 * c) continue;
            Graph fr = brute_free_subgraph(g);
            std::vector<char> all(g.order(), 1);
            bool ok = true;
            for (const auto& piece : brute_pieces(fr, all)) {
                for (std::size_t i = 0; i < piece.size() && ok; ++i)
                    for (std::size_t j = i + 1; j < piece.size() && ok; ++j)
                        if (!fr.adjacent(piece[i], piece[j])) ok = false;
                if (!ok) break;
                if (piece.size() > 1 && odd_pieces_without(g, piece) != static_cast<int>(piece.size())) ok = false;
            }
            if (ok) out.insert(brute_canonical_form(g));
        }
        return out;
    }

private:
    int n_cap_;
    std::map<std::uint64_t, std::vector<Graph>> by_phi_;
};

}  // namespace pext::oracle
