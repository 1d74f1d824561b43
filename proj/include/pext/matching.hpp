#pragma once

// Perfect-matching counts and the extendable/free edge split.

#include <array>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "pext/ears.hpp"
#include "pext/graph.hpp"

namespace pext {

using Count = std::uint64_t;

namespace detail {

// Exact count with memo on the set of unmatched vertices.
class MatchingCounter {
public:
    explicit MatchingCounter(const Graph& g) : g_(g) {}

    Count count(VertexSet rem) {
        if (rem == 0) return 1;
        if (popcount(rem) & 1) return 0;
        if (auto it = memo_.find(rem); it != memo_.end()) return it->second;
        Vertex v = lowest(rem);
        VertexSet rest = rem & ~bit(v);
        Count total = 0;
        for_each_vertex(g_.neighbors(v) & rest, [&](Vertex w) { total += count(rest & ~bit(w)); });
        memo_.emplace(rem, total);
        return total;
    }

private:
    const Graph& g_;
    std::unordered_map<VertexSet, Count> memo_;
};

// Count without memo, stopping once `cap` is reached.
inline Count count_capped(const Graph& g, VertexSet rem, Count cap) {
    if (rem == 0) return 1;
    Vertex v = lowest(rem);
    VertexSet rest = rem & ~bit(v);
    VertexSet nb = g.neighbors(v) & rest;
    Count total = 0;
    while (nb != 0 && total < cap) {
        Vertex w = lowest(nb);
        nb &= nb - 1;
        total += count_capped(g, rest & ~bit(w), cap - total);
    }
    return total;
}

// Enumerates perfect matchings of g[rem]; `used` accumulates, per vertex, the
// partners seen in any matching. Stops after `budget` matchings.
inline void collect_partners(const Graph& g, VertexSet rem, std::array<VertexSet, kMaxVertices>& used,
                             std::array<Vertex, kMaxVertices>& mate, Count& found, Count budget) {
    if (found >= budget) return;
    if (rem == 0) {
        for (Vertex v = 0; v < g.order(); ++v) used[v] |= bit(mate[v]);
        ++found;
        return;
    }
    Vertex v = lowest(rem);
    VertexSet rest = rem & ~bit(v);
    for_each_vertex(g.neighbors(v) & rest, [&](Vertex w) {
        mate[v] = w;
        mate[w] = v;
        collect_partners(g, rest & ~bit(w), used, mate, found, budget);
    });
}

}  // namespace detail

/// Exact number of perfect matchings of g (0 for odd order).
inline Count count_perfect_matchings(const Graph& g) {
    if (g.order() % 2 != 0) return 0;
    detail::MatchingCounter counter(g);
    return counter.count(g.vertices());
}

/// Perfect matchings of g restricted to `within`, saturating at `cap`.
inline Count count_perfect_matchings_capped(const Graph& g, VertexSet within, Count cap) {
    if (popcount(within) & 1) return 0;
    return detail::count_capped(g, within, cap);
}

inline Count count_perfect_matchings_capped(const Graph& g, Count cap) {
    return count_perfect_matchings_capped(g, g.vertices(), cap);
}

inline bool is_matchable(const Graph& g, VertexSet within) {
    return count_perfect_matchings_capped(g, within, 1) >= 1;
}

inline bool is_matchable(const Graph& g) { return is_matchable(g, g.vertices()); }

/// Edge sets are stored as symmetric adjacency rows.
struct MatchingProfile {
    Count phi = 0;
    std::array<VertexSet, kMaxVertices> extendable{};
    std::array<VertexSet, kMaxVertices> free{};
    int n = 0;

    bool has_free_edges() const {
        for (int v = 0; v < n; ++v)
            if (free[v]) return true;
        return false;
    }
    int free_edge_count() const {
        int twice = 0;
        for (int v = 0; v < n; ++v) twice += popcount(free[v]);
        return twice / 2;
    }
    Graph extendable_subgraph() const {
        Graph h(n);
        for (Vertex v = 0; v < n; ++v)
            for_each_vertex(extendable[v] & ~(bit(v + 1) - 1), [&](Vertex w) { h.add_edge(v, w); });
        return h;
    }
    Graph free_subgraph() const {
        Graph h(n);
        for (Vertex v = 0; v < n; ++v)
            for_each_vertex(free[v] & ~(bit(v + 1) - 1), [&](Vertex w) { h.add_edge(v, w); });
        return h;
    }
};

/// Matchings enumerated before switching to per-edge matchability tests.
inline constexpr Count kEnumerationBudget = Count{1} << 14;

/// Classifies every edge as extendable or free. `phi` is exact.
inline MatchingProfile classify_edges(const Graph& g) {
    MatchingProfile prof;
    prof.n = g.order();
    if (g.order() % 2 != 0) throw ContractError("classify_edges: no perfect matching (odd order)");
    std::array<VertexSet, kMaxVertices> used{};
    std::array<Vertex, kMaxVertices> mate{};
    Count found = 0;
    detail::collect_partners(g, g.vertices(), used, mate, found, kEnumerationBudget);
    if (found == 0) throw ContractError("classify_edges: graph has no perfect matching");
    if (found < kEnumerationBudget) {
        prof.phi = found;
        prof.extendable = used;
    } else {
        prof.phi = count_perfect_matchings(g);
        for (auto [u, v] : g.edges()) {
            if (is_matchable(g, g.vertices() & ~bit(u) & ~bit(v))) {
                prof.extendable[u] |= bit(v);
                prof.extendable[v] |= bit(u);
            }
        }
    }
    for (Vertex v = 0; v < g.order(); ++v) prof.free[v] = g.neighbors(v) & ~prof.extendable[v];
    return prof;
}

/// Profile for the search: returns nullopt when phi exceeds `cap` or is zero.
inline std::optional<MatchingProfile> classify_edges_capped(const Graph& g, Count cap) {
    if (g.order() % 2 != 0) return std::nullopt;
    MatchingProfile prof;
    prof.n = g.order();
    std::array<VertexSet, kMaxVertices> used{};
    std::array<Vertex, kMaxVertices> mate{};
    Count found = 0;
    detail::collect_partners(g, g.vertices(), used, mate, found, cap + 1);
    if (found == 0 || found > cap) return std::nullopt;
    prof.phi = found;
    prof.extendable = used;
    for (Vertex v = 0; v < g.order(); ++v) prof.free[v] = g.neighbors(v) & ~prof.extendable[v];
    return prof;
}

inline bool is_one_extendable(const Graph& g, const MatchingProfile& prof) {
    return prof.phi >= 1 && !prof.has_free_edges() && is_connected(g);
}

inline bool is_one_extendable(const Graph& g) {
    if (g.order() == 0 || g.order() % 2 != 0 || !is_connected(g) || !is_matchable(g)) return false;
    return is_one_extendable(g, classify_edges(g));
}

/// The single ear carrying every free edge, if one exists.
inline std::optional<Ear> free_ear(const Graph& g, const MatchingProfile& prof) {
    Vertex s = -1;
    for (Vertex v = 0; v < g.order() && s < 0; ++v)
        if (prof.free[v]) s = v;
    if (s < 0) return std::nullopt;
    Vertex t = lowest(prof.free[s]);
    Ear e = ear_through_edge(g, s, t);
    auto p = e.path();
    std::array<VertexSet, kMaxVertices> on_ear{};
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        on_ear[p[i]] |= bit(p[i + 1]);
        on_ear[p[i + 1]] |= bit(p[i]);
    }
    for (Vertex v = 0; v < g.order(); ++v)
        if (prof.free[v] & ~on_ear[v]) return std::nullopt;
    return e;
}

/// Free edges present and all on one ear. Does not check 2-connectivity.
inline bool is_almost_one_extendable(const Graph& g, const MatchingProfile& prof) {
    return prof.phi >= 1 && prof.has_free_edges() && free_ear(g, prof).has_value();
}

inline bool is_almost_one_extendable(const Graph& g) {
    if (g.order() < 4 || g.order() % 2 != 0 || !is_two_connected(g) || !is_matchable(g)) return false;
    return is_almost_one_extendable(g, classify_edges(g));
}

inline bool is_elementary(const Graph& g, const MatchingProfile& prof) {
    if (prof.phi == 0) return false;
    Graph ext = prof.extendable_subgraph();
    for (Vertex v = 0; v < g.order(); ++v)
        if (ext.degree(v) == 0) return false;
    return is_connected(ext);
}

inline bool is_elementary(const Graph& g) {
    if (g.order() == 0 || g.order() % 2 != 0 || !is_matchable(g)) return false;
    return is_elementary(g, classify_edges(g));
}

}  // namespace pext
