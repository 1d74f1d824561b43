#pragma once

// Ears of 2-connected graphs: listing, augmentation, deletion.

#include <algorithm>
#include <optional>
#include <vector>

#include "pext/graph.hpp"

namespace pext {

/// A maximal path whose internal vertices have degree 2. For a cycle host the
/// whole graph is one ear: `cycle` is set, both ends equal vertex 0 and
/// `internal` lists every vertex.
struct Ear {
    Vertex a = 0;
    Vertex b = 0;
    std::vector<Vertex> internal;  // in path order from a to b
    bool cycle = false;

    int order() const noexcept { return static_cast<int>(internal.size()); }
    int length() const noexcept { return order() + 1; }
    bool trivial() const noexcept { return !cycle && internal.empty(); }
    VertexSet internal_set() const {
        VertexSet s = 0;
        for (Vertex v : internal) s |= bit(v);
        return s;
    }
    /// Full vertex sequence a, internal..., b.
    std::vector<Vertex> path() const {
        std::vector<Vertex> p;
        p.reserve(internal.size() + 2);
        p.push_back(a);
        p.insert(p.end(), internal.begin(), internal.end());
        p.push_back(b);
        return p;
    }
    friend bool operator==(const Ear&, const Ear&) = default;
};

/// Attachment request for an ear augmentation.
struct EarSpec {
    Vertex u = 0;
    Vertex v = 0;
    int order = 0;
    friend bool operator==(const EarSpec&, const EarSpec&) = default;
};

namespace detail {

// Walks from branch vertex `from` through neighbour `first` until the next
// vertex of degree other than 2.
inline Ear walk_ear(const Graph& g, Vertex from, Vertex first) {
    Ear ear;
    ear.a = from;
    Vertex prev = from, cur = first;
    while (g.degree(cur) == 2 && cur != from) {
        ear.internal.push_back(cur);
        Vertex next = lowest(g.neighbors(cur) & ~bit(prev));
        prev = cur;
        cur = next;
    }
    ear.b = cur;
    return ear;
}

inline Ear reversed(Ear e) {
    std::swap(e.a, e.b);
    std::reverse(e.internal.begin(), e.internal.end());
    return e;
}

}  // namespace detail

/// Ears of g without the 2-connectivity check. Each ear is reported once,
/// oriented from its smaller endpoint; ties between parallel ears are broken by
/// the first internal vertex. Order: by (a, first step) ascending.
inline std::vector<Ear> ears_of(const Graph& g) {
    std::vector<Ear> out;
    VertexSet branch = 0;
    for (Vertex v = 0; v < g.order(); ++v)
        if (g.degree(v) >= 3) branch |= bit(v);
    if (branch == 0) {
        Ear e;
        e.cycle = true;
        if (g.order() > 0) {
            Vertex prev = -1, cur = 0;
            for (int i = 0; i < g.order(); ++i) {
                e.internal.push_back(cur);
                VertexSet nb = g.neighbors(cur);
                if (prev >= 0) nb &= ~bit(prev);
                prev = cur;
                cur = lowest(nb);
            }
        }
        out.push_back(std::move(e));
        return out;
    }
    for_each_vertex(branch, [&](Vertex u) {
        for_each_vertex(g.neighbors(u), [&](Vertex w) {
            Ear e = detail::walk_ear(g, u, w);
            bool keep = u < e.b || (u == e.b && !e.internal.empty() && e.internal.front() < e.internal.back());
            if (keep) out.push_back(std::move(e));
        });
    });
    return out;
}

/// Complete ear list of a 2-connected graph.
inline std::vector<Ear> list_ears(const Graph& g) {
    if (g.order() < 3 || !is_two_connected(g)) throw ContractError("list_ears requires a 2-connected graph");
    return ears_of(g);
}

/// The ear of g containing edge {s,t}.
inline Ear ear_through_edge(const Graph& g, Vertex s, Vertex t) {
    if (!g.adjacent(s, t)) throw ContractError("ear_through_edge: not an edge");
    Vertex start = s, toward = t;
    // Walk backwards from s until a branch vertex (or full loop on a cycle).
    Vertex prev = t, cur = s;
    int steps = 0;
    while (g.degree(cur) == 2) {
        Vertex next = lowest(g.neighbors(cur) & ~bit(prev));
        prev = cur;
        cur = next;
        if (++steps > g.order()) {
            std::vector<Ear> all = ears_of(g);
            return all.front();
        }
    }
    start = cur;
    toward = prev;
    Ear e = detail::walk_ear(g, start, toward);
    if (e.a > e.b || (e.a == e.b && !e.internal.empty() && e.internal.front() > e.internal.back()))
        e = detail::reversed(std::move(e));
    return e;
}

/// Adds `spec.order` fresh vertices n..n+order-1 forming a u-v path.
inline Graph augment(const Graph& g, const EarSpec& spec) {
    if (spec.u == spec.v) throw ContractError("ear endpoints must differ");
    if (spec.order < 0) throw ContractError("ear order must be nonnegative");
    if (g.order() + spec.order > kMaxVertices) throw ContractError("ear augmentation exceeds vertex cap");
    if (spec.order == 0 && g.adjacent(spec.u, spec.v)) throw ContractError("trivial ear on an existing edge");
    Graph h = g;
    Vertex prev = spec.u;
    for (int i = 0; i < spec.order; ++i) {
        Vertex w = h.add_vertex();
        h.add_edge(prev, w);
        prev = w;
    }
    h.add_edge(prev, spec.v);
    return h;
}

/// True iff `e` describes an ear of g: internal vertices of degree 2 along a
/// path, endpoints of degree at least 3.
inline bool is_ear_of(const Graph& g, const Ear& e) {
    if (e.cycle) return ears_of(g).front().cycle && e.order() == g.order();
    auto p = e.path();
    for (Vertex v : p)
        if (v < 0 || v >= g.order()) return false;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (!g.adjacent(p[i], p[i + 1])) return false;
    for (Vertex v : e.internal)
        if (g.degree(v) != 2) return false;
    return g.degree(e.a) >= 3 && g.degree(e.b) >= 3;
}

/// Removes the ear's internal vertices (or its edge when trivial) and
/// compacts the remaining vertices preserving relative order.
inline Graph delete_ear(const Graph& g, const Ear& e) {
    if (e.cycle) throw ContractError("cannot delete the ear of a cycle");
    if (!is_ear_of(g, e)) throw ContractError("delete_ear: not an ear of the graph");
    if (e.trivial()) {
        Graph h = g;
        h.remove_edge(e.a, e.b);
        return h;
    }
    return g.induced(g.vertices() & ~e.internal_set());
}

}  // namespace pext
