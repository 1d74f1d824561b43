#pragma once

/// \file graph.hpp
/// Small simple undirected graphs over at most 32 vertices, stored as one
/// 32-bit adjacency row per vertex, plus graph6 interchange.

#include <array>
#include <bit>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pext {

using Vertex = int;
using VertexSet = std::uint32_t;

inline constexpr int kMaxVertices = 32;

constexpr VertexSet bit(Vertex v) { return VertexSet{1} << v; }
constexpr int popcount(VertexSet s) { return std::popcount(s); }
constexpr Vertex lowest(VertexSet s) { return std::countr_zero(s); }
constexpr VertexSet all_vertices(int n) { return n >= 32 ? ~VertexSet{0} : (bit(n) - 1); }

/// Calls f(v) for every member of s, lowest first.
template <typename F>
constexpr void for_each_vertex(VertexSet s, F&& f) {
    while (s != 0) {
        f(lowest(s));
        s &= s - 1;
    }
}

/// Thrown when a precondition stated on an operation is violated by the caller.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed graph6 input; offset is the byte index where decoding failed.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class Graph {
public:
    Graph() = default;
    explicit Graph(int n) : n_(n) {
        if (n < 0 || n > kMaxVertices) throw ContractError("vertex count out of range: " + std::to_string(n));
    }
    Graph(int n, std::initializer_list<std::pair<Vertex, Vertex>> edges) : Graph(n) {
        for (auto [u, v] : edges) add_edge(u, v);
    }

    int order() const noexcept { return n_; }
    int size() const noexcept { return e_; }
    VertexSet neighbors(Vertex v) const noexcept { return adj_[v]; }
    int degree(Vertex v) const noexcept { return popcount(adj_[v]); }
    bool adjacent(Vertex u, Vertex v) const noexcept { return (adj_[u] & bit(v)) != 0; }
    VertexSet vertices() const noexcept { return all_vertices(n_); }

    void add_edge(Vertex u, Vertex v) {
        check_pair(u, v);
        if (adjacent(u, v)) return;
        adj_[u] |= bit(v);
        adj_[v] |= bit(u);
        ++e_;
    }
    void remove_edge(Vertex u, Vertex v) {
        check_pair(u, v);
        if (!adjacent(u, v)) return;
        adj_[u] &= ~bit(v);
        adj_[v] &= ~bit(u);
        --e_;
    }

    /// Appends an isolated vertex and returns its index.
    Vertex add_vertex() {
        if (n_ >= kMaxVertices) throw ContractError("vertex cap of 32 exceeded");
        adj_[n_] = 0;
        return n_++;
    }

    /// Subgraph induced by `keep`, renumbered 0..k-1 preserving relative order.
    Graph induced(VertexSet keep) const {
        std::array<int, kMaxVertices> index{};
        int k = 0;
        for_each_vertex(keep & vertices(), [&](Vertex v) { index[v] = k++; });
        Graph h(k);
        for_each_vertex(keep & vertices(), [&](Vertex v) {
            for_each_vertex(adj_[v] & keep & ~(bit(v + 1) - 1), [&](Vertex w) { h.add_edge(index[v], index[w]); });
        });
        return h;
    }

    /// Relabels so that vertex v becomes perm[v].
    Graph relabeled(const std::vector<int>& perm) const {
        Graph h(n_);
        for (Vertex v = 0; v < n_; ++v)
            for_each_vertex(adj_[v] & ~(bit(v + 1) - 1), [&](Vertex w) { h.add_edge(perm[v], perm[w]); });
        return h;
    }

    std::vector<std::pair<Vertex, Vertex>> edges() const {
        std::vector<std::pair<Vertex, Vertex>> out;
        out.reserve(e_);
        for (Vertex v = 0; v < n_; ++v)
            for_each_vertex(adj_[v] & ~(bit(v + 1) - 1), [&](Vertex w) { out.emplace_back(v, w); });
        return out;
    }

    /// Debug check: symmetric, loop-free, and e matches the popcount total.
    bool valid() const {
        int twice = 0;
        for (Vertex v = 0; v < n_; ++v) {
            if (adj_[v] & bit(v)) return false;
            if (adj_[v] & ~vertices()) return false;
            for_each_vertex(adj_[v], [&](Vertex w) {
                if (!(adj_[w] & bit(v))) twice = -1 << 20;
            });
            twice += popcount(adj_[v]);
        }
        return twice == 2 * e_;
    }

    friend bool operator==(const Graph& a, const Graph& b) {
        if (a.n_ != b.n_ || a.e_ != b.e_) return false;
        for (int v = 0; v < a.n_; ++v)
            if (a.adj_[v] != b.adj_[v]) return false;
        return true;
    }

private:
    void check_pair(Vertex u, Vertex v) const {
        if (u < 0 || v < 0 || u >= n_ || v >= n_) throw ContractError("vertex index out of range");
        if (u == v) throw ContractError("self-loops are not allowed");
    }

    int n_ = 0;
    int e_ = 0;
    std::array<VertexSet, kMaxVertices> adj_{};
};

// ---------------------------------------------------------------------------
// Standard small graphs used throughout tests and as search roots.

inline Graph cycle_graph(int n) {
    Graph g(n);
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

inline Graph path_graph(int n) {
    Graph g(n);
    for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    return g;
}

inline Graph complete_graph(int n) {
    Graph g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
    return g;
}

inline Graph complete_bipartite(int a, int b) {
    Graph g(a + b);
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) g.add_edge(i, a + j);
    return g;
}

/// Disjoint union, second graph's vertices shifted by a.order().
inline Graph disjoint_union(const Graph& a, const Graph& b) {
    Graph g(a.order() + b.order());
    for (auto [u, v] : a.edges()) g.add_edge(u, v);
    for (auto [u, v] : b.edges()) g.add_edge(a.order() + u, a.order() + v);
    return g;
}

// ---------------------------------------------------------------------------
// Excess and connectivity predicates.

/// e(G) - n(G)^2/4 for an even-order graph.
struct Excess {
    int value = 0;
    friend auto operator<=>(const Excess&, const Excess&) = default;
};

inline Excess excess(const Graph& g) {
    if (g.order() % 2 != 0) throw ContractError("excess is defined for even vertex counts only");
    return Excess{g.size() - g.order() * g.order() / 4};
}

/// Connected components of g restricted to `within`, each as a vertex set.
/// Components are listed by increasing lowest vertex.
inline std::vector<VertexSet> components(const Graph& g, VertexSet within) {
    std::vector<VertexSet> out;
    VertexSet left = within & g.vertices();
    while (left != 0) {
        VertexSet comp = bit(lowest(left));
        VertexSet frontier = comp;
        while (frontier != 0) {
            Vertex v = lowest(frontier);
            frontier &= frontier - 1;
            VertexSet fresh = g.neighbors(v) & left & ~comp;
            comp |= fresh;
            frontier |= fresh;
        }
        out.push_back(comp);
        left &= ~comp;
    }
    return out;
}

/// The component of `within` containing v (v must lie in `within`).
inline VertexSet component_of(const Graph& g, Vertex v, VertexSet within) {
    VertexSet comp = bit(v);
    VertexSet frontier = comp;
    while (frontier != 0) {
        Vertex w = lowest(frontier);
        frontier &= frontier - 1;
        VertexSet fresh = g.neighbors(w) & within & ~comp;
        comp |= fresh;
        frontier |= fresh;
    }
    return comp;
}

inline bool is_connected(const Graph& g, VertexSet within) {
    within &= g.vertices();
    if (within == 0) return true;
    return component_of(g, lowest(within), within) == within;
}

inline bool is_connected(const Graph& g) { return is_connected(g, g.vertices()); }

/// Number of odd-order components of g - removed.
inline int odd_components(const Graph& g, VertexSet removed) {
    int odd = 0;
    for (VertexSet c : components(g, g.vertices() & ~removed)) odd += popcount(c) & 1;
    return odd;
}

inline bool is_two_connected(const Graph& g) {
    if (g.order() < 3) throw ContractError("2-connectivity needs at least 3 vertices");
    if (!is_connected(g)) return false;
    for (Vertex v = 0; v < g.order(); ++v)
        if (!is_connected(g, g.vertices() & ~bit(v))) return false;
    return true;
}

inline bool is_bipartite(const Graph& g, VertexSet* side = nullptr) {
    VertexSet color = 0, seen = 0;
    for (Vertex s = 0; s < g.order(); ++s) {
        if (seen & bit(s)) continue;
        seen |= bit(s);
        std::vector<Vertex> stack{s};
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            bool cv = (color & bit(v)) != 0;
            for_each_vertex(g.neighbors(v), [&](Vertex w) {
                if (!(seen & bit(w))) {
                    seen |= bit(w);
                    if (!cv) color |= bit(w);
                    stack.push_back(w);
                }
            });
        }
    }
    for (Vertex v = 0; v < g.order(); ++v) {
        bool cv = (color & bit(v)) != 0;
        VertexSet same = cv ? color : (g.vertices() & ~color);
        if (g.neighbors(v) & same) return false;
    }
    if (side) *side = g.vertices() & ~color;
    return true;
}

// ---------------------------------------------------------------------------
// graph6 (n <= 62 header form only, which covers the 32-vertex cap).

inline std::string to_graph6(const Graph& g) {
    const int n = g.order();
    std::string out;
    out.push_back(static_cast<char>(63 + n));
    int acc = 0, nbits = 0;
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            acc = (acc << 1) | (g.adjacent(i, j) ? 1 : 0);
            if (++nbits == 6) {
                out.push_back(static_cast<char>(63 + acc));
                acc = 0;
                nbits = 0;
            }
        }
    }
    if (nbits > 0) out.push_back(static_cast<char>(63 + (acc << (6 - nbits))));
    return out;
}

inline Graph from_graph6(std::string_view s) {
    std::size_t pos = 0;
    constexpr std::string_view header = ">>graph6<<";
    if (s.substr(0, header.size()) == header) pos = header.size();
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
    if (pos >= s.size()) throw ParseError("empty graph6 string", pos);
    int c = static_cast<unsigned char>(s[pos]);
    if (c == 126) throw ParseError("graph6 vertex count above 62 is not supported", pos);
    if (c < 63 || c > 126) throw ParseError("invalid graph6 size byte", pos);
    const int n = c - 63;
    if (n > kMaxVertices) throw ParseError("graph6 vertex count above 32", pos);
    ++pos;
    const std::size_t bits = static_cast<std::size_t>(n) * (n - 1) / 2;
    const std::size_t need = (bits + 5) / 6;
    if (s.size() - pos != need)
        throw ParseError("graph6 body has " + std::to_string(s.size() - pos) + " bytes, expected " +
                             std::to_string(need),
                         s.size() < pos + need ? s.size() : pos + need);
    Graph g(n);
    std::size_t k = 0;
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i, ++k) {
            std::size_t at = pos + k / 6;
            int byte = static_cast<unsigned char>(s[at]);
            if (byte < 63 || byte > 126) throw ParseError("invalid graph6 data byte", at);
            if ((byte - 63) >> (5 - k % 6) & 1) g.add_edge(i, j);
        }
    }
    for (std::size_t at = pos; at < s.size(); ++at) {
        int byte = static_cast<unsigned char>(s[at]);
        if (byte < 63 || byte > 126) throw ParseError("invalid graph6 data byte", at);
    }
    if (bits % 6 != 0) {
        int pad = (static_cast<unsigned char>(s.back()) - 63) & ((1 << (6 - bits % 6)) - 1);
        if (pad != 0) throw ParseError("nonzero graph6 padding bits", s.size() - 1);
    }
    return g;
}

}  // namespace pext
