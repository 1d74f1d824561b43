#pragma once

// Canonical labeling by partition refinement with automorphism pruning,
// vertex-pair orbits, and the canonical ear deletion.

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pext/ears.hpp"
#include "pext/graph.hpp"
#include "pext/matching.hpp"

namespace pext {

using Permutation = std::vector<int>;

struct CanonicalLabeling {
    Permutation label;                   // label[v] = canonical position of v
    std::string form;                    // graph6 of the relabeled graph
    std::vector<Permutation> generators;  // automorphisms found while searching
};

namespace detail {

using Rows = std::array<VertexSet, kMaxVertices>;

// Ordered partition: lab holds vertices, cells are contiguous ranges; cell_end[i]
// is the exclusive end of the cell starting at i (only valid at cell starts).
struct Partition {
    int n = 0;
    std::array<int, kMaxVertices> lab{};
    std::array<int, kMaxVertices> cell_end{};

    VertexSet cell_set(int start) const {
        VertexSet s = 0;
        for (int i = start; i < cell_end[start]; ++i) s |= bit(lab[i]);
        return s;
    }
    bool discrete() const {
        for (int i = 0; i < n; i = cell_end[i])
            if (cell_end[i] - i > 1) return false;
        return true;
    }
};

class Canonizer {
public:
    explicit Canonizer(const Graph& g) : g_(g), n_(g.order()) {}

    CanonicalLabeling run() {
        CanonicalLabeling out;
        if (n_ == 0) {
            out.form = to_graph6(g_);
            return out;
        }
        Partition root;
        root.n = n_;
        // Initial cells by degree, ascending.
        std::vector<int> order(n_);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return g_.degree(a) < g_.degree(b); });
        for (int i = 0; i < n_; ++i) root.lab[i] = order[i];
        for (int i = 0; i < n_;) {
            int j = i;
            while (j < n_ && g_.degree(order[j]) == g_.degree(order[i])) ++j;
            root.cell_end[i] = j;
            i = j;
        }
        std::vector<int> queue;
        for (int i = 0; i < n_; i = root.cell_end[i]) queue.push_back(i);
        refine(root, queue);
        std::vector<Vertex> prefix;
        search(root, prefix);

        out.label.assign(n_, 0);
        for (int i = 0; i < n_; ++i) out.label[best_lab_[i]] = i;
        Graph canon(n_);
        for (int i = 0; i < n_; ++i)
            for_each_vertex(best_cert_[i] & ~(bit(i + 1) - 1), [&](Vertex j) { canon.add_edge(i, j); });
        out.form = to_graph6(canon);
        out.generators = std::move(generators_);
        return out;
    }

private:
    // Splits cells by neighbour counts into each splitter until stable.
    void refine(Partition& p, std::vector<int> queue) const {
        std::array<bool, kMaxVertices> queued{};
        for (int s : queue) queued[s] = true;
        std::size_t head = 0;
        while (head < queue.size()) {
            int s = queue[head++];
            queued[s] = false;
            VertexSet w = p.cell_set(s);
            for (int start = 0; start < n_;) {
                int end = p.cell_end[start];
                if (end - start > 1) {
                    std::array<int, kMaxVertices> cnt{};
                    bool uniform = true;
                    for (int i = start; i < end; ++i) {
                        cnt[p.lab[i]] = popcount(g_.neighbors(p.lab[i]) & w);
                        if (cnt[p.lab[i]] != cnt[p.lab[start]]) uniform = false;
                    }
                    if (!uniform) {
                        std::stable_sort(p.lab.begin() + start, p.lab.begin() + end,
                                         [&](int a, int b) { return cnt[a] < cnt[b]; });
                        bool was_queued = queued[start];
                        for (int i = start; i < end;) {
                            int j = i;
                            while (j < end && cnt[p.lab[j]] == cnt[p.lab[i]]) ++j;
                            p.cell_end[i] = j;
                            if (i != start || !was_queued) {
                                if (!queued[i]) {
                                    queued[i] = true;
                                    queue.push_back(i);
                                }
                            }
                            i = j;
                        }
                    }
                }
                start = end;
            }
        }
    }

    Rows certificate(const Partition& p) const {
        std::array<int, kMaxVertices> pos{};
        for (int i = 0; i < n_; ++i) pos[p.lab[i]] = i;
        Rows rows{};
        for (int i = 0; i < n_; ++i) {
            VertexSet r = 0;
            for_each_vertex(g_.neighbors(p.lab[i]), [&](Vertex w) { r |= bit(pos[w]); });
            rows[i] = r;
        }
        return rows;
    }

    bool less_rows(const Rows& a, const Rows& b) const {
        for (int i = 0; i < n_; ++i)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    }
    bool equal_rows(const Rows& a, const Rows& b) const {
        for (int i = 0; i < n_; ++i)
            if (a[i] != b[i]) return false;
        return true;
    }

    void record_automorphism(const std::array<int, kMaxVertices>& from, const std::array<int, kMaxVertices>& to) {
        Permutation gamma(n_);
        bool identity = true;
        for (int i = 0; i < n_; ++i) {
            gamma[from[i]] = to[i];
            if (from[i] != to[i]) identity = false;
        }
        if (!identity) generators_.push_back(std::move(gamma));
    }

    void leaf(const Partition& p) {
        Rows cert = certificate(p);
        if (!have_first_) {
            have_first_ = true;
            first_cert_ = cert;
            first_lab_ = p.lab;
            best_cert_ = cert;
            best_lab_ = p.lab;
            return;
        }
        if (equal_rows(cert, first_cert_)) {
            record_automorphism(first_lab_, p.lab);
            return;
        }
        if (equal_rows(cert, best_cert_)) {
            record_automorphism(best_lab_, p.lab);
            return;
        }
        if (less_rows(cert, best_cert_)) {
            best_cert_ = cert;
            best_lab_ = p.lab;
        }
    }

    // Orbits of the group generated by the known generators fixing `prefix`.
    std::array<int, kMaxVertices> stabilizer_orbits(const std::vector<Vertex>& prefix) const {
        std::array<int, kMaxVertices> parent{};
        for (int i = 0; i < n_; ++i) parent[i] = i;
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const auto& gen : generators_) {
            bool fixes = true;
            for (Vertex v : prefix)
                if (gen[v] != v) fixes = false;
            if (!fixes) continue;
            for (int v = 0; v < n_; ++v) {
                int a = find(v), b = find(gen[v]);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
        }
        for (int v = 0; v < n_; ++v) parent[v] = find(v);
        return parent;
    }

    void search(const Partition& p, std::vector<Vertex>& prefix) {
        if (p.discrete()) {
            leaf(p);
            return;
        }
        // Target: first smallest non-singleton cell.
        int target = -1, best = kMaxVertices + 1;
        for (int i = 0; i < n_; i = p.cell_end[i]) {
            int sz = p.cell_end[i] - i;
            if (sz > 1 && sz < best) {
                best = sz;
                target = i;
            }
        }
        std::vector<Vertex> members(p.lab.begin() + target, p.lab.begin() + p.cell_end[target]);
        std::vector<Vertex> tried;
        for (Vertex v : members) {
            if (!tried.empty()) {
                auto orbit = stabilizer_orbits(prefix);
                bool equivalent = false;
                for (Vertex u : tried)
                    if (orbit[u] == orbit[v]) equivalent = true;
                if (equivalent) continue;
            }
            tried.push_back(v);
            Partition child = p;
            // Individualize v: move it to the front of its cell.
            int end = p.cell_end[target];
            int at = static_cast<int>(std::find(child.lab.begin() + target, child.lab.begin() + end, v) -
                                      child.lab.begin());
            std::rotate(child.lab.begin() + target, child.lab.begin() + at, child.lab.begin() + at + 1);
            child.cell_end[target] = target + 1;
            child.cell_end[target + 1] = end;
            prefix.push_back(v);
            refine(child, {target});
            search(child, prefix);
            prefix.pop_back();
        }
    }

    const Graph& g_;
    int n_;
    bool have_first_ = false;
    Rows first_cert_{}, best_cert_{};
    std::array<int, kMaxVertices> first_lab_{}, best_lab_{};
    std::vector<Permutation> generators_;
};

}  // namespace detail

inline CanonicalLabeling canonize(const Graph& g) { return detail::Canonizer(g).run(); }

inline std::string canonical_form(const Graph& g) { return canonize(g).form; }

inline Graph canonical_graph(const Graph& g) { return from_graph6(canonical_form(g)); }

/// Order of the group generated by `gens` on n points, by closure. Test helper
/// for small groups only.
inline std::size_t group_order(int n, const std::vector<Permutation>& gens) {
    Permutation id(n);
    std::iota(id.begin(), id.end(), 0);
    std::set<Permutation> seen{id};
    std::vector<Permutation> frontier{id};
    while (!frontier.empty()) {
        Permutation cur = std::move(frontier.back());
        frontier.pop_back();
        for (const auto& g : gens) {
            Permutation next(n);
            for (int i = 0; i < n; ++i) next[i] = g[cur[i]];
            if (seen.insert(next).second) frontier.push_back(std::move(next));
        }
    }
    return seen.size();
}

/// Partition of unordered vertex pairs into automorphism orbits.
class PairOrbits {
public:
    PairOrbits(int n, const std::vector<Permutation>& gens) : n_(n), parent_(n * n) {
        std::iota(parent_.begin(), parent_.end(), 0);
        for (const auto& g : gens)
            for (int u = 0; u < n; ++u)
                for (int v = u + 1; v < n; ++v) unite(id(u, v), id(g[u], g[v]));
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (find(id(u, v)) == id(u, v)) reps_.emplace_back(u, v);
    }

    /// One representative per orbit (the lexicographically least pair),
    /// listed in lexicographic order.
    const std::vector<std::pair<Vertex, Vertex>>& representatives() const { return reps_; }
    std::size_t size() const { return reps_.size(); }
    bool same_orbit(Vertex a, Vertex b, Vertex c, Vertex d) const { return find(id(a, b)) == find(id(c, d)); }
    std::pair<Vertex, Vertex> representative(Vertex a, Vertex b) const {
        int r = find(id(a, b));
        return {r / n_, r % n_};
    }

private:
    int id(Vertex a, Vertex b) const { return a < b ? a * n_ + b : b * n_ + a; }
    int find(int x) const {
        while (parent_[x] != x) x = parent_[x];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

    int n_;
    std::vector<int> parent_;
    std::vector<std::pair<Vertex, Vertex>> reps_;
};

inline PairOrbits pair_orbits(const Graph& g) { return PairOrbits(g.order(), canonize(g).generators); }

// ---------------------------------------------------------------------------
// Canonical ear deletion.

struct EarLabel {
    int order = 0;
    int lo = 0;
    int hi = 0;
    friend auto operator<=>(const EarLabel&, const EarLabel&) = default;
};

inline EarLabel ear_label(const Ear& e, const Permutation& label) {
    int a = label[e.a], b = label[e.b];
    return {e.order(), std::min(a, b), std::max(a, b)};
}

enum class DeletionRule { almost = 1, single = 2, pair = 3 };

struct Deletion {
    Ear ear;
    DeletionRule rule = DeletionRule::single;
};

/// For a graph reached through an almost 1-extendable step: true iff `d` is
/// almost 1-extendable through an even ear whose removal is 1-extendable.
inline bool has_even_free_ear_to_one_extendable(const Graph& d) {
    if (d.order() % 2 != 0) return false;
    auto prof = classify_edges_capped(d, std::numeric_limits<Count>::max() - 1);
    if (!prof || !prof->has_free_edges()) return false;
    auto fe = free_ear(d, *prof);
    if (!fe || fe->cycle || fe->order() % 2 != 0) return false;
    return is_one_extendable(delete_ear(d, *fe));
}

/// The canonical ear to delete from h (1-extendable or almost 1-extendable,
/// 2-connected, not a cycle). Throws when no rule applies.
inline Deletion canonical_deletion(const Graph& h, const Permutation& label) {
    auto ears = ears_of(h);
    if (ears.size() == 1 && ears.front().cycle) throw ContractError("canonical_deletion: cycles are the base case");
    auto prof = classify_edges(h);
    if (prof.has_free_edges()) {
        auto fe = free_ear(h, prof);
        if (!fe || !is_one_extendable(delete_ear(h, *fe)))
            throw ContractError("canonical_deletion: graph is neither 1-extendable nor almost 1-extendable");
        return {*fe, DeletionRule::almost};
    }
    std::optional<Ear> best;
    EarLabel best_label{};
    for (const Ear& e : ears) {
        if (e.order() % 2 != 0) continue;
        EarLabel lbl = ear_label(e, label);
        if (best && !(lbl < best_label)) continue;
        if (is_one_extendable(delete_ear(h, e))) {
            best = e;
            best_label = lbl;
        }
    }
    if (best) return {*best, DeletionRule::single};
    for (const Ear& e : ears) {
        if (e.order() % 2 != 0) continue;
        EarLabel lbl = ear_label(e, label);
        if (best && !(lbl < best_label)) continue;
        if (has_even_free_ear_to_one_extendable(delete_ear(h, e))) {
            best = e;
            best_label = lbl;
        }
    }
    if (best) return {*best, DeletionRule::pair};
    throw ContractError("canonical_deletion: no qualifying ear");
}

inline Deletion canonical_deletion(const Graph& h) { return canonical_deletion(h, canonize(h).label); }

/// Acceptance test for child = augment(parent, spec): the canonical deletion of
/// the child has the added ear's order and an endpoint pair in the same orbit.
inline bool is_canonical_augmentation(const Graph& parent, const EarSpec& spec, const Graph& child) {
    (void)parent;
    auto lab = canonize(child);
    Deletion del = canonical_deletion(child, lab.label);
    if (del.ear.order() != spec.order) return false;
    PairOrbits orbits(child.order(), lab.generators);
    return orbits.same_orbit(del.ear.a, del.ear.b, spec.u, spec.v);
}

}  // namespace pext
