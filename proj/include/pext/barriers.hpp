#pragma once

/// \file barriers.hpp
/// Barrier catalogs with pairwise conflict bits, their incremental update along
/// ear augmentations, and cover-set enumeration (free-edge clique fills).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pext/ears.hpp"
#include "pext/graph.hpp"

namespace pext {

/// odd(g - s) == |s|.
inline bool is_barrier(const Graph& g, VertexSet s) {
    s &= g.vertices();
    return odd_components(g, s) == popcount(s);
}

/// b1 and b2 intersect, or either one meets two components of g minus the other.
inline bool barriers_conflict(const Graph& g, VertexSet b1, VertexSet b2) {
    if (b1 & b2) return true;
    auto spans = [&](VertexSet a, VertexSet removed) {
        if (a == 0) return false;
        VertexSet comp = component_of(g, lowest(a), g.vertices() & ~removed);
        return (a & ~comp) != 0;
    };
    return spans(b1, b2) || spans(b2, b1);
}

class CatalogOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Default ceiling on catalog entries. The conflict matrix costs entries^2 bits.
inline constexpr std::size_t kDefaultCatalogCap = std::size_t{1} << 15;

class BarrierCatalog {
public:
    BarrierCatalog() = default;

    std::size_t size() const noexcept { return masks_.size(); }
    VertexSet barrier(std::size_t i) const { return masks_[i]; }
    const std::vector<VertexSet>& barriers() const noexcept { return masks_; }
    bool conflict(std::size_t i, std::size_t j) const { return (bits_[i * words_ + j / 64] >> (j % 64)) & 1; }
    const std::uint64_t* conflict_row(std::size_t i) const { return bits_.data() + i * words_; }
    std::size_t words() const noexcept { return words_; }

    /// Allocates k rows of zeroed conflict bits.
    void reset(std::vector<VertexSet> masks, std::size_t cap = kDefaultCatalogCap) {
        if (masks.size() > cap)
            throw CatalogOverflow("barrier catalog has " + std::to_string(masks.size()) + " entries, cap " +
                                  std::to_string(cap));
        masks_ = std::move(masks);
        words_ = (masks_.size() + 63) / 64;
        bits_.assign(masks_.size() * words_, 0);
    }
    void set_conflict(std::size_t i, std::size_t j) {
        bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64);
        bits_[j * words_ + i / 64] |= std::uint64_t{1} << (i % 64);
    }
    std::uint64_t* mutable_row(std::size_t i) { return bits_.data() + i * words_; }

    /// Same barriers and conflicts, with barriers sorted by mask value.
    BarrierCatalog normalized() const {
        std::vector<std::size_t> idx(size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return masks_[a] < masks_[b]; });
        std::vector<VertexSet> m;
        m.reserve(size());
        for (auto i : idx) m.push_back(masks_[i]);
        BarrierCatalog out;
        out.reset(std::move(m), std::max(size(), kDefaultCatalogCap));
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = a; b < idx.size(); ++b)
                if (conflict(idx[a], idx[b])) out.set_conflict(a, b);
        return out;
    }

    friend bool operator==(const BarrierCatalog& x, const BarrierCatalog& y) {
        return x.masks_ == y.masks_ && x.bits_ == y.bits_;
    }

private:
    std::vector<VertexSet> masks_;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
};

/// A barrier that induces no free edge: independent, and every component of
/// g - s is odd. The empty set counts as tight. On a 1-extendable graph every
/// barrier is tight; on an almost 1-extendable node the incremental catalog
/// holds exactly the tight ones.
inline bool is_tight_barrier(const Graph& g, VertexSet s) {
    s &= g.vertices();
    if (s == 0) return true;
    if (!is_barrier(g, s)) return false;
    bool independent = true;
    for_each_vertex(s, [&](Vertex v) {
        if (g.neighbors(v) & s) independent = false;
    });
    if (!independent) return false;
    VertexSet rest = g.vertices() & ~s;
    while (rest) {
        VertexSet comp = component_of(g, lowest(rest), g.vertices() & ~s);
        if (popcount(comp) % 2 == 0) return false;
        rest &= ~comp;
    }
    return true;
}

/// Every barrier of g (empty set included) with conflicts by definition.
/// Exponential in n; used for checking and for small inputs.
inline BarrierCatalog barrier_catalog_bruteforce(const Graph& g, std::size_t cap = kDefaultCatalogCap,
                                                 bool tight_only = false) {
    if (g.order() > 24) throw ContractError("barrier_catalog_bruteforce: order above 24");
    std::vector<VertexSet> masks;
    const VertexSet full = g.vertices();
    for (std::uint64_t s = 0; s <= full; ++s) {
        auto b = static_cast<VertexSet>(s);
        if (tight_only ? is_tight_barrier(g, b) : is_barrier(g, b)) masks.push_back(b);
    }
    BarrierCatalog cat;
    cat.reset(std::move(masks), cap);
    for (std::size_t i = 0; i < cat.size(); ++i)
        for (std::size_t j = i; j < cat.size(); ++j)
            if (barriers_conflict(g, cat.barrier(i), cat.barrier(j))) cat.set_conflict(i, j);
    return cat;
}

namespace detail {

// Number of maximal runs in the sequence of path positions that belong to
// either set, labelled by membership.
inline int run_count(const std::vector<Vertex>& path, VertexSet a, VertexSet b, bool cyclic) {
    std::vector<int> seq;
    for (Vertex v : path) {
        if (a & bit(v)) seq.push_back(1);
        else if (b & bit(v)) seq.push_back(2);
    }
    if (seq.empty()) return 0;
    int runs = 1;
    for (std::size_t i = 1; i < seq.size(); ++i)
        if (seq[i] != seq[i - 1]) ++runs;
    if (cyclic && runs > 1 && seq.front() == seq.back()) --runs;
    return runs;
}

// Nonempty subsets of `positions` (all of them).
inline void for_each_nonempty_subset(VertexSet positions, const std::function<void(VertexSet)>& f) {
    for (VertexSet s = positions; s != 0; s = (s - 1) & positions) f(s);
}

}  // namespace detail

/// Catalog of an even cycle given as a vertex sequence: the empty set plus every
/// nonempty subset of either colour class. Two disjoint subsets conflict when
/// they interleave around the cycle.
inline BarrierCatalog cycle_catalog(const Graph& cycle, std::size_t cap = kDefaultCatalogCap) {
    auto ears = ears_of(cycle);
    if (ears.size() != 1 || !ears.front().cycle || cycle.order() % 2 != 0 || cycle.order() < 4)
        throw ContractError("cycle_catalog: input must be an even cycle");
    const auto& seq = ears.front().internal;
    VertexSet even = 0, odd = 0;
    for (std::size_t i = 0; i < seq.size(); ++i) (i % 2 == 0 ? even : odd) |= bit(seq[i]);
    std::vector<VertexSet> masks{0};
    std::vector<VertexSet> part;
    detail::for_each_nonempty_subset(even, [&](VertexSet s) { part.push_back(s); });
    std::sort(part.begin(), part.end());
    masks.insert(masks.end(), part.begin(), part.end());
    part.clear();
    detail::for_each_nonempty_subset(odd, [&](VertexSet s) { part.push_back(s); });
    std::sort(part.begin(), part.end());
    masks.insert(masks.end(), part.begin(), part.end());
    BarrierCatalog cat;
    cat.reset(std::move(masks), cap);
    for (std::size_t i = 1; i < cat.size(); ++i) {
        for (std::size_t j = i; j < cat.size(); ++j) {
            VertexSet a = cat.barrier(i), b = cat.barrier(j);
            if ((a & b) || detail::run_count(seq, a, b, true) >= 4) cat.set_conflict(i, j);
        }
    }
    return cat;
}

/// Catalog of child = augment(parent, spec) derived from the parent's catalog.
/// Child barriers derived from one parent barrier are contiguous, in parent
/// order; within a parent, B itself comes first, then extensions by increasing
/// mask.
inline BarrierCatalog catalog_update(const BarrierCatalog& parent_cat, const Graph& parent, const EarSpec& spec,
                                     const Graph& child, std::size_t cap = kDefaultCatalogCap) {
    const Vertex x = spec.u, y = spec.v;
    const int n = parent.order();
    if (child.order() != n + spec.order) throw ContractError("catalog_update: child does not match spec");
    std::vector<Vertex> path;
    path.push_back(x);
    VertexSet internal = 0, even_from_x = 0, even_from_y = 0, odd_positions = 0, even_positions = 0;
    for (int i = 0; i < spec.order; ++i) {
        Vertex w = n + i;
        path.push_back(w);
        internal |= bit(w);
        // w is at distance i+1 from x and spec.order-i from y.
        if ((i + 1) % 2 == 0) even_from_x |= bit(w);
        if ((spec.order - i) % 2 == 0) even_from_y |= bit(w);
        ((i + 1) % 2 == 1 ? odd_positions : even_positions) |= bit(w);
    }
    path.push_back(y);

    std::vector<VertexSet> masks;
    std::vector<std::size_t> origin;
    std::vector<std::size_t> block_start(parent_cat.size() + 1, 0);
    auto extend = [&](VertexSet b, VertexSet positions, std::size_t from) {
        std::vector<VertexSet> ext;
        detail::for_each_nonempty_subset(positions, [&](VertexSet s) { ext.push_back(b | s); });
        std::sort(ext.begin(), ext.end());
        for (VertexSet m : ext) {
            masks.push_back(m);
            origin.push_back(from);
        }
    };
    const VertexSet parent_all = parent.vertices();
    for (std::size_t i = 0; i < parent_cat.size(); ++i) {
        block_start[i] = masks.size();
        VertexSet b = parent_cat.barrier(i);
        bool hx = b & bit(x), hy = b & bit(y);
        if (b == 0) {
            masks.push_back(0);
            origin.push_back(i);
            extend(0, odd_positions, i);
            extend(0, even_positions, i);
        } else if (hx && hy) {
            continue;
        } else if (hx || hy) {
            masks.push_back(b);
            origin.push_back(i);
            extend(b, hx ? even_from_x : even_from_y, i);
        } else {
            VertexSet comp = component_of(parent, x, parent_all & ~b);
            if (!(comp & bit(y))) continue;
            masks.push_back(b);
            origin.push_back(i);
        }
        if (masks.size() > cap)
            throw CatalogOverflow("barrier catalog exceeds cap " + std::to_string(cap));
    }
    block_start[parent_cat.size()] = masks.size();

    BarrierCatalog cat;
    cat.reset(std::move(masks), cap);
    const std::size_t k = cat.size();
    // Inherited conflicts: expand each parent row into child blocks.
    for (std::size_t a = 0; a < k; ++a) {
        std::uint64_t* row = cat.mutable_row(a);
        const std::uint64_t* prow = parent_cat.conflict_row(origin[a]);
        for (std::size_t w = 0; w < parent_cat.words(); ++w) {
            std::uint64_t bits = prow[w];
            while (bits) {
                std::size_t j = w * 64 + std::countr_zero(bits);
                bits &= bits - 1;
                for (std::size_t c = block_start[j]; c < block_start[j + 1]; ++c) row[c / 64] |= std::uint64_t{1} << (c % 64);
            }
        }
    }
    // New conflicts can only involve barriers meeting the ear path.
    const VertexSet on_path = internal | bit(x) | bit(y);
    std::vector<std::size_t> touching;
    for (std::size_t a = 0; a < k; ++a)
        if (cat.barrier(a) & on_path) touching.push_back(a);
    for (std::size_t ia = 0; ia < touching.size(); ++ia) {
        for (std::size_t ib = ia; ib < touching.size(); ++ib) {
            std::size_t a = touching[ia], b = touching[ib];
            VertexSet ma = cat.barrier(a), mb = cat.barrier(b);
            if ((ma & mb) || detail::run_count(path, ma & ~mb, mb & ~ma, false) >= 4) cat.set_conflict(a, b);
        }
    }
    return cat;
}

// ---------------------------------------------------------------------------
// Cover sets.

using CoverSet = std::vector<VertexSet>;

inline int choose2(int k) { return k * (k - 1) / 2; }

/// Edges added by filling every part of `parts` into a clique.
inline int fill_gain(const Graph& h, const CoverSet& parts) {
    int gain = 0;
    for (VertexSet b : parts) {
        int inside = 0;
        for_each_vertex(b, [&](Vertex v) { inside += popcount(h.neighbors(v) & b); });
        gain += choose2(popcount(b)) - inside / 2;
    }
    return gain;
}

inline Graph fill_cover_set(const Graph& h, const CoverSet& parts) {
    Graph g = h;
    for (VertexSet b : parts)
        for_each_vertex(b, [&](Vertex u) {
            for_each_vertex(b & ~(bit(u + 1) - 1), [&](Vertex v) { g.add_edge(u, v); });
        });
    return g;
}

/// Branch-and-bound over cover sets of a catalog.
class CoverSetSearch {
public:
    CoverSetSearch(const Graph& h, const BarrierCatalog& cat) : h_(h), cat_(cat), n_(h.order()) {
        by_low_.assign(n_, {});
        gain_.resize(cat.size());
        int largest = 1;
        for (std::size_t i = 0; i < cat.size(); ++i) {
            VertexSet b = cat.barrier(i);
            if (b == 0) continue;
            int inside = 0;
            for_each_vertex(b, [&](Vertex v) { inside += popcount(h.neighbors(v) & b); });
            gain_[i] = choose2(popcount(b)) - inside / 2;
            by_low_[lowest(b)].push_back(i);
            largest = std::max(largest, popcount(b));
        }
        // Larger gains first so good solutions appear early.
        for (auto& bucket : by_low_)
            std::stable_sort(bucket.begin(), bucket.end(), [&](auto a, auto b) { return gain_[a] > gain_[b]; });
        largest_ = largest;
        cap_total_ = choose2(n_ / 2);
    }

    /// Maximum fill gain over all cover sets.
    int max_gain() {
        best_ = -1;
        mode_ = Mode::maximize;
        run();
        return best_;
    }

    /// Calls f(parts, gain) for every cover set with gain >= threshold.
    void enumerate(int threshold, const std::function<void(const CoverSet&, int)>& f) {
        threshold_ = threshold;
        visit_ = &f;
        mode_ = Mode::enumerate;
        run();
        visit_ = nullptr;
    }

private:
    enum class Mode { maximize, enumerate };

    void run() {
        forbidden_.assign(cat_.words(), 0);
        chosen_.clear();
        recurse(h_.vertices(), 0);
    }

    int bound(int uncovered) const {
        int q = uncovered / largest_, r = uncovered % largest_;
        return q * choose2(largest_) + choose2(r);
    }

    void recurse(VertexSet uncovered, int gain) {
        if (uncovered == 0) {
            if (mode_ == Mode::maximize) {
                best_ = std::max(best_, gain);
            } else {
                CoverSet parts;
                for (auto i : chosen_) parts.push_back(cat_.barrier(i));
                (*visit_)(parts, gain);
            }
            return;
        }
        int optimistic = gain + bound(popcount(uncovered));
        optimistic = std::min(optimistic, std::max(gain, cap_total_));
        if (mode_ == Mode::maximize && optimistic <= best_) return;
        if (mode_ == Mode::enumerate && optimistic < threshold_) return;
        Vertex v = lowest(uncovered);
        for (auto i : by_low_[v]) {
            VertexSet b = cat_.barrier(i);
            if ((b & ~uncovered) != 0) continue;
            if ((forbidden_[i / 64] >> (i % 64)) & 1) continue;
            std::vector<std::uint64_t> saved = forbidden_;
            const std::uint64_t* row = cat_.conflict_row(i);
            for (std::size_t w = 0; w < forbidden_.size(); ++w) forbidden_[w] |= row[w];
            chosen_.push_back(i);
            recurse(uncovered & ~b, gain + gain_[i]);
            chosen_.pop_back();
            forbidden_ = std::move(saved);
        }
    }

    const Graph& h_;
    const BarrierCatalog& cat_;
    int n_;
    std::vector<std::vector<std::size_t>> by_low_;
    std::vector<int> gain_;
    int largest_ = 1;
    int cap_total_ = 0;
    Mode mode_ = Mode::maximize;
    int best_ = -1;
    int threshold_ = 0;
    const std::function<void(const CoverSet&, int)>* visit_ = nullptr;
    std::vector<std::uint64_t> forbidden_;
    std::vector<std::size_t> chosen_;
};

/// True iff no coarser cover set exists: no catalog barrier is the union of two
/// or more parts while staying clear of conflicts with the other parts.
inline bool is_maximal_cover_set(const Graph& h, const BarrierCatalog& cat, const CoverSet& parts) {
    for (std::size_t i = 0; i < cat.size(); ++i) {
        VertexSet b = cat.barrier(i);
        if (popcount(b) < 2) continue;
        int inside = 0;
        bool aligned = true;
        for (VertexSet p : parts) {
            if ((p & b) == p) ++inside;
            else if (p & b) aligned = false;
        }
        if (!aligned || inside < 2) continue;
        bool clear = true;
        for (VertexSet p : parts)
            if (!(p & b) && barriers_conflict(h, b, p)) clear = false;
        if (clear) return false;
    }
    return true;
}

/// All cover sets maximal under refinement.
inline std::vector<CoverSet> enumerate_maximal_cover_sets(const BarrierCatalog& cat, const Graph& h) {
    std::vector<CoverSet> out;
    CoverSetSearch search(h, cat);
    search.enumerate(std::numeric_limits<int>::min(), [&](const CoverSet& parts, int) {
        if (is_maximal_cover_set(h, cat, parts)) out.push_back(parts);
    });
    return out;
}

struct MaxExcess {
    int excess = 0;
    std::vector<CoverSet> best;
};

/// Maximum excess over the elementary supergraphs obtained by filling cover
/// sets, with the optimal cover sets. Bipartite hosts fill a colour class.
inline MaxExcess max_excess_over_E(const Graph& h, const BarrierCatalog& cat) {
    const int n = h.order();
    const int base = h.size() - n * n / 4;
    VertexSet side = 0;
    MaxExcess out;
    if (is_bipartite(h, &side) && popcount(side) * 2 == n) {
        out.excess = base + choose2(n / 2);
        for (VertexSet fill : {side, h.vertices() & ~side}) {
            CoverSet parts{fill};
            for_each_vertex(h.vertices() & ~fill, [&](Vertex v) { parts.push_back(bit(v)); });
            std::sort(parts.begin(), parts.end(), [](VertexSet a, VertexSet b) { return lowest(a) < lowest(b); });
            out.best.push_back(std::move(parts));
        }
        return out;
    }
    CoverSetSearch search(h, cat);
    int gain = search.max_gain();
    out.excess = base + gain;
    search.enumerate(gain, [&](const CoverSet& parts, int) { out.best.push_back(parts); });
    return out;
}

/// Maximum fill gain only (no witnesses); bipartite shortcut applied.
inline int max_fill_gain(const Graph& h, const BarrierCatalog& cat) {
    VertexSet side = 0;
    if (is_bipartite(h, &side) && popcount(side) * 2 == h.order()) return choose2(h.order() / 2);
    return CoverSetSearch(h, cat).max_gain();
}

// ---------------------------------------------------------------------------
// Debug dump: barrier masks in hex, then one 0/1 conflict row per barrier.

inline std::string dump_catalog(const BarrierCatalog& cat) {
    std::ostringstream os;
    os << "barriers " << cat.size() << '\n';
    for (std::size_t i = 0; i < cat.size(); ++i) os << std::hex << "0x" << cat.barrier(i) << std::dec << '\n';
    os << "conflicts\n";
    for (std::size_t i = 0; i < cat.size(); ++i) {
        for (std::size_t j = 0; j < cat.size(); ++j) os << (cat.conflict(i, j) ? '1' : '0');
        os << '\n';
    }
    return os.str();
}

}  // namespace pext
