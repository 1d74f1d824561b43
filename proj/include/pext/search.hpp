#pragma once

/// \file search.hpp
/// Canonical ear-augmentation search for elementary graphs with exactly p
/// perfect matchings and excess at least c, with excess-based pruning, job
/// splitting and checkpointable job execution.

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pext/barriers.hpp"
#include "pext/canonical.hpp"
#include "pext/ears.hpp"
#include "pext/graph.hpp"
#include "pext/matching.hpp"

namespace pext {

/// Largest even N with N <= 3 + sqrt(16p - 8c - 23).
inline int size_bound(int p, int c) {
    if (p < 2) throw ContractError("size_bound requires p >= 2");
    long long radicand = 16LL * p - 8LL * c - 23;
    if (radicand < 0) throw ContractError("size_bound: excess " + std::to_string(c) + " too large for p = " +
                                          std::to_string(p));
    int n = 0;
    while (true) {
        int next = n + 2;
        long long d = next - 3;
        if (d > 0 && d * d > radicand) break;
        n = next;
    }
    return n;
}

/// Vertex budget for descendants of a node with best fill excess `c_best`,
/// `phi` matchings and n vertices; nullopt when no descendant can reach
/// `c_target`. Clamped to `global_bound` and floored to even.
inline std::optional<int> prune_budget(int c_best, Count phi, int p, int c_target, int n, int global_bound) {
    if (phi >= static_cast<Count>(p)) {
        if (c_best < c_target) return std::nullopt;
        return n;
    }
    long long slack = c_best + 2LL * (p - static_cast<long long>(phi)) - c_target;
    if (slack < 0) return std::nullopt;
    if (n <= 2) return global_bound;
    long long budget = n + (4 * slack) / (n - 2);
    budget -= budget % 2;
    return static_cast<int>(std::min<long long>(budget, global_bound));
}

struct SearchParams {
    int p = 2;
    int c = 1;
    bool prune = true;
    std::size_t catalog_cap = kDefaultCatalogCap;
};

/// One emitted elementary graph, keyed by canonical graph6.
struct Emitted {
    std::string form;
    int excess = 0;
    int n = 0;
};

struct SearchStats {
    std::uint64_t nodes = 0;
    std::uint64_t candidates = 0;
    std::uint64_t accepted = 0;
    std::uint64_t pruned = 0;
    std::uint64_t emitted = 0;
    std::uint64_t canonizations = 0;

    SearchStats& operator+=(const SearchStats& o) {
        nodes += o.nodes;
        candidates += o.candidates;
        accepted += o.accepted;
        pruned += o.pruned;
        emitted += o.emitted;
        canonizations += o.canonizations;
        return *this;
    }
};

/// A visited search state.
struct SearchNode {
    Graph h;
    Count phi = 0;
    bool almost = false;
    std::array<VertexSet, kMaxVertices> free_edges{};
    BarrierCatalog catalog;
    int best_excess = INT_MIN;  // max fill excess; only set at 1-extendable nodes
    int budget = 0;
    int depth = 0;
    std::vector<Permutation> generators;
    bool pruned = false;  // accepted but cut by the excess bound
};

class Interrupted : public std::runtime_error {
public:
    Interrupted() : std::runtime_error("search interrupted") {}
};

class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using EmitSink = std::function<void(const Emitted&)>;

struct SearchHooks {
    std::function<void(const SearchNode&)> on_node;  // every accepted node, pruned or not
    const std::atomic<bool>* stop = nullptr;
};

class Searcher {
public:
    explicit Searcher(SearchParams params, SearchHooks hooks = {})
        : params_(params), hooks_(std::move(hooks)), bound_(size_bound(params.p, params.c)) {
        if (params_.c < 1) throw ContractError("search requires c >= 1");
    }

    int global_bound() const noexcept { return bound_; }
    const SearchParams& params() const noexcept { return params_; }
    const SearchStats& stats() const noexcept { return stats_; }

    /// Root node C_size, or nullopt when pruned away.
    std::optional<SearchNode> root(int size) {
        if (size < 4 || size % 2 != 0 || size > bound_) return std::nullopt;
        SearchNode node;
        node.h = cycle_graph(size);
        node.phi = 2;
        node.catalog = cycle_catalog(node.h, params_.catalog_cap);
        node.depth = 0;
        if (!finish_node(node, true)) return std::nullopt;
        return node;
    }

    /// Calls f(child, spec) for every accepted child kept after pruning, in
    /// the fixed order: pair-orbit representatives lexicographically, then
    /// increasing ear order.
    void for_each_child(const SearchNode& node, const std::function<void(SearchNode&, const EarSpec&)>& f) {
        if (node.phi >= static_cast<Count>(params_.p)) return;
        const Graph& h = node.h;
        const int n = h.order();
        PairOrbits orbits(n, node.generators);
        for (auto [x, y] : orbits.representatives()) {
            check_stop();
            auto step = attachment(node, x, y);
            if (!step) continue;
            for (int r = 0; n + r <= node.budget && n + r <= kMaxVertices; r += 2) {
                if (r == 0 && h.adjacent(x, y)) continue;
                EarSpec spec{x, y, r};
                ++stats_.candidates;
                auto child = make_child(node, spec, *step);
                if (child) f(*child, spec);
            }
        }
    }

    /// Replays one augmentation; nullopt if it is not an accepted, unpruned
    /// child of node or (x,y) is not an orbit representative.
    std::optional<SearchNode> child(const SearchNode& node, const EarSpec& spec) {
        if (node.phi >= static_cast<Count>(params_.p)) return std::nullopt;
        PairOrbits orbits(node.h.order(), node.generators);
        auto rep = orbits.representative(spec.u, spec.v);
        if (rep != std::pair<Vertex, Vertex>{std::min(spec.u, spec.v), std::max(spec.u, spec.v)} ||
            spec.u > spec.v)
            return std::nullopt;
        if (spec.order % 2 != 0 || node.h.order() + spec.order > node.budget) return std::nullopt;
        if (spec.order == 0 && node.h.adjacent(spec.u, spec.v)) return std::nullopt;
        auto step = attachment(node, spec.u, spec.v);
        if (!step) return std::nullopt;
        return make_child(node, spec, *step);
    }

    /// Emits fills of a node with phi == p, then recurses through children.
    void process(const SearchNode& node, const EmitSink& sink) {
        check_stop();
        ++stats_.nodes;
        if (node.phi == static_cast<Count>(params_.p)) {
            emit(node, sink);
            return;
        }
        for_each_child(node, [&](SearchNode& child, const EarSpec&) { process(child, sink); });
    }

    /// All fills of cover sets with excess >= c, deduplicated by canonical form.
    void emit(const SearchNode& node, const EmitSink& sink) {
        if (node.almost || node.phi != static_cast<Count>(params_.p)) return;
        const int base = excess(node.h).value;
        std::set<std::string> seen;
        CoverSetSearch cover(node.h, node.catalog);
        cover.enumerate(params_.c - base, [&](const CoverSet& parts, int gain) {
            Graph g = fill_cover_set(node.h, parts);
            ++stats_.canonizations;
            std::string form = canonical_form(g);
            if (!seen.insert(form).second) return;
            ++stats_.emitted;
            sink(Emitted{form, base + gain, g.order()});
        });
    }

private:
    struct Attachment {
        Count extra = 0;       // matchings of h - x - y (capped)
        bool one_ext = false;  // classification of every child at this pair
    };

    void check_stop() const {
        if (hooks_.stop && hooks_.stop->load(std::memory_order_relaxed)) throw Interrupted();
    }

    // Child classification for attachment pair (x,y); the same for every ear order.
    std::optional<Attachment> attachment(const SearchNode& node, Vertex x, Vertex y) {
        const Graph& h = node.h;
        const Count room = static_cast<Count>(params_.p) - node.phi;
        VertexSet rest = h.vertices() & ~bit(x) & ~bit(y);
        std::array<VertexSet, kMaxVertices> used{};
        std::array<Vertex, kMaxVertices> mate{};
        Count found = 0;
        detail::collect_partners(h, rest, used, mate, found, room + 1);
        if (found > room) return std::nullopt;
        Attachment a;
        a.extra = found;
        if (!node.almost) {
            a.one_ext = found > 0;
            return a;
        }
        if (found == 0) return std::nullopt;
        for (Vertex v = 0; v < h.order(); ++v)
            if (node.free_edges[v] & ~used[v]) return std::nullopt;
        a.one_ext = true;
        return a;
    }

    bool one_extendable_after(const Graph& d) const {
        auto prof = classify_edges_capped(d, static_cast<Count>(params_.p));
        return prof && !prof->has_free_edges();
    }

    bool pair_rule_after(const Graph& d) const {
        auto prof = classify_edges_capped(d, static_cast<Count>(params_.p));
        if (!prof || !prof->has_free_edges()) return false;
        auto fe = free_ear(d, *prof);
        if (!fe || fe->cycle || fe->order() % 2 != 0) return false;
        return one_extendable_after(remove_ear(d, *fe));
    }

    static Graph remove_ear(const Graph& g, const Ear& e) {
        if (e.trivial()) {
            Graph h = g;
            h.remove_edge(e.a, e.b);
            return h;
        }
        return g.induced(g.vertices() & ~e.internal_set());
    }

    // Canonical-deletion test specialised to the way the child was built.
    // May fill `labeling` when a canonical labeling was needed.
    bool accepted(const SearchNode& node, const EarSpec& spec, const Graph& child, bool child_one_ext,
                  std::optional<CanonicalLabeling>& labeling) {
        if (!child_one_ext) return true;  // unique free ear is the added one
        auto ears = ears_of(child);
        auto qualifies_single = [&](const Ear& e) { return one_extendable_after(remove_ear(child, e)); };
        auto qualifies_pair = [&](const Ear& e) { return pair_rule_after(remove_ear(child, e)); };
        std::function<bool(const Ear&)> qualifies = qualifies_single;
        if (node.almost) {
            for (const Ear& e : ears)
                if (e.order() % 2 == 0 && qualifies_single(e)) return false;
            qualifies = qualifies_pair;
        }
        std::vector<const Ear*> tied;
        for (const Ear& e : ears) {
            if (e.order() % 2 != 0 || e.order() > spec.order) continue;
            if (e.order() < spec.order) {
                if (qualifies(e)) return false;
                continue;
            }
            bool same_pair = (e.a == std::min(spec.u, spec.v) && e.b == std::max(spec.u, spec.v));
            if (same_pair || qualifies(e)) tied.push_back(&e);
        }
        bool all_same = std::all_of(tied.begin(), tied.end(), [&](const Ear* e) {
            return e->a == std::min(spec.u, spec.v) && e->b == std::max(spec.u, spec.v);
        });
        if (all_same) return true;
        ++stats_.canonizations;
        labeling = canonize(child);
        const Ear* best = nullptr;
        EarLabel best_label{};
        for (const Ear* e : tied) {
            EarLabel l = ear_label(*e, labeling->label);
            if (!best || l < best_label) {
                best = e;
                best_label = l;
            }
        }
        PairOrbits orbits(child.order(), labeling->generators);
        return orbits.same_orbit(best->a, best->b, spec.u, spec.v);
    }

    std::optional<SearchNode> make_child(const SearchNode& node, const EarSpec& spec, const Attachment& step) {
        Graph c = augment(node.h, spec);
        std::optional<CanonicalLabeling> labeling;
        if (!accepted(node, spec, c, step.one_ext, labeling)) return std::nullopt;
        ++stats_.accepted;
        SearchNode child;
        child.h = std::move(c);
        child.phi = node.phi + step.extra;
        child.almost = !step.one_ext;
        if (child.almost) {
            auto prof = classify_edges_capped(child.h, static_cast<Count>(params_.p));
            child.free_edges = prof->free;
        }
        child.catalog = catalog_update(node.catalog, node.h, spec, child.h, params_.catalog_cap);
        child.depth = node.depth + 1;
        child.budget = node.budget;
        if (!finish_node(child, false, node.budget)) return std::nullopt;
        if (child.phi < static_cast<Count>(params_.p)) {
            if (!labeling) {
                ++stats_.canonizations;
                labeling = canonize(child.h);
            }
            child.generators = std::move(labeling->generators);
        }
        return child;
    }

    // Computes best excess and budget; returns false when pruned.
    bool finish_node(SearchNode& node, bool is_root, int parent_budget = INT_MAX) {
        const int n = node.h.order();
        if (!node.almost) node.best_excess = excess(node.h).value + max_fill_gain(node.h, node.catalog);
        if (is_root) {
            ++stats_.canonizations;
            node.generators = canonize(node.h).generators;
        }
        bool keep = true;
        if (node.almost) {
            node.budget = params_.prune ? parent_budget : bound_;
        } else if (!params_.prune) {
            node.budget = node.phi >= static_cast<Count>(params_.p) ? n : bound_;
        } else {
            auto b = prune_budget(node.best_excess, node.phi, params_.p, params_.c, n, bound_);
            if (!b) keep = false;
            else node.budget = std::min(*b, parent_budget);
        }
        node.pruned = !keep;
        if (hooks_.on_node) hooks_.on_node(node);
        if (!keep) ++stats_.pruned;
        return keep;
    }

    SearchParams params_;
    SearchHooks hooks_;
    int bound_;
    SearchStats stats_;
};

// ---------------------------------------------------------------------------
// Whole runs.

/// Aggregated answer for one p.
struct ExtremalRecord {
    int p = 0;
    int c_threshold = 0;
    std::optional<int> c_found;    // best emitted excess
    std::optional<int> n_min;      // fewest vertices among graphs at c_found
    int size_bound = 0;            // N used by the search
    std::vector<std::string> graphs;  // canonical graph6 at c_found, sorted
};

struct GenerateResult {
    ExtremalRecord record;
    std::vector<Emitted> emitted;  // everything emitted, in emission order
    SearchStats stats;
};

/// Reduces emitted graphs to the record: max excess, graphs at it, fewest vertices.
inline ExtremalRecord make_record(int p, int c, int bound, const std::vector<Emitted>& emitted) {
    ExtremalRecord rec;
    rec.p = p;
    rec.c_threshold = c;
    rec.size_bound = bound;
    std::set<std::string> forms;
    for (const auto& e : emitted)
        if (!rec.c_found || e.excess > *rec.c_found) rec.c_found = e.excess;
    for (const auto& e : emitted) {
        if (e.excess != rec.c_found) continue;
        if (forms.insert(e.form).second && (!rec.n_min || e.n < *rec.n_min)) rec.n_min = e.n;
    }
    rec.graphs.assign(forms.begin(), forms.end());
    return rec;
}

/// One canonical graph6 line per graph, by excess descending then form.
inline std::string format_emitted(std::vector<Emitted> emitted) {
    std::sort(emitted.begin(), emitted.end(), [](const Emitted& a, const Emitted& b) {
        if (a.excess != b.excess) return a.excess > b.excess;
        return a.form < b.form;
    });
    std::string out;
    for (const auto& e : emitted) out += e.form + '\n';
    return out;
}

inline std::string k2_form() { return to_graph6(complete_graph(2)); }

/// Runs the search from every even cycle C_4..C_N.
inline GenerateResult generate(int p, int c, bool prune = true, SearchHooks hooks = {}) {
    GenerateResult out;
    if (p < 1) throw ContractError("generate requires p >= 1");
    if (p == 1) {
        out.emitted.push_back(Emitted{k2_form(), 0, 2});
        out.record = make_record(1, c, 2, out.emitted);
        return out;
    }
    Searcher s(SearchParams{p, c, prune}, std::move(hooks));
    EmitSink sink = [&](const Emitted& e) { out.emitted.push_back(e); };
    for (int size = 4; size <= s.global_bound(); size += 2)
        if (auto root = s.root(size)) s.process(*root, sink);
    out.stats = s.stats();
    out.record = make_record(p, c, s.global_bound(), out.emitted);
    return out;
}

// ---------------------------------------------------------------------------
// Jobs.

/// A subtree of the search forest: the node reached from C_root by replaying
/// `prefix`, or the full run when `full` is set.
struct JobDescriptor {
    bool full = false;
    int root = 0;
    std::vector<EarSpec> prefix;
    int split_depth = 0;

    std::string id() const {
        if (full) return "full";
        std::string s = "r" + std::to_string(root);
        for (const auto& e : prefix)
            s += "-" + std::to_string(e.u) + "." + std::to_string(e.v) + "." + std::to_string(e.order);
        return s;
    }
    friend bool operator==(const JobDescriptor&, const JobDescriptor&) = default;
};

/// Depth 0: one full-run job. Depth d >= 1: one job per node d-1 augmentations
/// below a root, plus a job for each shallower node with phi == p.
inline std::vector<JobDescriptor> split_jobs(int p, int c, int depth, bool prune = true) {
    if (depth < 0) throw ContractError("split depth must be nonnegative");
    if (depth == 0 || p == 1) return {JobDescriptor{true, 0, {}, depth}};
    std::vector<JobDescriptor> jobs;
    Searcher s(SearchParams{p, c, prune});
    std::vector<EarSpec> prefix;
    int root = 0;
    std::function<void(const SearchNode&, int)> walk = [&](const SearchNode& node, int level) {
        if (level == depth - 1 || node.phi == static_cast<Count>(p)) {
            jobs.push_back(JobDescriptor{false, root, prefix, depth});
            return;
        }
        s.for_each_child(node, [&](SearchNode& child, const EarSpec& spec) {
            prefix.push_back(spec);
            walk(child, level + 1);
            prefix.pop_back();
        });
    };
    for (int size = 4; size <= s.global_bound(); size += 2) {
        root = size;
        if (auto node = s.root(size)) walk(*node, 0);
    }
    return jobs;
}

/// Progress of a job: how many top-level branches are done and what they emitted.
struct JobProgress {
    std::size_t completed = 0;
    std::vector<Emitted> emitted;
    bool finished = false;
};

/// Runs a job, skipping the first `resume.completed` top-level branches.
/// `on_branch` is called after each completed branch (for checkpointing).
/// Throws Interrupted (with `progress` at the last completed branch) when
/// the stop flag is raised.
inline void run_job(const JobDescriptor& jd, int p, int c, bool prune, JobProgress& progress,
                    const std::function<void(const JobProgress&)>& on_branch = {},
                    const std::atomic<bool>* stop = nullptr) {
    if (p == 1) {
        progress.emitted = {Emitted{k2_form(), 0, 2}};
        progress.completed = 1;
        progress.finished = true;
        if (on_branch) on_branch(progress);
        return;
    }
    SearchHooks hooks;
    hooks.stop = stop;
    Searcher s(SearchParams{p, c, prune}, hooks);
    std::size_t branch = 0;
    auto run_branch = [&](const std::function<void(const EmitSink&)>& body) {
        if (branch++ < progress.completed) return;
        std::vector<Emitted> local;
        body([&](const Emitted& e) { local.push_back(e); });
        progress.emitted.insert(progress.emitted.end(), local.begin(), local.end());
        progress.completed = branch;
        if (on_branch) on_branch(progress);
    };
    if (jd.full) {
        for (int size = 4; size <= s.global_bound(); size += 2)
            run_branch([&](const EmitSink& sink) {
                if (auto root = s.root(size)) s.process(*root, sink);
            });
    } else {
        auto node = s.root(jd.root);
        if (!node) throw IntegrityError("job " + jd.id() + ": root is not part of the search");
        for (const auto& spec : jd.prefix) {
            node = s.child(*node, spec);
            if (!node) throw IntegrityError("job " + jd.id() + ": prefix step is not an accepted augmentation");
        }
        if (node->phi == static_cast<Count>(p)) {
            run_branch([&](const EmitSink& sink) { s.emit(*node, sink); });
        } else {
            std::vector<std::pair<SearchNode, EarSpec>> kids;
            s.for_each_child(*node, [&](SearchNode& child, const EarSpec& spec) { kids.emplace_back(child, spec); });
            for (auto& [kid, spec] : kids) run_branch([&](const EmitSink& sink) { s.process(kid, sink); });
        }
    }
    progress.finished = true;
}

}  // namespace pext
