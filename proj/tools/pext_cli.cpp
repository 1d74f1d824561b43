#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "pext/barriers.hpp"
#include "pext/canonical.hpp"
#include "pext/matching.hpp"
#include "pext/oracle.hpp"
#include "pext/search.hpp"
#include "pext/spires.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace pext;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kCheckpointVersion = 1;

enum Exit { kOk = 0, kUsage = 2, kVerifyFailed = 3, kInterrupted = 4, kRefused = 5 };

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int) { g_stop.store(true); }

std::string now_iso() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Checkpoints.

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

json emitted_json(const std::vector<Emitted>& es) {
    json out = json::array();
    for (const auto& e : es) out.push_back({e.form, e.excess, e.n});
    return out;
}

std::vector<Emitted> emitted_from(const json& j) {
    std::vector<Emitted> out;
    for (const auto& e : j) out.push_back(Emitted{e.at(0).get<std::string>(), e.at(1).get<int>(), e.at(2).get<int>()});
    return out;
}

struct CheckpointKey {
    std::string job;
    int p = 0;
    int c = 0;
    bool prune = true;
};

json checkpoint_payload(const CheckpointKey& key, const JobProgress& prog) {
    return json{{"version", kCheckpointVersion}, {"job", key.job},          {"p", key.p},
                {"c", key.c},                   {"prune", key.prune},      {"completed", prog.completed},
                {"finished", prog.finished},    {"results", emitted_json(prog.emitted)}};
}

void write_checkpoint(const fs::path& file, const CheckpointKey& key, const JobProgress& prog) {
    json body = checkpoint_payload(key, prog);
    std::string payload = body.dump();
    body["checksum"] = fnv1a(payload);
    fs::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        out << body.dump() << '\n';
    }
    fs::rename(tmp, file);
}

std::optional<JobProgress> read_checkpoint(const fs::path& file, const CheckpointKey& key) {
    if (!fs::exists(file)) return std::nullopt;
    std::ifstream in(file);
    json body;
    try {
        body = json::parse(in);
    } catch (const json::exception&) {
        throw IntegrityError("checkpoint " + file.string() + " is not valid JSON");
    }
    if (!body.contains("checksum")) throw IntegrityError("checkpoint " + file.string() + " has no checksum");
    auto checksum = body["checksum"].get<std::uint64_t>();
    body.erase("checksum");
    if (fnv1a(body.dump()) != checksum) throw IntegrityError("checkpoint " + file.string() + " is corrupt");
    if (body.value("version", 0) != kCheckpointVersion || body.value("job", "") != key.job ||
        body.value("p", 0) != key.p || body.value("c", 0) != key.c || body.value("prune", !key.prune) != key.prune)
        throw IntegrityError("checkpoint " + file.string() + " belongs to a different run");
    JobProgress prog;
    prog.completed = body["completed"].get<std::size_t>();
    prog.finished = body["finished"].get<bool>();
    prog.emitted = emitted_from(body["results"]);
    return prog;
}

// ---------------------------------------------------------------------------
// Manifest.

void append_manifest(const fs::path& dir, const json& entry) {
    fs::create_directories(dir);
    std::ofstream out(dir / "manifest.jsonl", std::ios::app);
    out << entry.dump() << '\n';
}

// ---------------------------------------------------------------------------
// generate.

struct GenerateOptions {
    int p = 0;
    std::string min_excess = "auto";
    std::string out;
    int jobs = 1;
    int split_depth = 0;
    std::string checkpoint_dir;
    bool no_prune = false;
    bool verbose = false;
};

struct RunOutcome {
    std::vector<Emitted> emitted;
    std::map<std::string, std::string> job_status;
    bool interrupted = false;
};

RunOutcome run_jobs(int p, int c, const GenerateOptions& opt, const fs::path& ckpt_root) {
    const bool prune = !opt.no_prune;
    auto jobs = split_jobs(p, c, opt.split_depth, prune);
    RunOutcome outcome;
    std::vector<JobProgress> results(jobs.size());
    std::vector<std::string> status(jobs.size(), "pending");
    fs::path dir;
    if (!ckpt_root.empty()) {
        dir = ckpt_root / ("p" + std::to_string(p) + "-c" + std::to_string(c) + (prune ? "" : "-noprune"));
        fs::create_directories(dir);
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr failure;
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size() || g_stop.load()) return;
            const auto& jd = jobs[i];
            CheckpointKey key{jd.id(), p, c, prune};
            fs::path file = dir.empty() ? fs::path{} : dir / (jd.id() + ".json");
            try {
                JobProgress prog;
                if (!dir.empty())
                    if (auto saved = read_checkpoint(file, key)) prog = *saved;
                if (!prog.finished) {
                    prog.finished = false;
                    std::function<void(const JobProgress&)> save;
                    if (!dir.empty()) save = [&](const JobProgress& pr) { write_checkpoint(file, key, pr); };
                    run_job(jd, p, c, prune, prog, save, &g_stop);
                    if (!dir.empty()) write_checkpoint(file, key, prog);
                }
                results[i] = std::move(prog);
                status[i] = "complete";
            } catch (const Interrupted&) {
                status[i] = "interrupted";
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!failure) failure = std::current_exception();
                g_stop.store(true);
                return;
            }
        }
    };
    int threads = std::max(1, std::min<int>(opt.jobs, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        outcome.job_status[jobs[i].id()] = status[i];
        if (status[i] != "complete") outcome.interrupted = true;
        outcome.emitted.insert(outcome.emitted.end(), results[i].emitted.begin(), results[i].emitted.end());
    }
    return outcome;
}

void write_results(const fs::path& file, const json& header, const std::vector<Emitted>& emitted) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file);
    out << header.dump() << '\n' << format_emitted(emitted);
}

int cmd_generate(const GenerateOptions& opt) {
    if (opt.p < 1) throw UsageError("--p must be at least 1");
    if (opt.jobs < 1) throw UsageError("--jobs must be at least 1");
    if (opt.split_depth < 0) throw UsageError("--split-depth must be nonnegative");
    const bool automatic = opt.min_excess == "auto";
    int fixed_c = 0;
    if (!automatic) {
        try {
            std::size_t used = 0;
            fixed_c = std::stoi(opt.min_excess, &used);
            if (used != opt.min_excess.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw UsageError("--min-excess must be an integer or 'auto'");
        }
        if (opt.p >= 2 && fixed_c < 1) throw UsageError("--min-excess must be at least 1");
        if (opt.p >= 2 && 16LL * opt.p - 8LL * fixed_c - 23 < 0)
            throw UsageError("--min-excess " + std::to_string(fixed_c) + " is too large for p = " +
                             std::to_string(opt.p));
    }
    fs::path ckpt = opt.checkpoint_dir;
    if (const char* env = std::getenv("PEXT_CHECKPOINT_DIR"); env && *env) ckpt = env;
    fs::path out = opt.out.empty() ? fs::path("pext-p" + std::to_string(opt.p) + ".txt") : fs::path(opt.out);
    fs::path manifest_dir = out.has_parent_path() ? out.parent_path() : fs::path(".");

    json entry{{"command", "generate"},
               {"parameters",
                {{"p", opt.p},
                 {"min_excess", opt.min_excess},
                 {"jobs", opt.jobs},
                 {"split_depth", opt.split_depth},
                 {"prune", !opt.no_prune},
                 {"checkpoint_dir", ckpt.string()}}},
               {"start", now_iso()},
               {"version", kVersion}};

    auto log = [&](const std::string& s) {
        if (opt.verbose) std::cerr << s << '\n';
    };

    // Thresholds to try, highest first.
    std::vector<int> thresholds;
    TableSolver solver(!opt.no_prune, &g_stop);
    if (automatic && opt.p >= 2) {
        for (int q = 1; q < opt.p; ++q) {
            log("solving p=" + std::to_string(q));
            solver.solve(q);
        }
        int hi = solver.upper_bound(opt.p), lo = solver.spire_lower_bound(opt.p);
        for (int c = hi; c >= lo; --c)
            if (16LL * opt.p - 8LL * c - 23 >= 0) thresholds.push_back(c);
    } else {
        thresholds.push_back(opt.p == 1 ? 0 : fixed_c);
    }

    RunOutcome outcome;
    int used_c = thresholds.empty() ? 1 : thresholds.back();
    std::map<std::string, std::string> jobs_seen;
    for (int c : thresholds) {
        used_c = c;
        log("p=" + std::to_string(opt.p) + " threshold " + std::to_string(c));
        outcome = run_jobs(opt.p, c, opt, ckpt);
        for (auto& [id, st] : outcome.job_status) jobs_seen["c" + std::to_string(c) + ":" + id] = st;
        if (outcome.interrupted || !outcome.emitted.empty()) break;
    }
    entry["jobs"] = jobs_seen;
    if (outcome.interrupted) {
        entry["end"] = now_iso();
        entry["status"] = "interrupted";
        entry["results"] = json::array();
        append_manifest(manifest_dir, entry);
        std::cerr << "interrupted; completed branches are checkpointed"
                  << (ckpt.empty() ? " (no checkpoint dir set, nothing saved)" : "") << '\n';
        return kInterrupted;
    }

    int bound = opt.p >= 2 ? size_bound(opt.p, used_c) : 2;
    ExtremalRecord rec = make_record(opt.p, used_c, bound, outcome.emitted);
    std::optional<int> n_p = rec.n_min;
    std::optional<int> c_found = rec.c_found;
    if (automatic) {
        // Spires may beat every elementary graph; report the overall constant.
        std::map<int, ExtremalRecord> db = solver.records();
        db[opt.p] = rec;
        auto rep = characterize_extremal(opt.p, db);
        if (!rep.optimal.empty()) {
            c_found = rep.c_p;
            n_p = rep.n_p;
        }
    }
    std::string job_id = opt.split_depth == 0 ? "full" : "merged-depth" + std::to_string(opt.split_depth);
    json header{{"p", opt.p},
                {"c_threshold", used_c},
                {"c_found", c_found ? json(*c_found) : json(nullptr)},
                {"n_p", n_p ? json(*n_p) : json(nullptr)},
                {"N_p", bound},
                {"job_id", job_id},
                {"counts", {{"emitted", outcome.emitted.size()}, {"extremal_elementary", rec.graphs.size()}}}};
    write_results(out, header, outcome.emitted);
    entry["end"] = now_iso();
    entry["status"] = "complete";
    entry["results"] = json::array({out.string()});
    append_manifest(manifest_dir, entry);
    std::cout << header.dump() << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// table, inspect, spires, verify.

int cmd_table(int max_p, const std::string& out_path, bool verbose) {
    if (max_p < 1) throw UsageError("--max-p must be at least 1");
    TableSolver solver(true, &g_stop);
    std::ostringstream csv;
    csv << "p,c_p,n_p,N_p,count\n";
    for (int p = 1; p <= max_p; ++p) {
        const auto& row = solver.solve(p);
        csv << row.p << ',' << row.c_p << ',' << row.n_p << ',' << row.N_p << ',' << row.count << '\n';
        if (verbose) std::cerr << "p=" << p << " done in " << row.seconds << "s\n";
    }
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream(out_path) << csv.str();
    }
    return kOk;
}

std::string set_string(VertexSet s) {
    std::string out = "{";
    bool first = true;
    for_each_vertex(s, [&](Vertex v) {
        out += (first ? "" : ",") + std::to_string(v);
        first = false;
    });
    return out + "}";
}

int cmd_inspect(const std::string& g6) {
    Graph g = from_graph6(g6);
    std::cout << "graph " << to_graph6(g) << " n=" << g.order() << " e=" << g.size() << '\n';
    if (g.order() % 2 != 0) {
        std::cout << "phi 0 (odd order)\n";
        return kOk;
    }
    Count phi = count_perfect_matchings(g);
    std::cout << "phi " << phi << '\n';
    std::cout << "excess " << excess(g).value << '\n';
    if (phi == 0) return kOk;
    auto prof = classify_edges(g);
    std::cout << "extendable";
    for (auto [u, v] : g.edges())
        if (prof.extendable[u] & bit(v)) std::cout << ' ' << u << '-' << v;
    std::cout << "\nfree";
    for (auto [u, v] : g.edges())
        if (prof.free[u] & bit(v)) std::cout << ' ' << u << '-' << v;
    std::cout << '\n';
    std::cout << "elementary " << (is_elementary(g, prof) ? "yes" : "no") << '\n';
    std::cout << "one_extendable " << (is_one_extendable(g, prof) ? "yes" : "no") << '\n';
    if (g.order() > 24) {
        std::cout << "barriers skipped (n > 24)\n";
        return kOk;
    }
    auto cat = barrier_catalog_bruteforce(g);
    std::cout << "barriers " << cat.size() << '\n';
    std::vector<VertexSet> maximal;
    for (VertexSet b : cat.barriers()) {
        bool is_max = b != 0;
        for (VertexSet o : cat.barriers())
            if (o != b && (o & b) == b) is_max = false;
        if (is_max) maximal.push_back(b);
    }
    std::cout << "maximal_barriers " << maximal.size();
    for (VertexSet b : maximal) std::cout << ' ' << set_string(b);
    std::cout << '\n';
    if (is_elementary(g, prof)) {
        auto best = max_excess_over_E(g, cat);
        std::cout << "max_fill_excess " << best.excess << '\n';
        std::cout << "max_fills " << best.best.size() << '\n';
        for (const auto& parts : best.best) {
            std::cout << "  ";
            for (VertexSet b : parts) std::cout << set_string(b);
            std::cout << " -> " << canonical_form(fill_cover_set(g, parts)) << '\n';
        }
    }
    return kOk;
}

int cmd_spires(int p, const std::string& out_path) {
    if (p < 1) throw UsageError("--p must be at least 1");
    TableSolver solver(true, &g_stop);
    for (int q = 1; q <= p; ++q) solver.solve(q);
    const auto& rep = solver.reports().at(p);
    json doc{{"p", p}, {"c_p", rep.c_p}, {"n_p", rep.n_p}, {"N_p", solver.rows().at(p).N_p}};
    json chambers = json::array();
    for (const auto& ch : rep.chambers)
        chambers.push_back({{"graph6", ch.form},
                            {"phi", ch.phi},
                            {"n", ch.n},
                            {"excess", ch.excess},
                            {"max_barrier", ch.max_barrier},
                            {"placement", ch.anywhere ? "anywhere" : "top-only"}});
    doc["chambers"] = chambers;
    doc["factorizations_used"] = rep.factorizations_used;
    json optimal = json::array();
    for (const auto& cfg : rep.optimal)
        optimal.push_back({{"factors", cfg.factors}, {"chambers", cfg.chambers}, {"excess", cfg.excess}, {"n", cfg.n}});
    doc["optimal_spires"] = optimal;
    std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream(out_path) << text;
    }
    return kOk;
}

int cmd_verify(int max_p, int max_n) {
    if (max_p < 2 || max_n < 2) throw UsageError("--max-p and --max-n must be at least 2");
    const int enum_cap = std::min(max_n, 8);
    std::cerr << "enumerating graphs up to " << enum_cap << " vertices\n";
    oracle::BruteCatalog brute(enum_cap);
    int failures = 0;
    auto fail = [&](const std::string& what) {
        ++failures;
        std::cout << "FAIL " << what << '\n';
    };
    for (int p = 2; p <= max_p; ++p) {
        std::size_t nodes = 0, catalogs = 0;
        SearchHooks hooks;
        hooks.on_node = [&](const SearchNode& node) {
            ++nodes;
            if (node.h.order() > max_n) return;
            if (count_perfect_matchings(node.h) != oracle::brute_matchings(node.h))
                fail("p=" + std::to_string(p) + " matching count " + to_graph6(node.h));
            ++catalogs;
            auto want = barrier_catalog_bruteforce(node.h, kDefaultCatalogCap, node.almost);
            if (!(node.catalog.normalized() == want.normalized()))
                fail("p=" + std::to_string(p) + " barrier catalog " + to_graph6(node.h));
        };
        auto res = generate(p, 1, true, hooks);
        int cmp_n = std::min(enum_cap, res.record.size_bound);
        std::set<std::string> got, seen;
        for (const auto& e : res.emitted) {
            if (!seen.insert(e.form).second) fail("p=" + std::to_string(p) + " duplicate " + e.form);
            if (e.n <= cmp_n) got.insert(oracle::brute_canonical_form(from_graph6(e.form)));
        }
        if (got != brute.clique_fills(p, 1, cmp_n)) fail("p=" + std::to_string(p) + " emitted set");
        auto ext = brute.extremal(p);
        if (res.record.c_found != ext.excess) fail("p=" + std::to_string(p) + " extremal excess");
        auto off = generate(p, 1, false);
        std::set<std::string> a, b;
        for (const auto& e : res.emitted) a.insert(e.form);
        for (const auto& e : off.emitted) b.insert(e.form);
        if (a != b) fail("p=" + std::to_string(p) + " pruning changed output");
        std::cout << "p=" << p << " nodes=" << nodes << " catalogs=" << catalogs << " emitted=" << res.emitted.size()
                  << " compared_up_to_n=" << cmp_n << '\n';
    }
    std::cout << (failures ? "verify: FAIL" : "verify: pass") << '\n';
    return failures ? kVerifyFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Search for elementary graphs with a given number of perfect matchings and maximum excess"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* g = app.add_subcommand("generate", "Find extremal elementary graphs for one p");
    g->add_option("--p", gen.p, "Number of perfect matchings")->required();
    g->add_option("--min-excess", gen.min_excess, "Excess threshold c, or 'auto'")->capture_default_str();
    g->add_option("--out", gen.out, "Results file (default pext-p<P>.txt)");
    g->add_option("--jobs", gen.jobs, "Worker threads")->capture_default_str();
    g->add_option("--split-depth", gen.split_depth, "Job split depth (0 = single job)")->capture_default_str();
    g->add_option("--checkpoint-dir", gen.checkpoint_dir, "Checkpoint directory (PEXT_CHECKPOINT_DIR overrides)");
    g->add_flag("--no-prune", gen.no_prune, "Disable excess pruning");
    g->add_flag("-v,--verbose", gen.verbose, "Progress on stderr");

    int table_max_p = 10;
    std::string table_out;
    bool table_verbose = false;
    auto* t = app.add_subcommand("table", "CSV of p,c_p,n_p,N_p,count");
    t->add_option("--max-p", table_max_p, "Solve p = 1..max-p in order")->capture_default_str();
    t->add_option("--out", table_out, "CSV file (default stdout)");
    t->add_flag("-v,--verbose", table_verbose, "Progress on stderr");

    std::string inspect_graph;
    auto* i = app.add_subcommand("inspect", "Matching, barrier and fill diagnostics for one graph");
    i->add_option("--graph", inspect_graph, "graph6 string")->required();

    int verify_max_p = 8, verify_max_n = 10;
    auto* v = app.add_subcommand("verify", "Cross-check the search against exhaustive enumeration");
    v->add_option("--max-p", verify_max_p, "Largest p to search")->capture_default_str();
    v->add_option("--max-n", verify_max_n, "Largest order checked; exhaustive enumeration stops at 8")->capture_default_str();

    int spires_p = 6;
    std::string spires_out;
    auto* s = app.add_subcommand("spires", "Structure report of extremal spires as JSON");
    s->add_option("--p", spires_p, "Number of perfect matchings")->required();
    s->add_option("--out", spires_out, "JSON file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    std::signal(SIGINT, on_sigint);
    try {
        if (*g) return cmd_generate(gen);
        if (*t) return cmd_table(table_max_p, table_out, table_verbose);
        if (*i) return cmd_inspect(inspect_graph);
        if (*v) return cmd_verify(verify_max_p, verify_max_n);
        if (*s) return cmd_spires(spires_p, spires_out);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error at byte " << e.offset() << ": " << e.what() << '\n';
        return kUsage;
    } catch (const IntegrityError& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return kRefused;
    } catch (const Interrupted&) {
        std::cerr << "interrupted\n";
        return kInterrupted;
    } catch (const ContractError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    }
    return kOk;
}
