// Command-line front end: DDT dumps, convex hulls, inequality reduction,
// model export and trail search over bundled or user-supplied ciphers.
//
// Exit codes: 0 success, 1 domain/runtime error, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "difftrail/builtin_ciphers.hpp"
#include "difftrail/cipher_spec.hpp"
#include "difftrail/linear_models.hpp"
#include "difftrail/milp.hpp"
#include "difftrail/model_gen.hpp"
#include "difftrail/polytope.hpp"
#include "difftrail/reduction.hpp"
#include "difftrail/sbox.hpp"
#include "difftrail/search.hpp"

namespace {

using namespace difftrail;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

// --sbox and --ddt are the two ways to hand over a table; exactly one
TransitionSet load_points(const std::string& sbox_path, const std::string& ddt_path) {
    if (sbox_path.empty() == ddt_path.empty())
        throw CLI::ValidationError("input", "need exactly one of --sbox / --ddt");
    Ddt d = sbox_path.empty() ? load_ddt(read_file(ddt_path))
                              : compute_ddt(load_sbox(read_file(sbox_path)));
    return transition_sets(d);
}

// candidate pool for the cover-based reductions: hull facets plus both
// directions of any implicit equality
InequalitySet hull_candidates(const HullResult& hull) {
    InequalitySet c = hull.facets;
    for (const auto& e : hull.equalities.items) {
        c.items.push_back(e);
        LinearInequality neg;
        for (long long v : e.coeffs) neg.coeffs.push_back(-v);
        neg.rhs = -e.rhs;
        c.items.push_back(neg);
    }
    return c;
}

// header lines for inequality files; deliberately excludes wall time so
// identical invocations write identical bytes
std::vector<std::string> stable_header(const ReductionResult& r) {
    std::vector<std::string> h;
    for (auto& line : reduction_header(r))
        if (line.rfind("wall_time_s:", 0) != 0) h.push_back(line);
    return h;
}

CipherSpec load_spec_arg(const std::string& path) {
    // bundled names resolve without a file; anything else is a JSON path
    const auto& builtin = builtin_specs();
    auto it = builtin.find(path);
    if (it != builtin.end()) return it->second;
    return load_spec_file(path);
}

int run_ddt(const std::string& sbox_path, const std::string& out_path) {
    SBoxTable s = load_sbox(read_file(sbox_path));
    Ddt d = compute_ddt(s);
    std::ostringstream os;
    write_ddt(os, d);
    if (out_path.empty())
        std::cout << os.str();
    else
        write_file(out_path, os.str());
    return 0;
}

int run_hull(const std::string& sbox_path, const std::string& ddt_path,
             const std::string& out_path) {
    TransitionSet ts = load_points(sbox_path, ddt_path);
    HullResult hull = convex_hull_hrep(ts.possible);
    if (!hull.equalities.items.empty())
        std::cerr << "warning: polytope is not full-dimensional ("
                  << hull.equalities.items.size() << " implicit equalities)\n";
    std::cout << hull.facets.items.size() << " facets\n";
    if (!out_path.empty()) {
        std::ostringstream os;
        write_inequality_set(os, hull.facets,
                             {"convex hull facets, dim " + std::to_string(hull.facets.dim)});
        write_file(out_path, os.str());
    }
    return 0;
}

int run_reduce(const std::string& sbox_path, const std::string& ddt_path,
               const std::string& method, int k, int good_type, int runs,
               std::uint64_t seed, double budget, const std::string& out_path) {
    TransitionSet ts = load_points(sbox_path, ddt_path);
    auto budget_d = std::chrono::duration<double>(budget);
    ReductionResult res;
    if (method == "greedy" || method == "random-greedy" || method == "exact") {
        HullResult hull = convex_hull_hrep(ts.possible);
        InequalitySet candidates = hull_candidates(hull);
        if (method == "greedy")
            res = greedy_reduce(candidates, ts.impossible);
        else if (method == "random-greedy")
            res = greedy_random_reduce(candidates, ts.impossible, runs, seed);
        else
            res = exact_reduce(candidates, ts.impossible, budget_d);
    } else if (method == "subset-add") {
        res = subset_addition_reduce(ts, k,
                                     good_type == 1 ? GoodType::type1 : GoodType::type2,
                                     budget_d);
    } else if (method == "random-subset") {
        res = random_subset_reduce(ts, k, seed, budget_d);
    } else {
        throw CLI::ValidationError("--method", "unknown method " + method);
    }
    if (!verify_exact_model(res.chosen, ts))
        throw std::runtime_error("reduced set is not an exact model (internal error)");
    std::cout << "size: " << res.chosen.items.size() << "\n"
              << "method: " << to_string(res.method) << "\n"
              << "optimal: " << (res.optimal ? "true" : "false") << "\n";
    std::ostringstream os;
    write_inequality_set(os, res.chosen, stable_header(res));
    if (out_path.empty())
        std::cout << os.str();
    else
        write_file(out_path, os.str());
    return 0;
}

UnrolledModel build_model(const CipherSpec& spec, int rounds) {
    if (spec.mode == SpecMode::word) return generate_word_model(spec, rounds);
    return generate_bit_model(spec, rounds, default_inequalities(spec));
}

int run_model(const std::string& spec_path, int rounds, const std::string& out_path) {
    CipherSpec spec = load_spec_arg(spec_path);
    UnrolledModel u = build_model(spec, rounds);
    std::cout << "variables: " << u.model.variables().size()
              << "\nconstraints: " << u.model.constraints().size()
              << "\nsbox instances: " << u.sbox_uses.size() << "\n";
    if (!out_path.empty()) write_file(out_path, export_lp(u.model));
    return 0;
}

std::string task_file_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "task_%05zu.lp", i);
    return buf;
}

int run_search(const std::string& spec_path, int rounds, const std::string& attack,
               const std::string& granularity, const std::string& solver,
               double budget, int jobs, std::uint64_t seed,
               const std::string& out_path) {
    SearchQuery q;
    q.spec = load_spec_arg(spec_path);
    q.rounds = rounds;
    q.seed = seed;
    q.budget_seconds = budget;
    q.jobs = jobs;
    q.attack = attack == "impossible" ? AttackKind::impossible
                                      : AttackKind::differential;
    if (q.attack == AttackKind::impossible) {
        if (granularity.empty())
            throw CLI::ValidationError("--granularity",
                                       "impossible search needs a granularity");
        if (granularity == "fuzzy") q.granularity = Granularity::fuzzy;
        else if (granularity == "equal") q.granularity = Granularity::equal;
        else if (granularity == "targeted") q.granularity = Granularity::targeted;
        else throw CLI::ValidationError("--granularity", "unknown " + granularity);
    } else if (!granularity.empty()) {
        throw CLI::ValidationError("--granularity",
                                   "only applies to --attack impossible");
    }

    if (solver == "lp-export") {
        if (out_path.empty())
            throw CLI::ValidationError("--out", "lp-export needs an output directory");
        std::filesystem::create_directories(out_path);
        std::ostringstream manifest;
        manifest << "file\tinput\toutput\n";
        if (q.attack == AttackKind::differential) {
            UnrolledModel u = build_model(q.spec, q.rounds);
            write_file((std::filesystem::path(out_path) / "model.lp").string(),
                       export_lp(u.model));
            manifest << "model.lp\t*\t*\n";
            std::cout << "exported 1 task to " << out_path << "\n";
        } else {
            UnrolledModel base = build_model(q.spec, q.rounds);
            base.model.clear_objective();
            auto tasks = enumerate_patterns(q.spec, *q.granularity);
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                MilpModel m = pattern_model(base, tasks[i]);
                std::string name = task_file_name(i);
                write_file((std::filesystem::path(out_path) / name).string(),
                           export_lp(m));
                auto [in, out] = pattern_strings(q.spec, tasks[i]);
                manifest << name << '\t' << in << '\t' << out << '\n';
            }
            std::cout << "exported " << tasks.size() << " tasks to " << out_path
                      << "\n";
        }
        write_file((std::filesystem::path(out_path) / "manifest.tsv").string(),
                   manifest.str());
        return 0;
    }
    if (solver != "builtin")
        throw CLI::ValidationError("--solver", "unknown solver " + solver);

    if (q.attack == AttackKind::differential) {
        TrailResult res = search_differential(q);
        if (res.status == SolveStatus::infeasible) {
            std::cout << "no trail (model infeasible)\n";
            return 0;
        }
        std::cout << "active SBoxes: " << res.active_sboxes << "\n"
                  << "proved minimal: " << (res.proved_minimal ? "yes" : "no")
                  << "\n";
        if (res.probability_bound_log2 != 0.0)
            std::cout << "probability bound: 2^" << res.probability_bound_log2
                      << "\n";
        for (std::size_t r = 0; r < res.trail.round_states.size(); ++r)
            std::cout << "state " << r << ": " << res.trail.round_states[r] << "\n";
        if (!out_path.empty()) {
            std::ostringstream os;
            os << "# active: " << res.active_sboxes << "\n";
            for (const auto& st : res.trail.round_states) os << st << "\n";
            write_file(out_path, os.str());
        }
        return 0;
    }
    ImpossibleReport report = search_impossible(q);
    std::cout << report_table(report);
    if (!out_path.empty()) write_file(out_path, report_machine_lines(report));
    return 0;
}

int run_xor_bench(int k, const std::string& out_path) {
    // model-size comparison of the two XOR gate encodings per fan-in
    std::ostringstream os;
    os << "n\thull_ineqs\thull_dummies\tparity_ineqs\tparity_dummies\n";
    const int lo = k ? k : 2, hi = k ? k : 7;
    for (int n = lo; n <= hi; ++n) {
        InequalitySet hull = xor_hull_model(n);
        os << n << '\t' << hull.items.size() << "\t0\t1\t1\n";
    }
    std::cout << os.str();
    if (!out_path.empty()) write_file(out_path, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"differential trail analysis toolkit"};
    app.require_subcommand(1);

    std::string sbox_path, ddt_path, out_path, spec_path;
    std::string method = "greedy", attack = "differential", granularity,
                solver = "builtin";
    int k = 3, good_type = 1, runs = 100, rounds = 1, jobs = 1;
    std::uint64_t seed = 1;
    double budget = 1800.0;

    auto* ddt_cmd = app.add_subcommand("ddt", "difference distribution table of an s-box");
    ddt_cmd->add_option("--sbox", sbox_path, "s-box file (hex entries)")->required();
    ddt_cmd->add_option("--out", out_path, "output path (default: stdout)");

    auto* hull_cmd = app.add_subcommand("hull", "convex hull of the possible transitions");
    hull_cmd->add_option("--sbox", sbox_path, "s-box file");
    hull_cmd->add_option("--ddt", ddt_path, "DDT file");
    hull_cmd->add_option("--out", out_path, "facet inequality file");

    auto* reduce_cmd = app.add_subcommand("reduce", "reduce the hull to a small exact model");
    reduce_cmd->add_option("--sbox", sbox_path, "s-box file");
    reduce_cmd->add_option("--ddt", ddt_path, "DDT file");
    reduce_cmd->add_option("--method", method,
                           "greedy|random-greedy|exact|subset-add|random-subset");
    reduce_cmd->add_option("--k", k, "subset size for subset methods (2..4)");
    reduce_cmd->add_option("--good-type", good_type, "subset-add filter: 1|2")
        ->check(CLI::Range(1, 2));
    reduce_cmd->add_option("--runs", runs, "random-greedy restarts");
    reduce_cmd->add_option("--seed", seed, "tie-break RNG seed");
    reduce_cmd->add_option("--budget", budget, "cover solve budget, seconds");
    reduce_cmd->add_option("--out", out_path, "inequality file (default: stdout)");

    auto* model_cmd = app.add_subcommand("model", "unroll a cipher into a MILP model");
    model_cmd->add_option("--spec", spec_path, "cipher JSON or bundled name")->required();
    model_cmd->add_option("--rounds", rounds, "rounds to unroll")->required();
    model_cmd->add_option("--out", out_path, "LP file");

    auto* search_cmd = app.add_subcommand("search", "differential / impossible search");
    search_cmd->add_option("--spec", spec_path, "cipher JSON or bundled name")->required();
    search_cmd->add_option("--rounds", rounds, "rounds to unroll")->required();
    search_cmd->add_option("--attack", attack, "differential|impossible")
        ->check(CLI::IsMember({"differential", "impossible"}));
    search_cmd->add_option("--granularity", granularity, "fuzzy|equal|targeted");
    search_cmd->add_option("--solver", solver, "builtin|lp-export");
    search_cmd->add_option("--budget", budget, "per-solve budget, seconds");
    search_cmd->add_option("--jobs", jobs, "worker threads");
    search_cmd->add_option("--seed", seed, "reserved for sampling helpers");
    search_cmd->add_option("--out", out_path, "machine-readable output path/dir");

    int xor_k = 0;  // 0 = whole 2..7 range
    auto* xor_cmd = app.add_subcommand("xor-bench", "XOR gate model comparison");
    xor_cmd->add_option("--k", xor_k, "single fan-in (default: 2..7)")->check(CLI::Range(2, 7));
    xor_cmd->add_option("--out", out_path, "table output path");

    try {
        app.parse(argc, argv);
        if (ddt_cmd->parsed()) return run_ddt(sbox_path, out_path);
        if (hull_cmd->parsed()) return run_hull(sbox_path, ddt_path, out_path);
        if (reduce_cmd->parsed())
            return run_reduce(sbox_path, ddt_path, method, k, good_type, runs, seed,
                              budget, out_path);
        if (model_cmd->parsed()) return run_model(spec_path, rounds, out_path);
        if (search_cmd->parsed())
            return run_search(spec_path, rounds, attack, granularity, solver, budget,
                              jobs, seed, out_path);
        if (xor_cmd->parsed()) return run_xor_bench(xor_k, out_path);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
