#pragma once

// Trail search driver: minimise active s-boxes over r rounds, or sweep
// single-active-word input/output patterns and collect the pairs whose
// models are infeasible (impossible differentials).
//
// Pattern granularities, one MILP feasibility problem each:
//   fuzzy    — input word i non-zero, output word j non-zero, the rest zero;
//              an infeasible pair covers every concrete value combination.
//   equal    — word i and word j carry the same concrete value v.
//   targeted — fully concrete (i, v_in) -> (j, v_out).
// A "word" is a word_bits-wide slice of the state (one hex character for
// the 4-bit ciphers).  Multi-active-word differences are out of scope.
//
// Reports render as hex strings: '0' for a zero word, '*' for the non-zero
// input wildcard, '-' for the non-zero output wildcard, hex digits for
// concrete values.  Machine form: "input<TAB>output<TAB>1|0" (1 = proved).

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cipher_spec.hpp"
#include "milp.hpp"
#include "model_gen.hpp"
#include "polytope.hpp"
#include "reduction.hpp"
#include "sbox.hpp"

namespace difftrail {

enum class AttackKind { differential, impossible };
enum class Granularity { fuzzy, equal, targeted };

inline std::string to_string(AttackKind a) {
    return a == AttackKind::differential ? "differential" : "impossible";
}
inline std::string to_string(Granularity g) {
    switch (g) {
        case Granularity::fuzzy: return "fuzzy";
        case Granularity::equal: return "equal";
        case Granularity::targeted: return "targeted";
    }
    return "?";
}

struct SearchQuery {
    CipherSpec spec;
    int rounds = 1;
    AttackKind attack = AttackKind::differential;
    std::optional<Granularity> granularity;  // present iff attack = impossible
    std::uint64_t seed = 0;
    double budget_seconds = 1800.0;  // per MILP solve
    int jobs = 1;
    // Inequality sets per s-box for bit-mode models; left empty they are
    // derived as hull facets reduced greedily.
    std::map<std::string, InequalitySet> sbox_ineqs;
    BitModelOptions bit_options;
};

struct TrailResult {
    SolveStatus status = SolveStatus::infeasible;
    bool proved_minimal = false;
    int active_sboxes = -1;
    DecodedTrail trail;
    // log2 upper bound on any trail probability with this many active
    // s-boxes: active * best single-transition log2 probability
    double probability_bound_log2 = 0.0;
    long long nodes = 0;
    double wall_seconds = 0.0;
};

/// One impossibility task: word positions plus concrete values, where value
/// 0 stands for the non-zero wildcard (fuzzy granularity).
struct PatternTask {
    int in_word = 0;
    int out_word = 0;
    int in_value = 0;
    int out_value = 0;
};

struct ImpossibleEntry {
    std::string input_pattern;
    std::string output_pattern;
    bool proved = false;  // false = solve budget expired, not counted
};

struct ImpossibleReport {
    Granularity granularity = Granularity::fuzzy;
    std::vector<ImpossibleEntry> entries;  // proved + unresolved, task order
    int total_count = 0;       // proved impossible
    int possible_count = 0;    // pairs with a feasible trail (not listed)
    int unresolved_count = 0;  // budget expired before an answer
};

namespace detail {

inline int pattern_word_count(const CipherSpec& spec) {
    if (spec.mode == SpecMode::word) return spec.units();
    if (spec.word_bits <= 0 || spec.state_bits % spec.word_bits != 0)
        throw std::invalid_argument("word size must divide the state size");
    return spec.state_bits / spec.word_bits;
}

inline int pattern_value_count(const CipherSpec& spec) {
    if (spec.mode == SpecMode::word) return 1;  // activity only
    return (1 << spec.word_bits) - 1;
}

inline std::chrono::duration<double> budget_of(double seconds) {
    if (seconds <= 0) return std::chrono::duration<double>(3.15e7);  // ~1 year
    return std::chrono::duration<double>(seconds);
}

}  // namespace detail

inline std::vector<PatternTask> enumerate_patterns(const CipherSpec& spec,
                                                   Granularity g) {
    const int words = detail::pattern_word_count(spec);
    if (spec.mode == SpecMode::word && g != Granularity::fuzzy)
        throw std::invalid_argument(
            "word-level models carry activity only; use fuzzy granularity");
    const int values = detail::pattern_value_count(spec);
    std::vector<PatternTask> tasks;
    for (int i = 0; i < words; ++i)
        for (int j = 0; j < words; ++j) {
            switch (g) {
                case Granularity::fuzzy:
                    tasks.push_back({i, j, 0, 0});
                    break;
                case Granularity::equal:
                    for (int v = 1; v <= values; ++v) tasks.push_back({i, j, v, v});
                    break;
                case Granularity::targeted:
                    for (int vi = 1; vi <= values; ++vi)
                        for (int vo = 1; vo <= values; ++vo)
                            tasks.push_back({i, j, vi, vo});
                    break;
            }
        }
    return tasks;
}

namespace detail {

inline std::string render_pattern(const CipherSpec& spec, int word, int value,
                                  char wildcard) {
    const int words = pattern_word_count(spec);
    const int chars_per_word =
        spec.mode == SpecMode::word ? 1 : spec.word_bits / 4;
    if (spec.mode == SpecMode::bit && spec.word_bits % 4 != 0)
        throw std::invalid_argument("pattern rendering needs 4-bit-aligned words");
    std::string out(static_cast<std::size_t>(words * chars_per_word), '0');
    for (int c = 0; c < chars_per_word; ++c) {
        char ch;
        if (value == 0) {
            ch = wildcard;
        } else {
            int shift = 4 * (chars_per_word - 1 - c);
            ch = "0123456789abcdef"[(value >> shift) & 0xf];
        }
        out[static_cast<std::size_t>(word * chars_per_word + c)] = ch;
    }
    return out;
}

// Fix one boundary of the model to a single-active-word pattern.
inline void apply_word_pattern(MilpModel& model, const CipherSpec& spec,
                               const std::vector<int>& wires, int word, int value) {
    if (spec.mode == SpecMode::word) {
        for (std::size_t w = 0; w < wires.size(); ++w)
            model.fix(wires[w], static_cast<int>(w) == word ? 1 : 0);
        return;
    }
    const int wb = spec.word_bits;
    for (std::size_t p = 0; p < wires.size(); ++p) {
        const int w = static_cast<int>(p) / wb;
        if (w != word) {
            model.fix(wires[p], 0);
        } else if (value != 0) {
            const int b = static_cast<int>(p) % wb;  // 0 = word MSB
            model.fix(wires[p], (value >> (wb - 1 - b)) & 1);
        }
    }
    if (value == 0) {
        std::vector<MilpTerm> nz;
        for (int b = 0; b < wb; ++b)
            nz.push_back({wires[static_cast<std::size_t>(word * wb + b)], 1});
        model.add_ge(std::move(nz), 1);
    }
}

}  // namespace detail

/// Ready-to-solve feasibility model for one pattern task: a copy of the
/// unrolled model with both boundaries pinned and a blank objective.
inline MilpModel pattern_model(const UnrolledModel& base, const PatternTask& t) {
    MilpModel m = base.model;
    m.clear_objective();
    detail::apply_word_pattern(m, base.spec, base.input_vars, t.in_word, t.in_value);
    detail::apply_word_pattern(m, base.spec, base.output_vars, t.out_word,
                               t.out_value);
    return m;
}

inline std::pair<std::string, std::string> pattern_strings(const CipherSpec& spec,
                                                           const PatternTask& t) {
    return {detail::render_pattern(spec, t.in_word, t.in_value, '*'),
            detail::render_pattern(spec, t.out_word, t.out_value, '-')};
}

/// Hull facets reduced greedily — the inequality sets used when a query
/// does not supply its own.
inline std::map<std::string, InequalitySet> default_inequalities(
    const CipherSpec& spec) {
    std::map<std::string, InequalitySet> out;
    if (spec.mode != SpecMode::bit) return out;
    for (const auto& [name, table] : spec.sboxes) {
        TransitionSet ts = transition_sets(compute_ddt(table));
        HullResult hull = convex_hull_hrep(ts.possible);
        InequalitySet candidates = hull.facets;
        for (const auto& e : hull.equalities.items) {  // equality = two inequalities
            candidates.items.push_back(e);
            LinearInequality neg;
            for (long long c : e.coeffs) neg.coeffs.push_back(-c);
            neg.rhs = -e.rhs;
            candidates.items.push_back(neg);
        }
        out.emplace(name, greedy_reduce(candidates, ts.impossible).chosen);
    }
    return out;
}

namespace detail {

inline UnrolledModel build_query_model(const SearchQuery& q) {
    if (q.rounds < 1) throw std::invalid_argument("round count must be positive");
    if (q.spec.mode == SpecMode::word) return generate_word_model(q.spec, q.rounds);
    const auto& ineqs =
        q.sbox_ineqs.empty() ? default_inequalities(q.spec) : q.sbox_ineqs;
    return generate_bit_model(q.spec, q.rounds, ineqs, q.bit_options);
}

}  // namespace detail

inline TrailResult search_differential(const SearchQuery& q) {
    if (q.attack != AttackKind::differential)
        throw std::invalid_argument("query attack kind is not differential");
    if (q.granularity)
        throw std::invalid_argument("granularity only applies to impossible search");
    UnrolledModel u = detail::build_query_model(q);
    SolveResult res = solve(u.model, detail::budget_of(q.budget_seconds));
    TrailResult out;
    out.status = res.status;
    out.nodes = res.nodes;
    out.wall_seconds = res.wall_time.count();
    if (res.status == SolveStatus::infeasible) return out;
    out.proved_minimal = res.status == SolveStatus::optimal;
    out.active_sboxes = static_cast<int>(*res.objective_value);
    out.trail = decode_assignment(u, *res.assignment);
    double mdp = 0.0;
    bool have_mdp = false;
    for (const auto& [name, table] : q.spec.sboxes) {
        if (table.table.empty()) continue;
        double v = max_transition_log2(table);
        if (!have_mdp || v > mdp) mdp = v;
        have_mdp = true;
    }
    out.probability_bound_log2 = have_mdp ? mdp * out.active_sboxes : 0.0;
    return out;
}

inline ImpossibleReport search_impossible(const SearchQuery& q) {
    if (q.attack != AttackKind::impossible)
        throw std::invalid_argument("query attack kind is not impossible");
    if (!q.granularity)
        throw std::invalid_argument("impossible search needs a granularity");
    UnrolledModel base = detail::build_query_model(q);
    base.model.clear_objective();
    const std::vector<PatternTask> tasks = enumerate_patterns(q.spec, *q.granularity);

    enum class Outcome : unsigned char { possible, impossible, unresolved };
    std::vector<Outcome> outcomes(tasks.size(), Outcome::possible);
    std::atomic<std::size_t> next{0};
    const int jobs = std::max(1, q.jobs);
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            MilpModel m = pattern_model(base, tasks[i]);
            try {
                SolveResult res = solve(m, detail::budget_of(q.budget_seconds));
                outcomes[i] = res.status == SolveStatus::infeasible
                                  ? Outcome::impossible
                                  : Outcome::possible;
            } catch (const BudgetExhausted&) {
                outcomes[i] = Outcome::unresolved;
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    ImpossibleReport report;
    report.granularity = *q.granularity;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (outcomes[i] == Outcome::possible) {
            ++report.possible_count;
            continue;
        }
        auto [in, out] = pattern_strings(q.spec, tasks[i]);
        bool proved = outcomes[i] == Outcome::impossible;
        report.entries.push_back({in, out, proved});
        if (proved)
            ++report.total_count;
        else
            ++report.unresolved_count;
    }
    return report;
}

/// Tab-separated machine form, one line per entry, 1 = proved impossible.
inline std::string report_machine_lines(const ImpossibleReport& r) {
    std::string out;
    for (const auto& e : r.entries) {
        out += e.input_pattern;
        out += '\t';
        out += e.output_pattern;
        out += '\t';
        out += e.proved ? '1' : '0';
        out += '\n';
    }
    return out;
}

/// Aligned human-readable table with a count footer.
inline std::string report_table(const ImpossibleReport& r) {
    std::ostringstream os;
    os << "granularity: " << to_string(r.granularity) << "\n";
    std::size_t w = 5;
    for (const auto& e : r.entries) w = std::max(w, e.input_pattern.size());
    for (const auto& e : r.entries) {
        os << e.input_pattern;
        for (std::size_t p = e.input_pattern.size(); p < w + 2; ++p) os << ' ';
        os << "-> " << e.output_pattern;
        if (!e.proved) os << "   [unresolved]";
        os << "\n";
    }
    os << "impossible: " << r.total_count << "   possible: " << r.possible_count
       << "   unresolved: " << r.unresolved_count << "\n";
    return os.str();
}

}  // namespace difftrail
