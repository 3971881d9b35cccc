#pragma once

// Reduce an inequality set to a small subset that still excludes exactly the
// impossible transitions.
//
// Methods: greedy (most-removed-first, lowest-index ties), greedy with a
// seeded random tiebreaker (best of N runs), exact minimum set cover, subset
// addition (sums of k facets incident to a possible point, kept when "good"),
// and a random k-subset baseline. All results are checked against the
// impossible set before being returned.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "difftrail/bits.hpp"
#include "difftrail/polytope.hpp"
#include "difftrail/sbox.hpp"
#include "difftrail/set_cover.hpp"

namespace difftrail {

enum class ReductionMethod { greedy, random_greedy, exact, subset_addition, random_subset };

inline const char* to_string(ReductionMethod m) {
    switch (m) {
        case ReductionMethod::greedy: return "greedy";
        case ReductionMethod::random_greedy: return "random_greedy";
        case ReductionMethod::exact: return "exact";
        case ReductionMethod::subset_addition: return "subset_addition";
        case ReductionMethod::random_subset: return "random_subset";
    }
    return "?";
}

struct ReductionResult {
    InequalitySet chosen;
    std::size_t removed_count = 0;  // impossible patterns excluded by `chosen`
    ReductionMethod method = ReductionMethod::greedy;
    std::optional<std::uint64_t> seed;
    std::chrono::duration<double> wall_time{0};
    bool optimal = true;  // false when a cover budget expired with an incumbent
};

struct RemovalMatrix {
    std::size_t rows = 0;  // inequalities
    std::size_t cols = 0;  // impossible patterns
    std::vector<WordSet> bits;  // bits[i].test(j): inequality i violates pattern j
};

inline RemovalMatrix removal_matrix(const InequalitySet& set,
                                    const std::vector<BitVec>& impossible) {
    RemovalMatrix m;
    m.rows = set.items.size();
    m.cols = impossible.size();
    m.bits.reserve(m.rows);
    for (const auto& q : set.items) {
        WordSet w(m.cols);
        for (std::size_t j = 0; j < impossible.size(); ++j)
            if (evaluate(q, impossible[j]) < 0) w.set(j);
        m.bits.push_back(std::move(w));
    }
    return m;
}

inline bool verify_exact_model(const InequalitySet& chosen, const TransitionSet& points) {
    const std::size_t n = std::size_t{1} << points.dim;
    std::vector<char> is_possible(n, 0);
    for (const auto& p : points.possible) is_possible[point_index(p)] = 1;
    for (std::size_t idx = 0; idx < n; ++idx) {
        BitVec v = point_from_index(idx, points.dim);
        bool ok = true;
        for (const auto& q : chosen.items)
            if (evaluate(q, v) < 0) { ok = false; break; }
        if (ok != static_cast<bool>(is_possible[idx])) return false;
    }
    return true;
}

inline LinearInequality conditional_inequality(const BitVec& pattern) {
    LinearInequality q;
    q.coeffs.reserve(pattern.size());
    long long ones = 0;
    for (std::uint8_t b : pattern) {
        q.coeffs.push_back(b ? -1 : 1);
        ones += b;
    }
    q.rhs = 1 - ones;  // violated by exactly `pattern`
    return q;
}

namespace detail {

inline void check_coverage(const RemovalMatrix& m) {
    WordSet all(m.cols);
    for (const auto& row : m.bits) all |= row;
    if (all.count() != m.cols)
        throw std::invalid_argument(
            "inequality set cannot exclude every impossible pattern (coverage gap)");
}

// greedy cover over the removal matrix; tie-break either lowest index or a
// uniform draw from the tied rows
inline std::vector<std::size_t> greedy_rows(const RemovalMatrix& m, std::mt19937_64* rng) {
    WordSet left(m.cols);
    for (std::size_t j = 0; j < m.cols; ++j) left.set(j);
    std::vector<std::size_t> chosen;
    std::vector<std::size_t> tied;
    while (left.any()) {
        std::size_t best_gain = 0;
        tied.clear();
        for (std::size_t i = 0; i < m.rows; ++i) {
            std::size_t gain = m.bits[i].count_and(left);
            if (gain > best_gain) {
                best_gain = gain;
                tied.clear();
                tied.push_back(i);
            } else if (gain == best_gain && gain > 0) {
                tied.push_back(i);
            }
        }
        std::size_t pick = tied.front();
        if (rng && tied.size() > 1)
            pick = tied[static_cast<std::size_t>((*rng)() % tied.size())];
        chosen.push_back(pick);
        left.subtract(m.bits[pick]);
    }
    return chosen;
}

inline InequalitySet select(const InequalitySet& set, const std::vector<std::size_t>& idx) {
    InequalitySet out;
    out.dim = set.dim;
    for (std::size_t i : idx) out.items.push_back(set.items[i]);
    return out;
}

}  // namespace detail

inline ReductionResult greedy_reduce(const InequalitySet& hull,
                                     const std::vector<BitVec>& impossible) {
    auto t0 = std::chrono::steady_clock::now();
    RemovalMatrix m = removal_matrix(hull, impossible);
    detail::check_coverage(m);
    ReductionResult r;
    r.method = ReductionMethod::greedy;
    r.chosen = detail::select(hull, detail::greedy_rows(m, nullptr));
    r.removed_count = impossible.size();
    r.optimal = false;
    r.wall_time = std::chrono::steady_clock::now() - t0;
    return r;
}

inline ReductionResult greedy_random_reduce(const InequalitySet& hull,
                                            const std::vector<BitVec>& impossible,
                                            int runs, std::uint64_t seed) {
    if (runs < 1) throw std::invalid_argument("greedy_random_reduce needs runs >= 1");
    auto t0 = std::chrono::steady_clock::now();
    RemovalMatrix m = removal_matrix(hull, impossible);
    detail::check_coverage(m);
    std::vector<std::size_t> best;
    for (int run = 0; run < runs; ++run) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(run));
        auto rows = detail::greedy_rows(m, &rng);
        if (best.empty() || rows.size() < best.size()) best = std::move(rows);
    }
    ReductionResult r;
    r.method = ReductionMethod::random_greedy;
    r.seed = seed;
    r.chosen = detail::select(hull, best);
    r.removed_count = impossible.size();
    r.optimal = false;
    r.wall_time = std::chrono::steady_clock::now() - t0;
    return r;
}

inline ReductionResult exact_reduce(const InequalitySet& hull,
                                    const std::vector<BitVec>& impossible,
                                    std::chrono::duration<double> budget = std::chrono::minutes(10)) {
    auto t0 = std::chrono::steady_clock::now();
    RemovalMatrix m = removal_matrix(hull, impossible);
    detail::check_coverage(m);
    CoverInstance inst;
    inst.universe_size = m.cols;
    inst.subsets.resize(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        m.bits[i].for_each([&](std::size_t j) { inst.subsets[i].push_back(j); });
    CoverSolution cover = solve_exact(inst, budget);
    ReductionResult r;
    r.method = ReductionMethod::exact;
    r.chosen = detail::select(hull, cover.chosen);
    r.removed_count = impossible.size();
    r.optimal = cover.optimal;
    r.wall_time = std::chrono::steady_clock::now() - t0;
    return r;
}

enum class GoodType { type1, type2 };

namespace detail {

struct CandidatePool {
    InequalitySet combined;                 // hull facets + kept candidates
    std::vector<WordSet> footprints;        // aligned with combined.items
    std::map<LinearInequality, std::size_t> seen;

    void add(LinearInequality q, WordSet fp) {
        q = canonicalize(std::move(q));
        auto [it, fresh] = seen.emplace(std::move(q), combined.items.size());
        if (!fresh) return;
        combined.items.push_back(it->first);
        footprints.push_back(std::move(fp));
    }
};

// facet values on each impossible point, plus footprint bitsets and counts
struct FacetData {
    std::vector<std::vector<long long>> val;  // [facet][impossible index]
    std::vector<WordSet> fp;
    std::vector<std::size_t> fp_count;
};

inline FacetData facet_data(const InequalitySet& hull, const std::vector<BitVec>& impossible) {
    FacetData d;
    d.val.reserve(hull.items.size());
    d.fp.reserve(hull.items.size());
    for (const auto& q : hull.items) {
        std::vector<long long> row(impossible.size());
        WordSet w(impossible.size());
        for (std::size_t j = 0; j < impossible.size(); ++j) {
            row[j] = evaluate(q, impossible[j]);
            if (row[j] < 0) w.set(j);
        }
        d.fp_count.push_back(w.count());
        d.val.push_back(std::move(row));
        d.fp.push_back(std::move(w));
    }
    return d;
}

inline std::vector<std::vector<std::size_t>> incident_facets(const InequalitySet& hull,
                                                             const std::vector<BitVec>& points) {
    std::vector<std::vector<std::size_t>> inc(points.size());
    for (std::size_t p = 0; p < points.size(); ++p)
        for (std::size_t f = 0; f < hull.items.size(); ++f)
            if (evaluate(hull.items[f], points[p]) == 0) inc[p].push_back(f);
    return inc;
}

inline LinearInequality sum_of(const InequalitySet& hull, const std::vector<std::size_t>& idx) {
    LinearInequality q;
    q.coeffs.assign(static_cast<std::size_t>(hull.dim), 0);
    for (std::size_t f : idx) {
        const auto& h = hull.items[f];
        for (std::size_t c = 0; c < q.coeffs.size(); ++c) q.coeffs[c] += h.coeffs[c];
        q.rhs += h.rhs;
    }
    return q;
}

inline ReductionResult cover_pool(CandidatePool& pool, std::size_t impossible_count,
                                  ReductionMethod method,
                                  std::chrono::duration<double> budget,
                                  std::chrono::steady_clock::time_point t0) {
    CoverInstance inst;
    inst.universe_size = impossible_count;
    inst.subsets.resize(pool.combined.items.size());
    for (std::size_t i = 0; i < pool.footprints.size(); ++i)
        pool.footprints[i].for_each([&](std::size_t j) { inst.subsets[i].push_back(j); });
    CoverSolution cover = solve_exact(inst, budget);
    ReductionResult r;
    r.method = method;
    r.chosen = select(pool.combined, cover.chosen);
    r.removed_count = impossible_count;
    r.optimal = cover.optimal;
    r.wall_time = std::chrono::steady_clock::now() - t0;
    return r;
}

}  // namespace detail

inline ReductionResult subset_addition_reduce(
    const TransitionSet& points, int k, GoodType good_type,
    std::chrono::duration<double> budget = std::chrono::minutes(10)) {
    if (k < 2 || k > 4) throw std::invalid_argument("subset addition needs 2 <= k <= 4");
    auto t0 = std::chrono::steady_clock::now();
    HullResult hull = convex_hull_hrep(points.possible);
    detail::FacetData fd = detail::facet_data(hull.facets, points.impossible);

    detail::CandidatePool pool;
    pool.combined.dim = hull.facets.dim;
    for (std::size_t f = 0; f < hull.facets.items.size(); ++f)
        pool.add(hull.facets.items[f], fd.fp[f]);

    const BitVec origin(static_cast<std::size_t>(points.dim), 0);
    auto incidence = detail::incident_facets(hull.facets, points.possible);
    const std::size_t nimp = points.impossible.size();
    std::vector<long long> acc(nimp);

    for (std::size_t p = 0; p < points.possible.size(); ++p) {
        if (points.possible[p] == origin) continue;  // never contributes, dominates runtime
        const auto& inc = incidence[p];
        if (inc.size() < static_cast<std::size_t>(k)) continue;
        std::vector<std::size_t> pick(static_cast<std::size_t>(k));
        // iterate k-subsets of `inc` with nested index positions
        std::vector<std::size_t> at(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) at[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
        while (true) {
            std::size_t weakest = SIZE_MAX, strongest = 0;
            for (int i = 0; i < k; ++i) {
                pick[static_cast<std::size_t>(i)] = inc[at[static_cast<std::size_t>(i)]];
                std::size_t c = fd.fp_count[pick[static_cast<std::size_t>(i)]];
                weakest = std::min(weakest, c);
                strongest = std::max(strongest, c);
            }
            // footprint of the sum via additive facet values
            std::fill(acc.begin(), acc.end(), 0);
            for (int i = 0; i < k; ++i) {
                const auto& row = fd.val[pick[static_cast<std::size_t>(i)]];
                for (std::size_t j = 0; j < nimp; ++j) acc[j] += row[j];
            }
            std::size_t removed = 0;
            for (std::size_t j = 0; j < nimp; ++j)
                if (acc[j] < 0) ++removed;
            bool good = good_type == GoodType::type1 ? removed > weakest : removed >= strongest;
            if (good) {
                WordSet fp(nimp);
                for (std::size_t j = 0; j < nimp; ++j)
                    if (acc[j] < 0) fp.set(j);
                pool.add(detail::sum_of(hull.facets, pick), std::move(fp));
            }
            // advance the combination
            int pos = k - 1;
            while (pos >= 0 &&
                   at[static_cast<std::size_t>(pos)] ==
                       inc.size() - static_cast<std::size_t>(k - pos)) --pos;
            if (pos < 0) break;
            ++at[static_cast<std::size_t>(pos)];
            for (int i = pos + 1; i < k; ++i)
                at[static_cast<std::size_t>(i)] = at[static_cast<std::size_t>(i - 1)] + 1;
        }
    }

    ReductionResult r = detail::cover_pool(pool, nimp, ReductionMethod::subset_addition,
                                           budget, t0);
    return r;
}

inline ReductionResult random_subset_reduce(const TransitionSet& points, int k,
                                            std::uint64_t seed,
                                            std::chrono::duration<double> budget = std::chrono::minutes(10)) {
    if (k < 2 || k > 4) throw std::invalid_argument("random subset needs 2 <= k <= 4");
    auto t0 = std::chrono::steady_clock::now();
    HullResult hull = convex_hull_hrep(points.possible);
    detail::FacetData fd = detail::facet_data(hull.facets, points.impossible);

    detail::CandidatePool pool;
    pool.combined.dim = hull.facets.dim;
    for (std::size_t f = 0; f < hull.facets.items.size(); ++f)
        pool.add(hull.facets.items[f], fd.fp[f]);

    auto incidence = detail::incident_facets(hull.facets, points.possible);
    const std::size_t nimp = points.impossible.size();
    std::mt19937_64 rng(seed);
    WordSet removed_so_far(nimp);

    for (std::size_t p = 0; p < points.possible.size(); ++p) {
        const auto& inc = incidence[p];
        if (inc.size() < static_cast<std::size_t>(k)) continue;
        // sample k distinct incident facets
        std::vector<std::size_t> pick;
        while (pick.size() < static_cast<std::size_t>(k)) {
            std::size_t f = inc[static_cast<std::size_t>(rng() % inc.size())];
            if (std::find(pick.begin(), pick.end(), f) == pick.end()) pick.push_back(f);
        }
        std::vector<long long> acc(nimp, 0);
        for (std::size_t f : pick)
            for (std::size_t j = 0; j < nimp; ++j) acc[j] += fd.val[f][j];
        WordSet fp(nimp);
        for (std::size_t j = 0; j < nimp; ++j)
            if (acc[j] < 0) fp.set(j);
        WordSet fresh = fp;
        fresh.subtract(removed_so_far);
        if (!fresh.any()) continue;  // keep only candidates removing new patterns
        removed_so_far |= fp;
        pool.add(detail::sum_of(hull.facets, pick), std::move(fp));
    }

    ReductionResult r = detail::cover_pool(pool, nimp, ReductionMethod::random_subset,
                                           budget, t0);
    r.seed = seed;
    return r;
}

// metadata header lines used when a result is written as an inequality file
inline std::vector<std::string> reduction_header(const ReductionResult& r) {
    std::vector<std::string> h;
    h.push_back(std::string("method: ") + to_string(r.method));
    h.push_back("size: " + std::to_string(r.chosen.items.size()));
    h.push_back("removed: " + std::to_string(r.removed_count));
    if (r.seed) h.push_back("seed: " + std::to_string(*r.seed));
    h.push_back("optimal: " + std::string(r.optimal ? "true" : "false"));
    h.push_back("wall_time_s: " + std::to_string(r.wall_time.count()));
    return h;
}

}  // namespace difftrail
