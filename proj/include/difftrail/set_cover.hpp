#pragma once

// Minimum set cover: greedy and exact branch-and-bound.
//
// The exact solver preprocesses by duplicate/dominance elimination and forced
// unique-cover subsets, branches on the uncovered element covered by the
// fewest remaining subsets, and prunes with a disjoint-element packing lower
// bound. On budget exhaustion it returns the incumbent flagged non-optimal.

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <vector>

#include "difftrail/bits.hpp"

namespace difftrail {

struct CoverInstance {
    std::size_t universe_size = 0;
    std::vector<std::vector<std::size_t>> subsets;
};

struct CoverSolution {
    std::vector<std::size_t> chosen;  // subset indices, ascending
    bool optimal = false;
    std::chrono::duration<double> wall_time{0};
};

namespace detail {

inline std::vector<WordSet> cover_masks(const CoverInstance& inst) {
    std::vector<WordSet> masks;
    masks.reserve(inst.subsets.size());
    for (const auto& s : inst.subsets) {
        WordSet w(inst.universe_size);
        for (std::size_t e : s) {
            if (e >= inst.universe_size)
                throw std::out_of_range("set cover subset element outside universe");
            w.set(e);
        }
        masks.push_back(std::move(w));
    }
    return masks;
}

inline void check_feasible(const CoverInstance& inst, const std::vector<WordSet>& masks) {
    WordSet all(inst.universe_size);
    for (const auto& m : masks) all |= m;
    if (all.count() != inst.universe_size)
        throw std::invalid_argument("set cover instance is infeasible: uncovered element");
}

}  // namespace detail

inline CoverSolution solve_greedy(const CoverInstance& inst) {
    auto t0 = std::chrono::steady_clock::now();
    auto masks = detail::cover_masks(inst);
    detail::check_feasible(inst, masks);

    CoverSolution sol;
    WordSet uncovered(inst.universe_size);
    for (std::size_t e = 0; e < inst.universe_size; ++e) uncovered.set(e);
    while (uncovered.any()) {
        std::size_t best = masks.size(), best_gain = 0;
        for (std::size_t i = 0; i < masks.size(); ++i) {
            std::size_t gain = masks[i].count_and(uncovered);
            if (gain > best_gain) {  // ties keep the lowest index
                best_gain = gain;
                best = i;
            }
        }
        sol.chosen.push_back(best);
        uncovered.subtract(masks[best]);
    }
    std::sort(sol.chosen.begin(), sol.chosen.end());
    sol.optimal = false;
    sol.wall_time = std::chrono::steady_clock::now() - t0;
    return sol;
}

namespace detail {

struct CoverSearch {
    std::size_t universe = 0;
    std::vector<WordSet> masks;          // reduced subsets
    std::vector<std::size_t> original;   // reduced index -> original index
    std::vector<std::vector<std::size_t>> covering;  // element -> reduced indices
    std::chrono::steady_clock::time_point deadline;
    bool timed_out = false;
    std::size_t best_size = 0;
    std::vector<std::size_t> best;       // reduced indices
    std::vector<std::size_t> path;
    std::vector<char> excluded;
    long long node_budget_check = 0;

    // lower bound: greedily pick uncovered elements no remaining subset covers
    // two of; each picked element needs its own subset in any cover
    std::size_t lower_bound(const WordSet& uncovered) const {
        WordSet blocked(universe);
        std::size_t lb = 0;
        for (std::size_t e = 0; e < universe; ++e) {
            if (!uncovered.test(e) || blocked.test(e)) continue;
            ++lb;
            for (std::size_t i : covering[e])
                if (!excluded[i]) blocked |= masks[i];
        }
        return lb;
    }

    bool out_of_time() {
        if (timed_out) return true;
        if (++node_budget_check % 256 == 0 &&
            std::chrono::steady_clock::now() >= deadline)
            timed_out = true;
        return timed_out;
    }

    void dfs(WordSet uncovered) {
        if (!uncovered.any()) {
            if (path.size() < best_size) {
                best_size = path.size();
                best = path;
            }
            return;
        }
        if (out_of_time()) return;
        if (path.size() + 1 >= best_size) return;
        if (path.size() + lower_bound(uncovered) >= best_size) return;

        // branch element: uncovered element with fewest available subsets
        std::size_t elem = universe, fewest = masks.size() + 1;
        bool dead = false;
        uncovered.for_each([&](std::size_t e) {
            std::size_t c = 0;
            for (std::size_t i : covering[e])
                if (!excluded[i]) ++c;
            if (c == 0) dead = true;
            if (c < fewest) {
                fewest = c;
                elem = e;
            }
        });
        if (dead || elem == universe) return;

        std::vector<std::size_t> branches;
        for (std::size_t i : covering[elem])
            if (!excluded[i]) branches.push_back(i);
        std::sort(branches.begin(), branches.end(), [&](std::size_t a, std::size_t b) {
            std::size_t ca = masks[a].count_and(uncovered), cb = masks[b].count_and(uncovered);
            if (ca != cb) return ca > cb;
            return a < b;
        });
        for (std::size_t bi = 0; bi < branches.size(); ++bi) {
            std::size_t i = branches[bi];
            path.push_back(i);
            WordSet next = uncovered;
            next.subtract(masks[i]);
            dfs(std::move(next));
            path.pop_back();
            excluded[i] = 1;  // later branches must not reuse earlier choices
            if (timed_out) break;
        }
        for (std::size_t i : branches) excluded[i] = 0;
    }
};

}  // namespace detail

inline CoverSolution solve_exact(const CoverInstance& inst,
                                 std::chrono::duration<double> budget = std::chrono::minutes(10)) {
    auto t0 = std::chrono::steady_clock::now();
    auto masks = detail::cover_masks(inst);
    detail::check_feasible(inst, masks);

    CoverSolution sol;
    if (inst.universe_size == 0) {
        sol.optimal = true;
        sol.wall_time = std::chrono::steady_clock::now() - t0;
        return sol;
    }

    // duplicate + dominance elimination: drop any subset contained in another
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < masks.size() && !dominated; ++j) {
            if (i == j || !masks[i].is_subset_of(masks[j])) continue;
            if (!(masks[j].is_subset_of(masks[i])))
                dominated = true;              // strictly contained
            else if (j < i)
                dominated = true;              // duplicate: keep lowest index
        }
        if (!dominated) keep.push_back(i);
    }

    detail::CoverSearch cs;
    cs.universe = inst.universe_size;
    for (std::size_t i : keep) {
        cs.masks.push_back(masks[i]);
        cs.original.push_back(i);
    }
    cs.covering.assign(inst.universe_size, {});
    for (std::size_t i = 0; i < cs.masks.size(); ++i)
        cs.masks[i].for_each([&](std::size_t e) { cs.covering[e].push_back(i); });

    // forced subsets: elements with a unique coverer
    WordSet uncovered(inst.universe_size);
    for (std::size_t e = 0; e < inst.universe_size; ++e) uncovered.set(e);
    std::vector<std::size_t> forced;
    for (std::size_t e = 0; e < inst.universe_size; ++e)
        if (cs.covering[e].size() == 1) forced.push_back(cs.covering[e][0]);
    std::sort(forced.begin(), forced.end());
    forced.erase(std::unique(forced.begin(), forced.end()), forced.end());
    for (std::size_t i : forced) uncovered.subtract(cs.masks[i]);

    // greedy incumbent on the residual instance
    {
        WordSet u = uncovered;
        std::vector<std::size_t> inc = forced;
        while (u.any()) {
            std::size_t best = cs.masks.size(), best_gain = 0;
            for (std::size_t i = 0; i < cs.masks.size(); ++i) {
                std::size_t gain = cs.masks[i].count_and(u);
                if (gain > best_gain) {
                    best_gain = gain;
                    best = i;
                }
            }
            inc.push_back(best);
            u.subtract(cs.masks[best]);
        }
        std::sort(inc.begin(), inc.end());
        inc.erase(std::unique(inc.begin(), inc.end()), inc.end());
        cs.best = inc;
        cs.best_size = inc.size();
    }

    cs.excluded.assign(cs.masks.size(), 0);
    cs.path = forced;
    cs.deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(budget);
    cs.dfs(uncovered);

    for (std::size_t i : cs.best) sol.chosen.push_back(cs.original[i]);
    std::sort(sol.chosen.begin(), sol.chosen.end());
    sol.chosen.erase(std::unique(sol.chosen.begin(), sol.chosen.end()), sol.chosen.end());
    sol.optimal = !cs.timed_out;
    sol.wall_time = std::chrono::steady_clock::now() - t0;
    return sol;
}

}  // namespace difftrail
