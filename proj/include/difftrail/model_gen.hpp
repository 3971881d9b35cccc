#pragma once

// Unrolls a cipher description into a MILP over difference variables.
//
// Bit granularity: every state position becomes one binary variable per
// write.  S-box layers are encoded with a caller-supplied inequality set
// over the concatenated (input, output) difference bits, plus one binary
// activity indicator per instance (activity = 1 iff the input difference is
// non-zero).  Linear layers become XOR gate models, permutation layers are
// pure rewiring and add nothing to the model.
//
// Word granularity: every word becomes one binary activity variable.
// S-boxes pass activity through unchanged, linear layers get the classic
// branch-number bound  sum(in) + sum(out) >= B * d  with  d >= each var.
//
// Both generators add the non-triviality cut (input difference != 0) and a
// minimise-total-activity objective; callers running pure feasibility
// checks can clear_objective() afterwards.
//
// Scratch positions are round-local temporaries: they start every round as
// the constant-zero wire, so values staged there never survive a round
// boundary.

#include <bit>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bits.hpp"
#include "cipher_spec.hpp"
#include "linear_models.hpp"
#include "milp.hpp"
#include "polytope.hpp"
#include "sbox.hpp"

namespace difftrail {

/// One unrolled s-box instance: which wires it connects and its activity
/// indicator.  In word mode in_vars == out_vars == {activity_var}.
struct SBoxUse {
    std::string sbox_name;
    int round = 0;
    std::vector<int> in_vars;
    std::vector<int> out_vars;
    int activity_var = -1;
};

struct UnrolledModel {
    CipherSpec spec;
    int rounds = 0;
    MilpModel model;
    std::vector<int> input_vars;   // state wires before round 0
    std::vector<int> output_vars;  // state wires after the last round
    std::vector<int> activity_vars;
    std::vector<SBoxUse> sbox_uses;
    // State wires at every round boundary: rounds+1 snapshots of units()
    // handles each (scratch positions are not part of a snapshot).
    std::vector<std::vector<int>> round_states;
};

struct BitModelOptions {
    XorStyle xor_style = XorStyle::parity;
    // Redundant strengthening cuts; both off by default because the s-box
    // inequality sets are already exact.
    bool bijectivity_cuts = false;  // q*sum(out) >= sum(in), r*sum(in) >= sum(out)
    bool branch_cuts = false;       // sum(in) + sum(out) >= branch * activity
};

/// Differential branch number of an s-box: the minimum input+output Hamming
/// weight over all possible non-trivial transitions.
inline int sbox_branch_number(const SBoxTable& s) {
    Ddt ddt = compute_ddt(s);
    int best = s.in_bits + s.out_bits + 1;
    for (std::size_t dx = 1; dx < ddt.counts.size(); ++dx)
        for (std::size_t dy = 0; dy < ddt.counts[dx].size(); ++dy)
            if (ddt.counts[dx][dy] > 0) {
                int w = std::popcount(dx) + std::popcount(dy);
                if (w < best) best = w;
            }
    return best;
}

namespace detail {

inline std::vector<int> state_snapshot(const std::vector<int>& state, int units) {
    return std::vector<int>(state.begin(), state.begin() + units);
}

// Emit one s-box instance at bit granularity: the transition inequalities
// over (in, out), the activity linking rows and any optional cuts.
inline void emit_sbox_bits(const std::vector<int>& in, const std::vector<int>& out,
                           int activity, const InequalitySet& ineqs,
                           const SBoxTable& table, const BitModelOptions& opt,
                           MilpModel& model) {
    std::vector<int> vars = in;
    vars.insert(vars.end(), out.begin(), out.end());
    for (const auto& q : ineqs.items) {
        std::vector<MilpTerm> terms;
        for (std::size_t i = 0; i < q.coeffs.size(); ++i)
            if (q.coeffs[i] != 0) terms.push_back({vars[i], q.coeffs[i]});
        model.add_ge(std::move(terms), q.rhs);
    }
    // activity = 1 exactly when some input bit differs
    std::vector<MilpTerm> link;
    for (int v : in) link.push_back({v, 1});
    link.push_back({activity, -1});
    model.add_ge(std::move(link), 0);
    for (int v : in) model.add_ge({{activity, 1}, {v, -1}}, 0);

    if (opt.bijectivity_cuts && table.bijective) {
        std::vector<MilpTerm> fwd, bwd;
        for (int v : out) fwd.push_back({v, table.in_bits});
        for (int v : in) fwd.push_back({v, -1});
        model.add_ge(std::move(fwd), 0);
        for (int v : in) bwd.push_back({v, table.out_bits});
        for (int v : out) bwd.push_back({v, -1});
        model.add_ge(std::move(bwd), 0);
    }
    if (opt.branch_cuts) {
        int b = sbox_branch_number(table);
        std::vector<MilpTerm> cut;
        for (int v : in) cut.push_back({v, 1});
        for (int v : out) cut.push_back({v, 1});
        cut.push_back({activity, -b});
        model.add_ge(std::move(cut), 0);
        for (int v : out) model.add_ge({{activity, 1}, {v, -1}}, 0);
    }
}

inline void apply_pbox(const PBoxLayer& p, std::vector<int>& state) {
    std::vector<int> next = state;
    for (std::size_t i = 0; i < p.perm.size(); ++i)
        next[static_cast<std::size_t>(p.perm[i])] = state[i];
    state = std::move(next);
}

inline void add_nontrivial_input(const std::vector<int>& input_vars, MilpModel& model) {
    std::vector<MilpTerm> terms;
    for (int v : input_vars) terms.push_back({v, 1});
    model.add_ge(std::move(terms), 1);
}

inline void set_activity_objective(const std::vector<int>& activity, MilpModel& model) {
    if (activity.empty()) return;
    std::vector<MilpTerm> terms;
    for (int v : activity) terms.push_back({v, 1});
    model.set_objective_min(std::move(terms));
}

}  // namespace detail

inline UnrolledModel generate_bit_model(const CipherSpec& spec, int rounds,
                                        const std::map<std::string, InequalitySet>& sbox_ineqs,
                                        const BitModelOptions& opt = {}) {
    validate_spec(spec);
    if (spec.mode != SpecMode::bit)
        throw std::invalid_argument("bit-level model needs a bit-mode description");
    if (rounds < 1) throw std::invalid_argument("round count must be positive");
    for (const auto& [name, table] : spec.sboxes) {
        auto it = sbox_ineqs.find(name);
        if (it == sbox_ineqs.end())
            throw std::invalid_argument("no inequality set for s-box '" + name + "'");
        if (it->second.dim != table.in_bits + table.out_bits)
            throw std::invalid_argument("inequality set dimension mismatch for s-box '" +
                                        name + "'");
        if (it->second.items.empty())
            throw std::invalid_argument("empty inequality set for s-box '" + name + "'");
    }

    UnrolledModel u;
    u.spec = spec;
    u.rounds = rounds;
    const int units = spec.units();
    const int width = spec.width();

    std::vector<int> state(static_cast<std::size_t>(width), -1);
    for (int p = 0; p < units; ++p)
        state[static_cast<std::size_t>(p)] = u.model.add_binary("x" + std::to_string(p));
    int zero = -1;
    if (spec.scratch > 0) {
        zero = u.model.add_binary("zero");
        u.model.fix(zero, 0);
    }

    u.input_vars = detail::state_snapshot(state, units);
    u.round_states.push_back(u.input_vars);

    int sbox_count = 0;
    int lin_count = 0;
    for (int r = 0; r < rounds; ++r) {
        for (int p = units; p < width; ++p) state[static_cast<std::size_t>(p)] = zero;
        const auto& layers = spec.rounds[static_cast<std::size_t>(r) %
                                         spec.rounds.size()];
        for (const Layer& layer : layers) {
            switch (layer.kind) {
                case LayerKind::sbox: {
                    const auto& sl = layer.sbox;
                    const SBoxTable& table = spec.sboxes.at(sl.sbox_name);
                    const InequalitySet& ineqs = sbox_ineqs.at(sl.sbox_name);
                    // gather all inputs before any instance writes its output
                    std::vector<std::vector<int>> ins(sl.in_groups.size());
                    for (std::size_t g = 0; g < sl.in_groups.size(); ++g)
                        for (int pos : sl.in_groups[g])
                            ins[g].push_back(state[static_cast<std::size_t>(pos)]);
                    for (std::size_t g = 0; g < sl.in_groups.size(); ++g) {
                        const std::string id = std::to_string(sbox_count++);
                        int act = u.model.add_binary("S" + id);
                        std::vector<int> outs;
                        for (int b = 0; b < table.out_bits; ++b)
                            outs.push_back(
                                u.model.add_binary("y" + id + "_" + std::to_string(b)));
                        detail::emit_sbox_bits(ins[g], outs, act, ineqs, table, opt,
                                               u.model);
                        for (std::size_t b = 0; b < outs.size(); ++b)
                            state[static_cast<std::size_t>(sl.out_groups[g][b])] = outs[b];
                        u.activity_vars.push_back(act);
                        u.sbox_uses.push_back({sl.sbox_name, r, ins[g], outs, act});
                    }
                    break;
                }
                case LayerKind::pbox:
                    detail::apply_pbox(layer.pbox, state);
                    break;
                case LayerKind::linear: {
                    const auto& ll = layer.linear;
                    std::vector<int> in_vars, out_vars;
                    for (int pos : ll.in_positions)
                        in_vars.push_back(state[static_cast<std::size_t>(pos)]);
                    const std::string id = std::to_string(lin_count++);
                    for (std::size_t k = 0; k < ll.out_positions.size(); ++k)
                        out_vars.push_back(
                            u.model.add_binary("z" + id + "_" + std::to_string(k)));
                    matrix_to_xor_layer(ll.matrix, in_vars, out_vars, opt.xor_style,
                                        u.model);
                    for (std::size_t k = 0; k < ll.out_positions.size(); ++k)
                        state[static_cast<std::size_t>(ll.out_positions[k])] = out_vars[k];
                    break;
                }
            }
        }
        u.round_states.push_back(detail::state_snapshot(state, units));
    }
    u.output_vars = u.round_states.back();
    detail::add_nontrivial_input(u.input_vars, u.model);
    detail::set_activity_objective(u.activity_vars, u.model);
    return u;
}

inline UnrolledModel generate_word_model(const CipherSpec& spec, int rounds) {
    validate_spec(spec);
    if (spec.mode != SpecMode::word)
        throw std::invalid_argument("word-level model needs a word-mode description");
    if (rounds < 1) throw std::invalid_argument("round count must be positive");

    UnrolledModel u;
    u.spec = spec;
    u.rounds = rounds;
    const int units = spec.units();
    const int width = spec.width();

    std::vector<int> state(static_cast<std::size_t>(width), -1);
    for (int p = 0; p < units; ++p)
        state[static_cast<std::size_t>(p)] = u.model.add_binary("x" + std::to_string(p));
    int zero = -1;
    if (spec.scratch > 0) {
        zero = u.model.add_binary("zero");
        u.model.fix(zero, 0);
    }

    u.input_vars = detail::state_snapshot(state, units);
    u.round_states.push_back(u.input_vars);

    int lin_count = 0;
    for (int r = 0; r < rounds; ++r) {
        for (int p = units; p < width; ++p) state[static_cast<std::size_t>(p)] = zero;
        const auto& layers = spec.rounds[static_cast<std::size_t>(r) %
                                         spec.rounds.size()];
        for (const Layer& layer : layers) {
            switch (layer.kind) {
                case LayerKind::sbox: {
                    const auto& sl = layer.sbox;
                    // a word-level s-box preserves activity: output wire is
                    // the input wire, the wire itself is the indicator
                    for (std::size_t g = 0; g < sl.in_groups.size(); ++g) {
                        int wire = state[static_cast<std::size_t>(sl.in_groups[g][0])];
                        u.activity_vars.push_back(wire);
                        u.sbox_uses.push_back({sl.sbox_name, r, {wire}, {wire}, wire});
                        state[static_cast<std::size_t>(sl.out_groups[g][0])] = wire;
                    }
                    break;
                }
                case LayerKind::pbox:
                    detail::apply_pbox(layer.pbox, state);
                    break;
                case LayerKind::linear: {
                    const auto& ll = layer.linear;
                    std::vector<int> in_vars, out_vars;
                    for (int pos : ll.in_positions)
                        in_vars.push_back(state[static_cast<std::size_t>(pos)]);
                    const std::string id = std::to_string(lin_count++);
                    for (std::size_t k = 0; k < ll.out_positions.size(); ++k)
                        out_vars.push_back(
                            u.model.add_binary("z" + id + "_" + std::to_string(k)));
                    int d = u.model.add_binary("ld" + id);
                    std::vector<MilpTerm> branch;
                    for (int v : in_vars) branch.push_back({v, 1});
                    for (int v : out_vars) branch.push_back({v, 1});
                    branch.push_back({d, -ll.branch_number});
                    u.model.add_ge(std::move(branch), 0);
                    for (int v : in_vars) u.model.add_ge({{d, 1}, {v, -1}}, 0);
                    for (int v : out_vars) u.model.add_ge({{d, 1}, {v, -1}}, 0);
                    for (std::size_t k = 0; k < ll.out_positions.size(); ++k)
                        state[static_cast<std::size_t>(ll.out_positions[k])] = out_vars[k];
                    break;
                }
            }
        }
        u.round_states.push_back(detail::state_snapshot(state, units));
    }
    u.output_vars = u.round_states.back();
    detail::add_nontrivial_input(u.input_vars, u.model);
    detail::set_activity_objective(u.activity_vars, u.model);
    return u;
}

struct DecodedTrail {
    std::vector<std::string> round_states;  // rounds+1 entries, input first
    int active_sboxes = 0;
    // exact log2 of the trail probability at bit granularity (sum of the
    // per-s-box transition probabilities); 0 at word granularity where only
    // the activity count is known
    double log2_probability = 0.0;
};

namespace detail {

inline std::string format_state(const std::vector<int>& wires,
                                const std::vector<long long>& assignment,
                                SpecMode mode) {
    std::string out;
    if (mode == SpecMode::word || wires.size() % 4 != 0) {
        for (int w : wires)
            out += assignment[static_cast<std::size_t>(w)] ? '1' : '0';
        return out;
    }
    for (std::size_t k = 0; k < wires.size(); k += 4) {
        int v = 0;
        for (std::size_t b = 0; b < 4; ++b)
            v = (v << 1) | static_cast<int>(
                               assignment[static_cast<std::size_t>(wires[k + b])]);
        out += "0123456789abcdef"[v];
    }
    return out;
}

}  // namespace detail

/// Reads a solver assignment back into per-round difference states.  At bit
/// granularity every s-box transition is checked against the difference
/// distribution table; an impossible transition means the model and the
/// table disagree and raises logic_error.
inline DecodedTrail decode_assignment(const UnrolledModel& u,
                                      const std::vector<long long>& assignment) {
    if (assignment.size() != u.model.variables().size())
        throw std::length_error("assignment size does not match the model");
    DecodedTrail t;
    for (const auto& snap : u.round_states)
        t.round_states.push_back(detail::format_state(snap, assignment, u.spec.mode));
    for (int v : u.activity_vars)
        t.active_sboxes += static_cast<int>(assignment[static_cast<std::size_t>(v)]);
    if (u.spec.mode != SpecMode::bit) return t;

    std::map<std::string, Ddt> ddts;
    for (const auto& use : u.sbox_uses) {
        auto it = ddts.find(use.sbox_name);
        if (it == ddts.end())
            it = ddts.emplace(use.sbox_name,
                              compute_ddt(u.spec.sboxes.at(use.sbox_name)))
                     .first;
        unsigned dx = 0, dy = 0;
        for (int v : use.in_vars)
            dx = (dx << 1) | static_cast<unsigned>(
                                 assignment[static_cast<std::size_t>(v)]);
        for (int v : use.out_vars)
            dy = (dy << 1) | static_cast<unsigned>(
                                 assignment[static_cast<std::size_t>(v)]);
        if (dx == 0 && dy == 0) continue;
        int count = it->second.counts[dx][dy];
        if (count <= 0)
            throw std::logic_error("assignment uses an impossible s-box transition");
        t.log2_probability +=
            std::log2(static_cast<double>(count)) -
            static_cast<double>(u.spec.sboxes.at(use.sbox_name).in_bits);
    }
    return t;
}

/// log2 of the single best non-trivial transition probability of an s-box;
/// active-count lower bounds convert to probability bounds through it.
inline double max_transition_log2(const SBoxTable& s) {
    Ddt ddt = compute_ddt(s);
    int best = 0;
    for (std::size_t dx = 1; dx < ddt.counts.size(); ++dx)
        for (std::size_t dy = 1; dy < ddt.counts[dx].size(); ++dy)
            best = std::max(best, ddt.counts[dx][dy]);
    if (best == 0) return 0.0;
    return std::log2(static_cast<double>(best)) - static_cast<double>(s.in_bits);
}

}  // namespace difftrail
