#pragma once

// Solver-agnostic MILP intermediate representation, an exact branch-and-bound
// solver over binary / bounded-integer variables, and textual LP export.
//
// The solver is pure integer arithmetic: DFS with bounds propagation to a
// fixpoint at every node, branching on the most-constrained free binary
// (static occurrence count, lowest index on ties, 0-branch first). A minimize
// objective is enforced through an internal cut constraint whose upper bound
// tightens to (incumbent - 1) whenever a new incumbent is found, so the
// propagation engine prunes against the objective like any other row.

#include <algorithm>
#include <chrono>
#include <climits>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace difftrail {

enum class VarKind { binary, integer_range };

struct MilpVariable {
    std::string name;
    VarKind kind = VarKind::binary;
    long long lo = 0, hi = 1;
};

struct MilpTerm {
    int var = 0;
    long long coeff = 0;
};

enum class ConstraintSense { ge, le, eq };

struct MilpConstraint {
    std::vector<MilpTerm> terms;
    ConstraintSense sense = ConstraintSense::ge;
    long long rhs = 0;
};

class MilpModel {
public:
    int add_binary(const std::string& name) { return add_var(name, VarKind::binary, 0, 1); }

    int add_integer(const std::string& name, long long lo, long long hi) {
        if (lo > hi) throw std::invalid_argument("integer variable with lo > hi: " + name);
        return add_var(name, VarKind::integer_range, lo, hi);
    }

    void add_constraint(std::vector<MilpTerm> terms, ConstraintSense sense, long long rhs) {
        if (terms.empty()) throw std::invalid_argument("constraint with no terms");
        for (const auto& t : terms) check_var(t.var);
        cons_.push_back({std::move(terms), sense, rhs});
    }
    void add_ge(std::vector<MilpTerm> t, long long rhs) { add_constraint(std::move(t), ConstraintSense::ge, rhs); }
    void add_le(std::vector<MilpTerm> t, long long rhs) { add_constraint(std::move(t), ConstraintSense::le, rhs); }
    void add_eq(std::vector<MilpTerm> t, long long rhs) { add_constraint(std::move(t), ConstraintSense::eq, rhs); }

    void set_objective_min(std::vector<MilpTerm> terms) {
        for (const auto& t : terms) check_var(t.var);
        objective_ = std::move(terms);
    }

    /// Drop the objective; the model becomes a pure feasibility problem.
    void clear_objective() { objective_.reset(); }

    void fix(int var, long long value) { add_eq({{var, 1}}, value); }

    const std::vector<MilpVariable>& variables() const { return vars_; }
    const std::vector<MilpConstraint>& constraints() const { return cons_; }
    const std::optional<std::vector<MilpTerm>>& objective() const { return objective_; }
    int num_vars() const { return static_cast<int>(vars_.size()); }
    std::size_t num_constraints() const { return cons_.size(); }

    int find_var(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? -1 : it->second;
    }

private:
    int add_var(const std::string& name, VarKind kind, long long lo, long long hi) {
        if (!index_.emplace(name, static_cast<int>(vars_.size())).second)
            throw std::invalid_argument("duplicate variable name: " + name);
        vars_.push_back({name, kind, lo, hi});
        return static_cast<int>(vars_.size()) - 1;
    }
    void check_var(int v) const {
        if (v < 0 || v >= static_cast<int>(vars_.size()))
            throw std::out_of_range("constraint references unknown variable");
    }

    std::vector<MilpVariable> vars_;
    std::vector<MilpConstraint> cons_;
    std::optional<std::vector<MilpTerm>> objective_;
    std::unordered_map<std::string, int> index_;
};

enum class SolveStatus { optimal, feasible_budget, infeasible, unbounded_guard };

struct SolveResult {
    SolveStatus status = SolveStatus::infeasible;
    std::optional<long long> objective_value;
    std::optional<std::vector<long long>> assignment;  // indexed by variable
    long long nodes = 0;
    std::chrono::duration<double> wall_time{0};
};

// budget expired before any feasible point or an infeasibility proof
struct BudgetExhausted : std::runtime_error {
    BudgetExhausted() : std::runtime_error("solve budget exhausted with no incumbent") {}
};

inline long long probability_bound(long long mdp_log2, long long active) {
    if (active < 0) throw std::invalid_argument("active count must be non-negative");
    return mdp_log2 * active;
}

namespace detail {

inline long long floor_div(long long p, long long q) {
    long long d = p / q, r = p % q;
    return (r != 0 && ((r < 0) != (q < 0))) ? d - 1 : d;
}
inline long long ceil_div(long long p, long long q) {
    long long d = p / q, r = p % q;
    return (r != 0 && ((r < 0) == (q < 0))) ? d + 1 : d;
}

class BnbSolver {
    static constexpr long long kNegInf = LLONG_MIN;
    static constexpr long long kPosInf = LLONG_MAX;

public:
    BnbSolver(const MilpModel& m, std::chrono::duration<double> budget) : model_(m) {
        deadline_ = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(budget);
        const int nv = m.num_vars();
        dlo_.resize(nv);
        dhi_.resize(nv);
        for (int v = 0; v < nv; ++v) {
            dlo_[v] = m.variables()[static_cast<std::size_t>(v)].lo;
            dhi_[v] = m.variables()[static_cast<std::size_t>(v)].hi;
        }
        for (const auto& c : m.constraints()) add_row(c.terms, c.sense, c.rhs);
        if (m.objective()) {
            obj_row_ = static_cast<int>(rows_.size());
            add_row(*m.objective(), ConstraintSense::le, 0);
            row_hi_[static_cast<std::size_t>(obj_row_)] = kPosInf;  // tightened per incumbent
        }
        occ_.resize(static_cast<std::size_t>(nv));
        for (std::size_t r = 0; r < rows_.size(); ++r)
            for (const auto& t : rows_[r])
                occ_[static_cast<std::size_t>(t.var)].push_back({static_cast<int>(r), t.coeff});
        // static branch order: binaries by descending model-constraint degree
        std::vector<std::size_t> degree(static_cast<std::size_t>(nv), 0);
        for (const auto& c : m.constraints())
            for (const auto& t : c.terms) ++degree[static_cast<std::size_t>(t.var)];
        for (int v = 0; v < nv; ++v)
            if (m.variables()[static_cast<std::size_t>(v)].kind == VarKind::binary)
                order_.push_back(v);
        std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
            return degree[static_cast<std::size_t>(a)] > degree[static_cast<std::size_t>(b)];
        });
        for (int v = 0; v < nv; ++v)
            if (m.variables()[static_cast<std::size_t>(v)].kind != VarKind::binary)
                order_.push_back(v);
        in_queue_.assign(rows_.size(), 0);
        init_activities();
    }

    SolveResult run() {
        auto t0 = std::chrono::steady_clock::now();
        SolveResult res;
        for (std::size_t r = 0; r < rows_.size(); ++r) enqueue(static_cast<int>(r));
        bool root_ok = propagate();
        if (root_ok) dfs(0);
        res.nodes = nodes_;
        res.wall_time = std::chrono::steady_clock::now() - t0;
        const bool has_obj = model_.objective().has_value();
        if (best_) {
            if (has_obj) res.objective_value = best_value_;
            res.assignment = best_;
            res.status = timed_out_ ? SolveStatus::feasible_budget : SolveStatus::optimal;
            if (!has_obj) res.status = SolveStatus::optimal;  // plain feasibility
            return res;
        }
        if (timed_out_) throw BudgetExhausted();
        res.status = SolveStatus::infeasible;
        return res;
    }

private:
    void add_row(const std::vector<MilpTerm>& terms, ConstraintSense sense, long long rhs) {
        std::vector<MilpTerm> kept;  // zero coefficients would break bound division
        kept.reserve(terms.size());
        for (const auto& t : terms)
            if (t.coeff != 0) kept.push_back(t);
        rows_.push_back(std::move(kept));
        switch (sense) {
            case ConstraintSense::ge: row_lo_.push_back(rhs); row_hi_.push_back(kPosInf); break;
            case ConstraintSense::le: row_lo_.push_back(kNegInf); row_hi_.push_back(rhs); break;
            case ConstraintSense::eq: row_lo_.push_back(rhs); row_hi_.push_back(rhs); break;
        }
    }

    static long long contrib_min(long long a, long long lo, long long hi) {
        return a > 0 ? a * lo : a * hi;
    }
    static long long contrib_max(long long a, long long lo, long long hi) {
        return a > 0 ? a * hi : a * lo;
    }

    void init_activities() {
        min_act_.assign(rows_.size(), 0);
        max_act_.assign(rows_.size(), 0);
        for (std::size_t r = 0; r < rows_.size(); ++r)
            for (const auto& t : rows_[r]) {
                min_act_[r] += contrib_min(t.coeff, dlo_[static_cast<std::size_t>(t.var)],
                                           dhi_[static_cast<std::size_t>(t.var)]);
                max_act_[r] += contrib_max(t.coeff, dlo_[static_cast<std::size_t>(t.var)],
                                           dhi_[static_cast<std::size_t>(t.var)]);
            }
    }

    void enqueue(int r) {
        if (!in_queue_[static_cast<std::size_t>(r)]) {
            in_queue_[static_cast<std::size_t>(r)] = 1;
            queue_.push_back(r);
        }
    }

    // narrow variable v to [lo, hi]; false on empty domain
    bool set_bounds(int v, long long lo, long long hi) {
        long long olo = dlo_[static_cast<std::size_t>(v)], ohi = dhi_[static_cast<std::size_t>(v)];
        lo = std::max(lo, olo);
        hi = std::min(hi, ohi);
        if (lo == olo && hi == ohi) return true;
        if (lo > hi) return false;
        trail_.push_back({v, olo, ohi});
        dlo_[static_cast<std::size_t>(v)] = lo;
        dhi_[static_cast<std::size_t>(v)] = hi;
        for (const auto& [r, a] : occ_[static_cast<std::size_t>(v)]) {
            min_act_[static_cast<std::size_t>(r)] +=
                contrib_min(a, lo, hi) - contrib_min(a, olo, ohi);
            max_act_[static_cast<std::size_t>(r)] +=
                contrib_max(a, lo, hi) - contrib_max(a, olo, ohi);
            enqueue(r);
        }
        return true;
    }

    void undo_to(std::size_t mark) {
        while (trail_.size() > mark) {
            auto [v, olo, ohi] = trail_.back();
            trail_.pop_back();
            long long lo = dlo_[static_cast<std::size_t>(v)], hi = dhi_[static_cast<std::size_t>(v)];
            dlo_[static_cast<std::size_t>(v)] = olo;
            dhi_[static_cast<std::size_t>(v)] = ohi;
            for (const auto& [r, a] : occ_[static_cast<std::size_t>(v)]) {
                min_act_[static_cast<std::size_t>(r)] +=
                    contrib_min(a, olo, ohi) - contrib_min(a, lo, hi);
                max_act_[static_cast<std::size_t>(r)] +=
                    contrib_max(a, olo, ohi) - contrib_max(a, lo, hi);
            }
        }
    }

    void clear_queue() {
        for (int r : queue_) in_queue_[static_cast<std::size_t>(r)] = 0;
        queue_.clear();
    }

    bool propagate() {
        while (!queue_.empty()) {
            int r = queue_.back();
            queue_.pop_back();
            in_queue_[static_cast<std::size_t>(r)] = 0;
            const std::size_t ri = static_cast<std::size_t>(r);
            long long lo = row_lo_[ri], hi = row_hi_[ri];
            if ((hi != kPosInf && min_act_[ri] > hi) || (lo != kNegInf && max_act_[ri] < lo)) {
                clear_queue();
                return false;
            }
            for (const auto& t : rows_[ri]) {
                const std::size_t v = static_cast<std::size_t>(t.var);
                if (dlo_[v] == dhi_[v]) continue;
                long long cmin = contrib_min(t.coeff, dlo_[v], dhi_[v]);
                long long cmax = contrib_max(t.coeff, dlo_[v], dhi_[v]);
                long long rest_min = min_act_[ri] - cmin;
                long long rest_max = max_act_[ri] - cmax;
                long long new_lo = kNegInf, new_hi = kPosInf;
                if (hi != kPosInf) {  // a*x <= hi - rest_min
                    long long u = hi - rest_min;
                    if (t.coeff > 0) new_hi = floor_div(u, t.coeff);
                    else new_lo = ceil_div(u, t.coeff);
                }
                if (lo != kNegInf) {  // a*x >= lo - rest_max
                    long long l = lo - rest_max;
                    if (t.coeff > 0) new_lo = std::max(new_lo, ceil_div(l, t.coeff));
                    else new_hi = std::min(new_hi, floor_div(l, t.coeff));
                }
                long long use_lo = new_lo == kNegInf ? dlo_[v] : new_lo;
                long long use_hi = new_hi == kPosInf ? dhi_[v] : new_hi;
                if (!set_bounds(t.var, use_lo, use_hi)) {
                    clear_queue();
                    return false;
                }
            }
        }
        return true;
    }

    bool out_of_time() {
        if (timed_out_) return true;
        if ((nodes_ & 255) == 0 && std::chrono::steady_clock::now() >= deadline_)
            timed_out_ = true;
        return timed_out_;
    }

    bool all_fixed() const {
        for (std::size_t v = 0; v < dlo_.size(); ++v)
            if (dlo_[v] != dhi_[v]) return false;
        return true;
    }

    // exact re-check of the original model at a fully fixed point
    bool check_solution() const {
        for (const auto& c : model_.constraints()) {
            long long s = 0;
            for (const auto& t : c.terms) s += t.coeff * dlo_[static_cast<std::size_t>(t.var)];
            switch (c.sense) {
                case ConstraintSense::ge: if (s < c.rhs) return false; break;
                case ConstraintSense::le: if (s > c.rhs) return false; break;
                case ConstraintSense::eq: if (s != c.rhs) return false; break;
            }
        }
        return true;
    }

    void record_solution() {
        if (!check_solution()) return;  // defensive: propagation bug guard
        if (model_.objective()) {
            long long value = 0;
            for (const auto& t : *model_.objective())
                value += t.coeff * dlo_[static_cast<std::size_t>(t.var)];
            if (!best_ || value < best_value_) {
                best_ = std::vector<long long>(dlo_);
                best_value_ = value;
                row_hi_[static_cast<std::size_t>(obj_row_)] = value - 1;  // global cut
                enqueue(obj_row_);
            }
        } else {
            best_ = std::vector<long long>(dlo_);
            stop_ = true;  // plain feasibility: first solution suffices
        }
    }

    void dfs(int order_hint) {
        ++nodes_;
        if (out_of_time() || stop_) return;
        int branch = -1;
        for (std::size_t i = static_cast<std::size_t>(order_hint); i < order_.size(); ++i) {
            int v = order_[i];
            if (dlo_[static_cast<std::size_t>(v)] != dhi_[static_cast<std::size_t>(v)]) {
                branch = static_cast<int>(i);
                break;
            }
        }
        if (branch < 0) {
            if (all_fixed()) record_solution();
            return;
        }
        const int v = order_[static_cast<std::size_t>(branch)];
        const long long lo = dlo_[static_cast<std::size_t>(v)];
        const long long hi = dhi_[static_cast<std::size_t>(v)];
        // first child: v = lo; second child: v in [lo+1, hi]
        for (int child = 0; child < 2; ++child) {
            std::size_t mark = trail_.size();
            bool ok = child == 0 ? set_bounds(v, lo, lo) : set_bounds(v, lo + 1, hi);
            if (ok && propagate())
                dfs(child == 0 ? branch + 1 : branch);
            else
                clear_queue();
            undo_to(mark);
            if (timed_out_ || stop_) return;
        }
    }

    const MilpModel& model_;
    std::vector<std::vector<MilpTerm>> rows_;
    std::vector<long long> row_lo_, row_hi_;
    std::vector<std::vector<std::pair<int, long long>>> occ_;
    std::vector<long long> dlo_, dhi_, min_act_, max_act_;
    std::vector<int> order_, queue_;
    std::vector<char> in_queue_;
    struct Change { int var; long long old_lo, old_hi; };
    std::vector<Change> trail_;
    int obj_row_ = -1;
    long long nodes_ = 0;
    bool timed_out_ = false, stop_ = false;
    std::optional<std::vector<long long>> best_;
    long long best_value_ = 0;
    std::chrono::steady_clock::time_point deadline_;
};

}  // namespace detail

inline SolveResult solve(const MilpModel& m,
                         std::chrono::duration<double> budget = std::chrono::minutes(30)) {
    if (m.num_vars() == 0) {
        // empty model: vacuously feasible
        SolveResult res;
        res.status = SolveStatus::optimal;
        if (m.objective()) res.objective_value = 0;
        res.assignment = std::vector<long long>{};
        return res;
    }
    detail::BnbSolver solver(m, budget);
    return solver.run();
}

// ---- LP-format export (CPLEX dialect), byte-stable ----

inline std::string export_lp(const MilpModel& m) {
    std::ostringstream os;
    auto term_str = [&](const std::vector<MilpTerm>& terms) {
        std::ostringstream t;
        for (const auto& [v, a] : terms) {
            if (a == 0) continue;
            t << (a < 0 ? " -" : " +") << (a < 0 ? -a : a) << ' '
              << m.variables()[static_cast<std::size_t>(v)].name;
        }
        return t.str();
    };
    os << "Minimize\n obj:";
    if (m.objective()) os << term_str(*m.objective());
    os << "\nSubject To\n";
    std::size_t ci = 0;
    for (const auto& c : m.constraints()) {
        os << " c" << ci++ << ':' << term_str(c.terms);
        switch (c.sense) {
            case ConstraintSense::ge: os << " >= "; break;
            case ConstraintSense::le: os << " <= "; break;
            case ConstraintSense::eq: os << " = "; break;
        }
        os << c.rhs << '\n';
    }
    bool any_int = false;
    for (const auto& v : m.variables()) any_int |= v.kind == VarKind::integer_range;
    if (any_int) {
        os << "Bounds\n";
        for (const auto& v : m.variables())
            if (v.kind == VarKind::integer_range)
                os << ' ' << v.lo << " <= " << v.name << " <= " << v.hi << '\n';
    }
    os << "Binaries\n";
    int per_line = 0;
    for (const auto& v : m.variables())
        if (v.kind == VarKind::binary) {
            os << ' ' << v.name;
            if (++per_line == 16) {
                os << '\n';
                per_line = 0;
            }
        }
    if (per_line) os << '\n';
    if (any_int) {
        os << "Generals\n";
        per_line = 0;
        for (const auto& v : m.variables())
            if (v.kind == VarKind::integer_range) {
                os << ' ' << v.name;
                if (++per_line == 16) {
                    os << '\n';
                    per_line = 0;
                }
            }
        if (per_line) os << '\n';
    }
    os << "End\n";
    return os.str();
}

}  // namespace difftrail
