#pragma once
// MILP models for XOR gates and matrix-defined linear layers.
//
// Two exact bit-level XOR encodings are provided:
//   * hull:   2^n inequalities over the n+1 difference variables of an
//             n-input gate (one cut per odd-parity vertex, each at Hamming
//             distance >= 1 from every even-parity solution);
//   * parity: a single equality sum(vars) = 2*d with one bounded integer
//             dummy d, regardless of fan-in.
// Binary-matrix layers (MixColumn-style) expand row by row into XOR gates.
// The classic word-level XOR model is also included; it is inexact at the
// bit level (it admits the all-ones assignment) and is used for word-mode
// ciphers and as a contrast fixture in tests.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "difftrail/bits.hpp"
#include "difftrail/milp.hpp"
#include "difftrail/polytope.hpp"
#include "difftrail/sbox.hpp"

namespace difftrail {

enum class XorStyle { hull, parity };

inline const char* to_string(XorStyle s) {
    return s == XorStyle::hull ? "hull" : "parity";
}

// One n-input XOR gate over already-created binary difference variables.
struct XorGate {
    std::vector<int> input_vars;
    int output_var = -1;

    std::size_t fan_in() const { return input_vars.size(); }
};

// Row-major 0/1 matrix describing a GF(2)-linear layer (out = M * in).
struct BinaryMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> bits;  // rows*cols entries, row-major

    bool at(std::size_t r, std::size_t c) const { return bits[r * cols + c] != 0; }
};

inline void validate_matrix(const BinaryMatrix& m) {
    if (m.bits.size() != m.rows * m.cols)
        throw std::invalid_argument("binary matrix storage does not match stated dimensions");
    for (std::uint8_t b : m.bits)
        if (b > 1) throw std::invalid_argument("binary matrix entry not 0/1");
}

namespace detail {

// All handles distinct, present in the model, and binary.
inline void validate_gate(const XorGate& g, const MilpModel& model) {
    if (g.fan_in() < 2) throw std::invalid_argument("xor gate needs fan-in >= 2");
    std::vector<int> all = g.input_vars;
    all.push_back(g.output_var);
    for (std::size_t i = 0; i < all.size(); ++i) {
        int v = all[i];
        if (v < 0 || static_cast<std::size_t>(v) >= model.variables().size())
            throw std::invalid_argument("xor gate references unknown variable");
        if (model.variables()[static_cast<std::size_t>(v)].kind != VarKind::binary)
            throw std::invalid_argument("xor gate variables must be binary");
        for (std::size_t j = i + 1; j < all.size(); ++j)
            if (all[j] == v) throw std::invalid_argument("xor gate variables must be distinct");
    }
}

// One inequality per odd-parity point p of {0,1}^dim: coefficient +1 where
// p has a 0, -1 where it has a 1, right side 1 - popcount(p).  The left side
// equals the Hamming distance to p, so exactly the single point p is cut and
// every even-parity point survives.
inline InequalitySet odd_parity_cuts(int dim) {
    InequalitySet out;
    out.dim = dim;
    for (std::size_t p = 0; p < (std::size_t{1} << dim); ++p) {
        BitVec bits = point_from_index(p, dim);
        if (popcount_vec(bits) % 2 == 0) continue;
        LinearInequality q;
        q.coeffs.resize(static_cast<std::size_t>(dim));
        long long ones = 0;
        for (int i = 0; i < dim; ++i) {
            q.coeffs[static_cast<std::size_t>(i)] = bits[static_cast<std::size_t>(i)] ? -1 : 1;
            ones += bits[static_cast<std::size_t>(i)];
        }
        q.rhs = 1 - ones;
        out.items.push_back(std::move(q));
    }
    std::sort(out.items.begin(), out.items.end());
    return out;
}

// Emits one XOR model (chosen style) over vars = inputs + [output].
// Works for any fan-in >= 1; fan-in 1 degenerates to difference equality.
inline void emit_xor(const std::vector<int>& vars, XorStyle style, MilpModel& model,
                     const std::string& dummy_name) {
    if (style == XorStyle::hull) {
        InequalitySet cuts = odd_parity_cuts(static_cast<int>(vars.size()));
        for (const auto& q : cuts.items) {
            std::vector<MilpTerm> terms;
            terms.reserve(vars.size());
            for (std::size_t i = 0; i < vars.size(); ++i)
                terms.push_back({vars[i], q.coeffs[i]});
            model.add_ge(std::move(terms), q.rhs);
        }
    } else {
        long long hi = static_cast<long long>(vars.size()) / 2;
        int d = model.add_integer(dummy_name, 0, hi);
        std::vector<MilpTerm> terms;
        terms.reserve(vars.size() + 1);
        for (int v : vars) terms.push_back({v, 1});
        terms.push_back({d, -2});
        model.add_eq(std::move(terms), 0);
    }
}

}  // namespace detail

// DDT of an n-input XOR gate: input difference i always maps to parity(i),
// so row i holds 2^n in the parity(i) column and 0 in the other.
inline Ddt xor_ddt(int n) {
    if (n < 2 || n > 8) throw std::out_of_range("xor fan-in must be in [2,8]");
    Ddt d;
    d.in_bits = n;
    d.out_bits = 1;
    const std::size_t rows = std::size_t{1} << n;
    d.counts.assign(rows, std::vector<int>(2, 0));
    for (std::size_t i = 0; i < rows; ++i) {
        int parity = 0;
        for (std::size_t b = i; b; b &= b - 1) parity ^= 1;
        d.counts[i][static_cast<std::size_t>(parity)] = static_cast<int>(rows);
    }
    return d;
}

// Minimal exact inequality description of an n-input XOR gate over its n+1
// binary difference variables: 2^n inequalities whose 0/1 solutions are
// exactly the even-parity vectors.
inline InequalitySet xor_hull_model(int n) {
    if (n < 2 || n > 7) throw std::out_of_range("xor fan-in must be in [2,7]");
    return detail::odd_parity_cuts(n + 1);
}

// Handles created by the parity-style model of one gate.
struct XorParityHandles {
    int dummy_var = -1;
    std::size_t constraint_index = 0;
};

// Exact single-constraint model: sum of all n+1 difference variables equals
// 2*d for an integer dummy d in [0, floor((n+1)/2)].  Adds exactly one
// variable and one constraint.  Modeling the same gate twice is rejected
// (the dummy name is derived from the output variable).
inline XorParityHandles xor_parity_model(const XorGate& gate, MilpModel& model) {
    detail::validate_gate(gate, model);
    std::vector<int> vars = gate.input_vars;
    vars.push_back(gate.output_var);
    std::string dn =
        "xd_" + model.variables()[static_cast<std::size_t>(gate.output_var)].name;
    detail::emit_xor(vars, XorStyle::parity, model, dn);
    XorParityHandles h;
    h.dummy_var = static_cast<int>(model.variables().size()) - 1;
    h.constraint_index = model.constraints().size() - 1;
    return h;
}

// Hull-style model of one gate: 2^n inequality constraints, no new variables.
inline void xor_hull_constraints(const XorGate& gate, MilpModel& model) {
    detail::validate_gate(gate, model);
    std::vector<int> vars = gate.input_vars;
    vars.push_back(gate.output_var);
    detail::emit_xor(vars, XorStyle::hull, model, "");
}

// Expands a binary-matrix layer into per-output-bit XOR models.  Output bits
// with an all-zero row are fixed to zero; weight-1 rows degenerate to
// equality of the two difference bits.
inline void matrix_to_xor_layer(const BinaryMatrix& m, const std::vector<int>& in_vars,
                                const std::vector<int>& out_vars, XorStyle style,
                                MilpModel& model) {
    validate_matrix(m);
    if (m.rows != out_vars.size() || m.cols != in_vars.size())
        throw std::length_error("matrix dimensions do not match variable counts");
    for (std::size_t r = 0; r < m.rows; ++r) {
        std::vector<int> vars;
        for (std::size_t c = 0; c < m.cols; ++c)
            if (m.at(r, c)) vars.push_back(in_vars[c]);
        if (vars.empty()) {
            model.fix(out_vars[r], 0);
            continue;
        }
        vars.push_back(out_vars[r]);
        std::string dn =
            "xd_" + model.variables()[static_cast<std::size_t>(out_vars[r])].name;
        detail::emit_xor(vars, style, model, dn);
    }
}

// Classic word-level XOR model (one dummy binary d):
//   u + v + y >= 2d,  d >= u,  d >= v,  d >= y.
// Over bits this admits the odd assignment u = v = y = 1, i.e. it is not an
// exact gate model; the parity model excludes it.
inline int word_xor_model(int u, int v, int y, MilpModel& model) {
    std::string dn = "wd_" + model.variables()[static_cast<std::size_t>(y)].name;
    int d = model.add_binary(dn);
    model.add_ge({{u, 1}, {v, 1}, {y, 1}, {d, -2}}, 0);
    model.add_ge({{d, 1}, {u, -1}}, 0);
    model.add_ge({{d, 1}, {v, -1}}, 0);
    model.add_ge({{d, 1}, {y, -1}}, 0);
    return d;
}

// Rotational XOR benchmark network: width-bit rows u_0..u_rounds with
//   u_{r+1,i} = u_{r,i} ^ u_{r,i+1} ^ ... ^ u_{r,i+n-1}   (indices mod width).
// rounds=200, width=16 gives the 3200-gate stress model.
inline MilpModel xor_stress_network(int n, int rounds = 200, int width = 16,
                                    XorStyle style = XorStyle::parity) {
    if (n < 2 || n > 7) throw std::out_of_range("xor fan-in must be in [2,7]");
    if (rounds < 1 || width < n) throw std::invalid_argument("bad network shape");
    MilpModel model;
    std::vector<std::vector<int>> u(static_cast<std::size_t>(rounds) + 1);
    for (int r = 0; r <= rounds; ++r)
        for (int i = 0; i < width; ++i)
            u[static_cast<std::size_t>(r)].push_back(
                model.add_binary("u" + std::to_string(r) + "_" + std::to_string(i)));
    for (int r = 0; r < rounds; ++r)
        for (int i = 0; i < width; ++i) {
            XorGate g;
            for (int k = 0; k < n; ++k)
                g.input_vars.push_back(u[static_cast<std::size_t>(r)]
                                        [static_cast<std::size_t>((i + k) % width)]);
            g.output_var = u[static_cast<std::size_t>(r) + 1][static_cast<std::size_t>(i)];
            if (style == XorStyle::parity)
                xor_parity_model(g, model);
            else
                xor_hull_constraints(g, model);
        }
    return model;
}

}  // namespace difftrail
