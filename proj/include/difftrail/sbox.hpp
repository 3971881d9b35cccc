#pragma once

// SBox tables, difference distribution tables (DDT), and the partition of
// {0,1}^(q+r) into possible / impossible transition points.
//
// File formats:
//   SBox file: whitespace-separated hex values, one table per file.
//   DDT file:  2^q lines of 2^r decimal integers ('#' starts a comment line).

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "difftrail/bits.hpp"

namespace difftrail {

struct SBoxTable {
    int in_bits = 0;   // q
    int out_bits = 0;  // r
    std::vector<int> table;
    bool bijective = false;
};

struct Ddt {
    int in_bits = 0;
    int out_bits = 0;
    std::vector<std::vector<int>> counts;  // 2^q rows x 2^r cols
};

struct TransitionSet {
    int dim = 0;  // q + r
    int in_bits = 0;
    int out_bits = 0;
    std::vector<BitVec> possible;
    std::vector<BitVec> impossible;
};

inline bool is_power_of_two(std::size_t n) { return n && (n & (n - 1)) == 0; }

inline int log2_exact(std::size_t n) {
    int k = 0;
    while ((std::size_t{1} << k) < n) ++k;
    return k;
}

inline SBoxTable load_sbox(std::istream& in) {
    SBoxTable s;
    std::string tok;
    while (in >> tok) {
        if (tok[0] == '#') {  // comment: skip rest of line
            std::string rest;
            std::getline(in, rest);
            continue;
        }
        unsigned long v = 0;
        for (char c : tok) v = v * 16 + static_cast<unsigned long>(parse_hex_digit(c));
        if (v > 0xffu) throw std::out_of_range("sbox entry too large: " + tok);
        s.table.push_back(static_cast<int>(v));
    }
    if (s.table.empty()) throw std::invalid_argument("sbox file contains no entries");
    if (!is_power_of_two(s.table.size()))
        throw std::invalid_argument("sbox entry count is not a power of two");
    s.in_bits = log2_exact(s.table.size());
    if (s.in_bits < 1 || s.in_bits > 8)
        throw std::out_of_range("sbox input width outside 1..8 bits");
    int maxv = 0;
    for (int v : s.table) maxv = std::max(maxv, v);
    s.out_bits = 1;
    while ((1 << s.out_bits) <= maxv) ++s.out_bits;
    if (s.out_bits > 8) throw std::out_of_range("sbox output width outside 1..8 bits");
    if (s.in_bits == s.out_bits) {
        std::vector<int> seen(s.table.size(), 0);
        for (int v : s.table) seen[static_cast<std::size_t>(v)]++;
        s.bijective = true;
        for (int c : seen)
            if (c != 1) { s.bijective = false; break; }
    }
    return s;
}

inline SBoxTable load_sbox(const std::string& text) {
    std::istringstream in(text);
    return load_sbox(in);
}

inline SBoxTable make_sbox(std::vector<int> table) {
    std::ostringstream os;
    for (int v : table) os << std::hex << v << ' ';
    return load_sbox(os.str());
}

inline Ddt compute_ddt(const SBoxTable& s) {
    Ddt d;
    d.in_bits = s.in_bits;
    d.out_bits = s.out_bits;
    const std::size_t nin = std::size_t{1} << s.in_bits;
    const std::size_t nout = std::size_t{1} << s.out_bits;
    d.counts.assign(nin, std::vector<int>(nout, 0));
    for (std::size_t dx = 0; dx < nin; ++dx)
        for (std::size_t x = 0; x < nin; ++x) {
            int dy = s.table[x] ^ s.table[x ^ dx];
            d.counts[dx][static_cast<std::size_t>(dy)]++;
        }
    return d;
}

inline void validate_ddt(const Ddt& d) {
    const std::size_t nin = std::size_t{1} << d.in_bits;
    const std::size_t nout = std::size_t{1} << d.out_bits;
    if (d.counts.size() != nin) throw std::invalid_argument("ddt row count mismatch");
    const int rowsum = 1 << d.in_bits;
    for (std::size_t dx = 0; dx < nin; ++dx) {
        if (d.counts[dx].size() != nout) throw std::invalid_argument("ddt column count mismatch");
        long long sum = 0;
        for (int c : d.counts[dx]) {
            if (c < 0) throw std::invalid_argument("ddt entry negative");
            sum += c;
        }
        if (sum != rowsum) throw std::invalid_argument("ddt row sum is not 2^q");
    }
    if (d.counts[0][0] != rowsum) throw std::invalid_argument("ddt[0][0] is not 2^q");
    for (std::size_t dy = 1; dy < nout; ++dy)
        if (d.counts[0][dy] != 0) throw std::invalid_argument("ddt row 0 has nonzero off entry");
}

inline Ddt load_ddt(std::istream& in) {
    Ddt d;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t h = line.find('#');
        if (h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        std::vector<int> row;
        long long v;
        while (ls >> v) {
            if (v < 0 || v > (1 << 16)) throw std::out_of_range("ddt entry out of range");
            row.push_back(static_cast<int>(v));
        }
        if (!row.empty()) d.counts.push_back(std::move(row));
    }
    if (d.counts.empty()) throw std::invalid_argument("ddt file contains no rows");
    if (!is_power_of_two(d.counts.size()))
        throw std::invalid_argument("ddt row count is not a power of two");
    d.in_bits = log2_exact(d.counts.size());
    if (!is_power_of_two(d.counts[0].size()))
        throw std::invalid_argument("ddt column count is not a power of two");
    d.out_bits = log2_exact(d.counts[0].size());
    validate_ddt(d);
    return d;
}

inline Ddt load_ddt(const std::string& text) {
    std::istringstream in(text);
    return load_ddt(in);
}

inline void write_ddt(std::ostream& out, const Ddt& d) {
    for (const auto& row : d.counts) {
        for (std::size_t j = 0; j < row.size(); ++j)
            out << row[j] << (j + 1 < row.size() ? " " : "");
        out << '\n';
    }
}

inline TransitionSet transition_sets(const Ddt& d) {
    TransitionSet t;
    t.in_bits = d.in_bits;
    t.out_bits = d.out_bits;
    t.dim = d.in_bits + d.out_bits;
    const std::size_t nin = std::size_t{1} << d.in_bits;
    const std::size_t nout = std::size_t{1} << d.out_bits;
    for (std::size_t dx = 0; dx < nin; ++dx)
        for (std::size_t dy = 0; dy < nout; ++dy) {
            BitVec v = point_from_pair(static_cast<unsigned>(dx), static_cast<unsigned>(dy),
                                       d.in_bits, d.out_bits);
            if (d.counts[dx][dy] > 0)
                t.possible.push_back(std::move(v));
            else
                t.impossible.push_back(std::move(v));
        }
    return t;
}

}  // namespace difftrail
