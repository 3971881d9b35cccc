#pragma once
// Bundled, validated cipher descriptions: gift64, skinny64, midori64, klein,
// lilliput, mibs (bit mode) and aes_word (word mode).
//
// Position conventions (see cipher_spec.hpp): hex char k of a printed state
// occupies bit positions 4k..4k+3, MSB first.  Each cipher's own bit/cell
// numbering is translated into this labeling here, once, so every search and
// report speaks the same hex language.

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "difftrail/cipher_spec.hpp"

namespace difftrail {
namespace detail {

inline SBoxTable hex_sbox(const std::string& tokens) {
    std::istringstream in(tokens);
    return load_sbox(in);
}

// bit positions of hex char k, MSB first
inline std::vector<int> nib(int k) { return {4 * k, 4 * k + 1, 4 * k + 2, 4 * k + 3}; }

// in-place sbox layer over the given hex chars
inline Layer sbox_layer(const std::string& name, const std::vector<int>& chars) {
    Layer l;
    l.kind = LayerKind::sbox;
    l.sbox.sbox_name = name;
    for (int k : chars) l.sbox.in_groups.push_back(nib(k));
    l.sbox.out_groups = l.sbox.in_groups;
    return l;
}

// bit-level pbox from a hex-char permutation: char j moves to char dest[j]
inline Layer char_pbox(const std::vector<int>& dest) {
    Layer l;
    l.kind = LayerKind::pbox;
    l.pbox.perm.resize(dest.size() * 4);
    for (std::size_t j = 0; j < dest.size(); ++j)
        for (int t = 0; t < 4; ++t)
            l.pbox.perm[4 * j + static_cast<std::size_t>(t)] = 4 * dest[j] + t;
    return l;
}

struct MatrixBuilder {
    BinaryMatrix m;
    MatrixBuilder(std::size_t rows, std::size_t cols) {
        m.rows = rows;
        m.cols = cols;
        m.bits.assign(rows * cols, 0);
    }
    void set(std::size_t r, std::size_t c) { m.bits[r * m.cols + c] ^= 1; }
    // 4x4 identity block: out bits [4br..4br+3] ^= in bits [4bc..4bc+3]
    void nib_block(std::size_t br, std::size_t bc) {
        for (std::size_t t = 0; t < 4; ++t) set(4 * br + t, 4 * bc + t);
    }
};

// tap positions (MSB-first bit rows) of multiply-by-c in GF(2^8) mod 0x11b
inline std::vector<std::vector<int>> gf8_rowmap(int c) {
    std::vector<std::vector<int>> rows(8);
    for (int p = 0; p < 8; ++p) {
        int b = 1 << (7 - p), r = 0, k = c;
        while (k) {
            if (k & 1) r ^= b;
            k >>= 1;
            b = (b << 1) ^ ((b & 0x80) ? 0x11b : 0);
            b &= 0xff;
        }
        for (int q = 0; q < 8; ++q)
            if (r & (1 << (7 - q))) rows[static_cast<std::size_t>(q)].push_back(p);
    }
    return rows;
}

}  // namespace detail

// GIFT-64: 16 in-place sboxes, then the bit permutation
// P(i) = 4*floor(i/16) + 16*((3*floor((i mod 16)/4) + (i mod 4)) mod 4) + (i mod 4)
// in the cipher's own labeling, where bit 0 is the LSB of nibble 0 and hex
// char k prints nibble 15-k.
inline CipherSpec make_gift64() {
    CipherSpec s;
    s.name = "gift64";
    s.state_bits = 64;
    s.word_bits = 4;
    s.mode = SpecMode::bit;
    s.sboxes["gift"] = detail::hex_sbox("1 a 4 c 6 f 3 9 2 d b 7 5 0 8 e");
    auto native = [](int m) { return 4 * (15 - m / 4) + (3 - m % 4); };  // involution
    Layer p;
    p.kind = LayerKind::pbox;
    p.pbox.perm.resize(64);
    for (int m = 0; m < 64; ++m) {
        int i = native(m);
        int pi = 4 * (i / 16) + 16 * ((3 * ((i % 16) / 4) + (i % 4)) % 4) + (i % 4);
        p.pbox.perm[static_cast<std::size_t>(m)] = native(pi);
    }
    std::vector<int> chars(16);
    for (int k = 0; k < 16; ++k) chars[static_cast<std::size_t>(k)] = k;
    s.rounds = {{detail::sbox_layer("gift", chars), p}};
    validate_spec(s);
    return s;
}

// SKINNY-64: cells row-major (hex char = cell), ShiftRows rotates row r right
// by r, MixColumns per column maps (m0,m1,m2,m3) to
// (m0^m2^m3, m0, m1^m2, m0^m2).
inline CipherSpec make_skinny64() {
    CipherSpec s;
    s.name = "skinny64";
    s.state_bits = 64;
    s.word_bits = 4;
    s.mode = SpecMode::bit;
    s.sboxes["skinny"] = detail::hex_sbox("c 6 9 0 1 a 2 b 3 8 5 d 4 e 7 f");
    std::vector<int> chars(16), sr(16);
    for (int k = 0; k < 16; ++k) chars[static_cast<std::size_t>(k)] = k;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) sr[static_cast<std::size_t>(4 * r + c)] = 4 * r + (c + r) % 4;
    std::vector<Layer> round = {detail::sbox_layer("skinny", chars), detail::char_pbox(sr)};
    const int blocks[4][4] = {{1, 0, 1, 1}, {1, 0, 0, 0}, {0, 1, 1, 0}, {1, 0, 1, 0}};
    for (int c = 0; c < 4; ++c) {
        Layer l;
        l.kind = LayerKind::linear;
        for (int r = 0; r < 4; ++r)
            for (int t = 0; t < 4; ++t)
                l.linear.in_positions.push_back(4 * (4 * r + c) + t);
        l.linear.out_positions = l.linear.in_positions;
        detail::MatrixBuilder mb(16, 16);
        for (std::size_t br = 0; br < 4; ++br)
            for (std::size_t bc = 0; bc < 4; ++bc)
                if (blocks[br][bc]) mb.nib_block(br, bc);
        l.linear.matrix = mb.m;
        round.push_back(l);
    }
    s.rounds = {round};
    validate_spec(s);
    return s;
}

// Midori-64: cells column-major (hex char = cell), ShuffleCell
// s'_i = s_{sigma[i]}, then the involutive almost-MDS MixColumn
// (each output cell is the XOR of the other three in its column).
inline CipherSpec make_midori64() {
    CipherSpec s;
    s.name = "midori64";
    s.state_bits = 64;
    s.word_bits = 4;
    s.mode = SpecMode::bit;
    s.sboxes["sb0"] = detail::hex_sbox("c a d 3 e b f 7 8 9 1 5 0 2 4 6");
    const int sigma[16] = {0, 10, 5, 15, 14, 4, 11, 1, 9, 3, 12, 6, 7, 13, 2, 8};
    std::vector<int> dest(16);
    for (int i = 0; i < 16; ++i) dest[static_cast<std::size_t>(sigma[i])] = i;
    std::vector<int> chars(16);
    for (int k = 0; k < 16; ++k) chars[static_cast<std::size_t>(k)] = k;
    std::vector<Layer> round = {detail::sbox_layer("sb0", chars), detail::char_pbox(dest)};
    for (int c = 0; c < 4; ++c) {
        Layer l;
        l.kind = LayerKind::linear;
        for (int cell = 4 * c; cell < 4 * c + 4; ++cell)
            for (int t = 0; t < 4; ++t) l.linear.in_positions.push_back(4 * cell + t);
        l.linear.out_positions = l.linear.in_positions;
        detail::MatrixBuilder mb(16, 16);
        for (std::size_t br = 0; br < 4; ++br)
            for (std::size_t bc = 0; bc < 4; ++bc)
                if (br != bc) mb.nib_block(br, bc);
        l.linear.matrix = mb.m;
        round.push_back(l);
    }
    s.rounds = {round};
    validate_spec(s);
    return s;
}

// KLEIN-64: in-place sboxes, RotateNibbles (state moves two bytes to the
// left), MixNibbles = AES MixColumn over GF(2^8)/0x11b applied to the two
// 4-byte halves, a byte being a hex-char pair (high, low).
inline CipherSpec make_klein() {
    CipherSpec s;
    s.name = "klein";
    s.state_bits = 64;
    s.word_bits = 4;
    s.mode = SpecMode::bit;
    s.sboxes["klein"] = detail::hex_sbox("7 4 a 9 1 f b 0 c 3 2 6 8 e d 5");
    std::vector<int> chars(16), rot(16);
    for (int k = 0; k < 16; ++k) {
        chars[static_cast<std::size_t>(k)] = k;
        rot[static_cast<std::size_t>(k)] = (k + 12) % 16;  // new char k = old char k+4
    }
    std::vector<Layer> round = {detail::sbox_layer("klein", chars), detail::char_pbox(rot)};
    const int mc[4][4] = {{2, 3, 1, 1}, {1, 2, 3, 1}, {1, 1, 2, 3}, {3, 1, 1, 2}};
    for (int half = 0; half < 2; ++half) {
        Layer l;
        l.kind = LayerKind::linear;
        for (int k = 8 * half; k < 8 * half + 8; ++k)
            for (int t = 0; t < 4; ++t) l.linear.in_positions.push_back(4 * k + t);
        l.linear.out_positions = l.linear.in_positions;
        detail::MatrixBuilder mb(32, 32);
        for (std::size_t ob = 0; ob < 4; ++ob)
            for (std::size_t ib = 0; ib < 4; ++ib) {
                auto rows = detail::gf8_rowmap(mc[ob][ib]);
                for (std::size_t p = 0; p < 8; ++p)
                    for (int q : rows[p]) mb.set(8 * ob + p, 8 * ib + static_cast<std::size_t>(q));
            }
        l.linear.matrix = mb.m;
        round.push_back(l);
    }
    s.rounds = {round};
    validate_spec(s);
    return s;
}

// Lilliput: extended generalized Feistel on sixteen nibble branches
// X15..X0, where hex char k prints X_{15-k}.  One round: X_{15-j} ^= S(X_j)
// for j=0..7, then X15 ^= X1^..^X7 and X14..X9 ^= X7, then the branch
// permutation pi (X'_{pi[j]} = X_j).  Sbox outputs are staged in scratch so
// the lower half passes through untouched.
inline CipherSpec make_lilliput() {
    CipherSpec s;
    s.name = "lilliput";
    s.state_bits = 64;
    s.word_bits = 4;
    s.mode = SpecMode::bit;
    s.scratch = 32;
    s.sboxes["lilliput"] = detail::hex_sbox("4 8 7 1 9 3 2 e 0 b 6 f a c 5 d");
    Layer sub;
    sub.kind = LayerKind::sbox;
    sub.sbox.sbox_name = "lilliput";
    for (int j = 0; j < 8; ++j) {
        sub.sbox.in_groups.push_back(detail::nib(15 - j));  // X_j
        sub.sbox.out_groups.push_back(detail::nib(16 + j)); // scratch slot j
    }
    Layer lin;
    lin.kind = LayerKind::linear;
    for (int k = 0; k < 8; ++k)  // chars 0..7 = X15..X8
        for (int t = 0; t < 4; ++t) lin.linear.out_positions.push_back(4 * k + t);
    lin.linear.in_positions = lin.linear.out_positions;           // blocks 0..7
    for (int k = 14; k >= 8; --k)                                  // X1..X7: blocks 8..14
        for (int t = 0; t < 4; ++t) lin.linear.in_positions.push_back(4 * k + t);
    for (int j = 0; j < 8; ++j)                                    // scratch: blocks 15..22
        for (int t = 0; t < 4; ++t) lin.linear.in_positions.push_back(4 * (16 + j) + t);
    detail::MatrixBuilder mb(32, 92);
    for (std::size_t j = 0; j < 8; ++j) {
        mb.nib_block(j, j);                // old branch value
        mb.nib_block(j, 15 + j);           // ^ S(X_j) lands on X_{15-j}
    }
    for (std::size_t b = 8; b < 15; ++b) mb.nib_block(0, b);  // X15 ^= X1..X7
    for (std::size_t j = 1; j < 7; ++j) mb.nib_block(j, 14);  // X14..X9 ^= X7
    lin.linear.matrix = mb.m;
    const int pi[16] = {13, 9, 14, 8, 10, 11, 12, 15, 4, 5, 3, 1, 2, 6, 0, 7};
    std::vector<int> dest(16);  // char 15-j -> char 15-pi[j]
    for (int j = 0; j < 16; ++j) dest[static_cast<std::size_t>(15 - j)] = 15 - pi[j];
    s.rounds = {{sub, lin, detail::char_pbox(dest)}};
    validate_spec(s);
    return s;
}

// MIBS: 64-bit Feistel, left half = chars 0..7 (x1..x8).  F = sbox layer
// followed by the branch-5 nibble mixing
//   y1=x1^x3^x4^x6^x7^x8   y2=x1^x2^x4^x5^x7^x8   y3=x1^x2^x3^x5^x6^x8
//   y4=x2^x3^x4^x5^x6^x7   y5=x1^x2^x6^x7^x8      y6=x2^x3^x5^x7^x8
//   y7=x3^x4^x5^x6^x8      y8=x1^x4^x5^x6^x7
// XORed into the right half, then the halves swap.
inline CipherSpec make_mibs() {
    CipherSpec s;
    s.name = "mibs";
    s.state_bits = 64;
    s.word_bits = 4;
    s.mode = SpecMode::bit;
    s.scratch = 32;
    s.sboxes["mibs"] = detail::hex_sbox("4 f 3 8 d a c 0 b 5 7 e 2 6 1 9");
    Layer sub;
    sub.kind = LayerKind::sbox;
    sub.sbox.sbox_name = "mibs";
    for (int k = 0; k < 8; ++k) {
        sub.sbox.in_groups.push_back(detail::nib(k));
        sub.sbox.out_groups.push_back(detail::nib(16 + k));
    }
    const int taps[8][6] = {{1, 3, 4, 6, 7, 8}, {1, 2, 4, 5, 7, 8}, {1, 2, 3, 5, 6, 8},
                            {2, 3, 4, 5, 6, 7}, {1, 2, 6, 7, 8, 0}, {2, 3, 5, 7, 8, 0},
                            {3, 4, 5, 6, 8, 0}, {1, 4, 5, 6, 7, 0}};
    Layer lin;
    lin.kind = LayerKind::linear;
    for (int k = 8; k < 16; ++k)
        for (int t = 0; t < 4; ++t) lin.linear.out_positions.push_back(4 * k + t);
    lin.linear.in_positions = lin.linear.out_positions;  // blocks 0..7: right half
    for (int k = 0; k < 8; ++k)                          // blocks 8..15: scratch
        for (int t = 0; t < 4; ++t) lin.linear.in_positions.push_back(4 * (16 + k) + t);
    detail::MatrixBuilder mb(32, 64);
    for (std::size_t y = 0; y < 8; ++y) {
        mb.nib_block(y, y);
        for (int x : taps[y])
            if (x) mb.nib_block(y, 7 + static_cast<std::size_t>(x));
    }
    lin.linear.matrix = mb.m;
    std::vector<int> swap(16);
    for (int k = 0; k < 16; ++k) swap[static_cast<std::size_t>(k)] = (k + 8) % 16;
    s.rounds = {{sub, lin, detail::char_pbox(swap)}};
    validate_spec(s);
    return s;
}

// AES at word granularity: 16 byte-words, column-major (word = row + 4*col).
// Activity propagates through SubBytes unchanged; ShiftRows permutes words;
// each MixColumns column is a branch-number-5 linear layer.
inline CipherSpec make_aes_word() {
    CipherSpec s;
    s.name = "aes_word";
    s.state_bits = 128;
    s.word_bits = 8;
    s.mode = SpecMode::word;
    Layer sub;
    sub.kind = LayerKind::sbox;
    for (int w = 0; w < 16; ++w) {
        sub.sbox.in_groups.push_back({w});
        sub.sbox.out_groups.push_back({w});
    }
    Layer sr;
    sr.kind = LayerKind::pbox;
    sr.pbox.perm.resize(16);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            sr.pbox.perm[static_cast<std::size_t>(r + 4 * c)] = r + 4 * ((c - r + 4) % 4);
    std::vector<Layer> round = {sub, sr};
    for (int c = 0; c < 4; ++c) {
        Layer l;
        l.kind = LayerKind::linear;
        for (int r = 0; r < 4; ++r) l.linear.in_positions.push_back(4 * c + r);
        l.linear.out_positions = l.linear.in_positions;
        l.linear.branch_number = 5;
        round.push_back(l);
    }
    s.rounds = {round};
    validate_spec(s);
    return s;
}

inline const std::map<std::string, CipherSpec>& builtin_specs() {
    static const std::map<std::string, CipherSpec> specs = [] {
        std::map<std::string, CipherSpec> m;
        for (auto&& s : {make_gift64(), make_skinny64(), make_midori64(), make_klein(),
                         make_lilliput(), make_mibs(), make_aes_word()})
            m.emplace(s.name, s);
        return m;
    }();
    return specs;
}

}  // namespace difftrail
