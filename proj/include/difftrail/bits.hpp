#pragma once

// Shared bit-vector conventions and small helpers.
//
// A transition point over a q-bit input / r-bit output difference pair is a
// 0/1 vector of length q+r stored MSB-first: (x_{q-1},...,x_0,y_{r-1},...,y_0).
// Every module uses this ordering for points and inequality coefficients.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace difftrail {

using BitVec = std::vector<std::uint8_t>;

inline BitVec point_from_pair(unsigned dx, unsigned dy, int q, int r) {
    BitVec v(static_cast<std::size_t>(q + r));
    for (int i = 0; i < q; ++i) v[static_cast<std::size_t>(i)] = (dx >> (q - 1 - i)) & 1u;
    for (int j = 0; j < r; ++j) v[static_cast<std::size_t>(q + j)] = (dy >> (r - 1 - j)) & 1u;
    return v;
}

inline std::pair<unsigned, unsigned> pair_from_point(const BitVec& v, int q, int r) {
    if (v.size() != static_cast<std::size_t>(q + r))
        throw std::length_error("point length does not match q+r");
    unsigned dx = 0, dy = 0;
    for (int i = 0; i < q; ++i) dx = (dx << 1) | v[static_cast<std::size_t>(i)];
    for (int j = 0; j < r; ++j) dy = (dy << 1) | v[static_cast<std::size_t>(q + j)];
    return {dx, dy};
}

// Index of a point inside {0,1}^dim when its bits are read MSB-first.
inline std::size_t point_index(const BitVec& v) {
    std::size_t idx = 0;
    for (std::uint8_t b : v) idx = (idx << 1) | b;
    return idx;
}

inline BitVec point_from_index(std::size_t idx, int dim) {
    BitVec v(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i)
        v[static_cast<std::size_t>(i)] = (idx >> (dim - 1 - i)) & 1u;
    return v;
}

inline int popcount_vec(const BitVec& v) {
    int c = 0;
    for (std::uint8_t b : v) c += b;
    return c;
}

inline int parse_hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument(std::string("not a hex digit: '") + c + "'");
}

inline char hex_digit(int v) {
    return v < 10 ? static_cast<char>('0' + v) : static_cast<char>('a' + v - 10);
}

// Fixed-width bitset over machine words; used for removal footprints and
// tight-constraint sets where std::bitset's static size does not fit.
class WordSet {
public:
    WordSet() = default;
    explicit WordSet(std::size_t nbits)
        : nbits_(nbits), w_((nbits + 63) / 64, 0) {}

    void set(std::size_t i) { w_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
    bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    std::size_t size() const { return nbits_; }

    std::size_t count() const {
        std::size_t c = 0;
        for (std::uint64_t x : w_) c += static_cast<std::size_t>(__builtin_popcountll(x));
        return c;
    }

    bool any() const {
        for (std::uint64_t x : w_) if (x) return true;
        return false;
    }

    bool is_subset_of(const WordSet& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }

    WordSet& operator&=(const WordSet& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    WordSet& operator|=(const WordSet& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    WordSet& subtract(const WordSet& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
        return *this;
    }

    friend WordSet operator&(WordSet a, const WordSet& b) { return a &= b; }
    friend WordSet operator|(WordSet a, const WordSet& b) { return a |= b; }
    friend bool operator==(const WordSet& a, const WordSet& b) { return a.w_ == b.w_; }

    std::size_t count_and(const WordSet& o) const {
        std::size_t c = 0;
        for (std::size_t i = 0; i < w_.size(); ++i)
            c += static_cast<std::size_t>(__builtin_popcountll(w_[i] & o.w_[i]));
        return c;
    }

    // visits indices of set bits in ascending order
    template <class F>
    void for_each(F&& f) const {
        for (std::size_t wi = 0; wi < w_.size(); ++wi) {
            std::uint64_t x = w_[wi];
            while (x) {
                unsigned b = static_cast<unsigned>(__builtin_ctzll(x));
                f(wi * 64 + b);
                x &= x - 1;
            }
        }
    }

    std::size_t hash() const {
        std::size_t h = 1469598103934665603ull;
        for (std::uint64_t x : w_) {
            h ^= static_cast<std::size_t>(x);
            h *= 1099511628211ull;
        }
        return h;
    }

private:
    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> w_;
};

}  // namespace difftrail
