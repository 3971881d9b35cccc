#pragma once

// Exact H-representation of the convex hull of 0/1 transition points via the
// double-description method on the dual cone, in exact integer arithmetic.
//
// An inequality is stored in ">=" orientation: sum(coeffs[i]*v[i]) >= rhs,
// with coefficients ordered per the shared MSB-first bit-vector convention.
//
// Inequality file format: one inequality per line, dim+1 space-separated
// integers "a_{dim-1} ... a_0 b" meaning sum(a_i v_i) >= b; '#' comments.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "difftrail/bits.hpp"

namespace difftrail {

struct LinearInequality {
    std::vector<long long> coeffs;
    long long rhs = 0;

    friend bool operator==(const LinearInequality& a, const LinearInequality& b) {
        return a.coeffs == b.coeffs && a.rhs == b.rhs;
    }
    friend bool operator<(const LinearInequality& a, const LinearInequality& b) {
        if (a.coeffs != b.coeffs) return a.coeffs < b.coeffs;
        return a.rhs < b.rhs;
    }
};

// divides through by the gcd of all coefficients and the rhs
inline LinearInequality canonicalize(LinearInequality q) {
    long long g = std::abs(q.rhs);
    for (long long c : q.coeffs) g = std::gcd(g, std::abs(c));
    if (g > 1) {
        for (long long& c : q.coeffs) c /= g;
        q.rhs /= g;
    }
    return q;
}

inline long long evaluate(const LinearInequality& q, const BitVec& v) {
    if (q.coeffs.size() != v.size())
        throw std::length_error("inequality/point dimension mismatch");
    long long s = -q.rhs;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i]) s += q.coeffs[i];
    return s;
}

inline bool satisfies(const LinearInequality& q, const BitVec& v) {
    return evaluate(q, v) >= 0;
}

struct InequalitySet {
    int dim = 0;
    std::vector<LinearInequality> items;
};

inline std::vector<BitVec> removal_footprint(const LinearInequality& q,
                                             const std::vector<BitVec>& impossible) {
    std::vector<BitVec> out;
    for (const auto& p : impossible)
        if (evaluate(q, p) < 0) out.push_back(p);
    return out;
}

struct HullResult {
    InequalitySet facets;
    InequalitySet equalities;  // implicit equalities (affine hull), sense "="
};

namespace detail {

using bigint = boost::multiprecision::cpp_int;

struct HullOverflow : std::overflow_error {
    HullOverflow() : std::overflow_error("hull coefficients exceed 64-bit range") {}
};

inline long long checked_ll(const bigint& v) {
    if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min())
        throw HullOverflow();
    return static_cast<long long>(v);
}

template <class Int>
struct IntOps;

template <>
struct IntOps<long long> {
    using I128 = __int128;
    static long long mul_sub(long long a, long long x, long long b, long long y) {
        I128 r = static_cast<I128>(a) * x - static_cast<I128>(b) * y;
        if (r > std::numeric_limits<long long>::max() || r < std::numeric_limits<long long>::min())
            throw HullOverflow();
        return static_cast<long long>(r);
    }
    static long long gcd(long long a, long long b) { return std::gcd(a, b); }
    static long long to_ll(long long v) { return v; }
};

template <>
struct IntOps<bigint> {
    static bigint mul_sub(const bigint& a, const bigint& x, const bigint& b, const bigint& y) {
        return a * x - b * y;
    }
    static bigint gcd(const bigint& a, const bigint& b) { return boost::multiprecision::gcd(a, b); }
    static long long to_ll(const bigint& v) { return checked_ll(v); }
};

template <class Int>
struct Ray {
    std::vector<Int> v;  // length dim+1; v[0] pairs with the homogenizing 1
    WordSet tight;       // processed constraints this ray is tight on
};

template <class Int>
void normalize(std::vector<Int>& v) {
    Int g = 0;
    for (const Int& x : v) g = IntOps<Int>::gcd(g, x < 0 ? Int(-x) : x);
    if (g > 1)
        for (Int& x : v) x /= g;
}

template <class Int>
Int dot(const std::vector<Int>& ray, const std::vector<std::size_t>& ones) {
    Int s = ray[0];
    for (std::size_t i : ones) s += ray[i];
    return s;
}

// Double description on the dual cone: rays of {w : w.(1,p) >= 0 for all p}
// are the facets of conv(points); the remaining lineality spans the
// implicit-equality directions.
template <class Int>
std::pair<std::vector<std::vector<Int>>, std::vector<std::vector<Int>>>
dual_cone_dd(const std::vector<BitVec>& points, int dim) {
    const std::size_t m = points.size();
    const std::size_t D = static_cast<std::size_t>(dim) + 1;

    // constraint t = (1, points[t]) as the index list of its nonzero entries
    std::vector<std::vector<std::size_t>> ones(m);
    for (std::size_t t = 0; t < m; ++t)
        for (int i = 0; i < dim; ++i)
            if (points[t][static_cast<std::size_t>(i)]) ones[t].push_back(static_cast<std::size_t>(i) + 1);

    std::vector<std::vector<Int>> lin(D);
    for (std::size_t i = 0; i < D; ++i) {
        lin[i].assign(D, Int(0));
        lin[i][i] = 1;
    }
    std::vector<Ray<Int>> rays;

    for (std::size_t t = 0; t < m; ++t) {
        // lineality phase: pull one basis vector out of the hyperplane
        std::size_t pivot = lin.size();
        for (std::size_t i = 0; i < lin.size(); ++i)
            if (dot<Int>(lin[i], ones[t]) != 0) { pivot = i; break; }
        if (pivot != lin.size()) {
            std::vector<Int> l = lin[pivot];
            lin.erase(lin.begin() + static_cast<std::ptrdiff_t>(pivot));
            Int s = dot<Int>(l, ones[t]);
            if (s < 0) {
                for (Int& x : l) x = -x;
                s = -s;
            }
            for (auto& o : lin) {
                Int so = dot<Int>(o, ones[t]);
                if (so != 0) {
                    for (std::size_t i = 0; i < D; ++i)
                        o[i] = IntOps<Int>::mul_sub(s, o[i], so, l[i]);
                    normalize(o);
                }
            }
            for (auto& r : rays) {
                Int sr = dot<Int>(r.v, ones[t]);
                if (sr != 0) {
                    for (std::size_t i = 0; i < D; ++i)
                        r.v[i] = IntOps<Int>::mul_sub(s, r.v[i], sr, l[i]);
                    normalize(r.v);
                }
                r.tight.set(t);
            }
            Ray<Int> nr;
            nr.v = std::move(l);
            nr.tight = WordSet(m);
            for (std::size_t j = 0; j < t; ++j) nr.tight.set(j);
            rays.push_back(std::move(nr));
            continue;
        }

        // double-description phase
        std::vector<Int> val(rays.size());
        bool has_neg = false;
        for (std::size_t i = 0; i < rays.size(); ++i) {
            val[i] = dot<Int>(rays[i].v, ones[t]);
            if (val[i] < 0) has_neg = true;
        }
        if (!has_neg) {
            for (std::size_t i = 0; i < rays.size(); ++i)
                if (val[i] == 0) rays[i].tight.set(t);
            continue;
        }
        std::vector<std::size_t> strictly_pos, zero, neg;
        for (std::size_t i = 0; i < rays.size(); ++i) {
            if (val[i] > 0)
                strictly_pos.push_back(i);
            else if (val[i] < 0)
                neg.push_back(i);
            else
                zero.push_back(i);
        }

        // adjacency needs common tight rank = (pointed dimension) - 2, and
        // the pointed part loses one dimension per remaining lineality vector
        const std::size_t pointed_dim = D - lin.size();
        const std::size_t min_tight = pointed_dim >= 2 ? pointed_dim - 2 : 0;
        std::vector<Ray<Int>> fresh;
        for (std::size_t ip : strictly_pos) {
            for (std::size_t in : neg) {
                WordSet T = rays[ip].tight & rays[in].tight;
                if (T.count() < min_tight) continue;  // necessary adjacency condition
                bool adjacent = true;
                for (std::size_t k = 0; k < rays.size(); ++k) {
                    if (k == ip || k == in) continue;
                    if (T.is_subset_of(rays[k].tight)) { adjacent = false; break; }
                }
                if (!adjacent) continue;
                Ray<Int> nr;
                nr.v.resize(D);
                for (std::size_t i = 0; i < D; ++i)
                    nr.v[i] = IntOps<Int>::mul_sub(val[ip], rays[in].v[i], val[in], rays[ip].v[i]);
                normalize(nr.v);
                nr.tight = T;
                nr.tight.set(t);
                fresh.push_back(std::move(nr));
            }
        }
        std::vector<Ray<Int>> next;
        next.reserve(strictly_pos.size() + zero.size() + fresh.size());
        for (std::size_t i : strictly_pos) next.push_back(std::move(rays[i]));
        for (std::size_t i : zero) {
            rays[i].tight.set(t);
            next.push_back(std::move(rays[i]));
        }
        for (auto& r : fresh) next.push_back(std::move(r));
        rays.swap(next);
    }

    std::vector<std::vector<Int>> facet_rays;
    facet_rays.reserve(rays.size());
    for (auto& r : rays) facet_rays.push_back(std::move(r.v));
    return {std::move(facet_rays), std::move(lin)};
}

// fraction-free Gaussian elimination to a canonical primitive row basis
template <class Int>
std::vector<std::vector<Int>> canonical_row_basis(std::vector<std::vector<Int>> rows) {
    if (rows.empty()) return rows;
    const std::size_t D = rows[0].size();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < D && rank < rows.size(); ++col) {
        std::size_t piv = rows.size();
        for (std::size_t i = rank; i < rows.size(); ++i)
            if (rows[i][col] != 0) { piv = i; break; }
        if (piv == rows.size()) continue;
        std::swap(rows[rank], rows[piv]);
        if (rows[rank][col] < 0)
            for (Int& x : rows[rank]) x = -x;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == rank || rows[i][col] == 0) continue;
            Int a = rows[rank][col], b = rows[i][col];
            for (std::size_t j = 0; j < D; ++j)
                rows[i][j] = IntOps<Int>::mul_sub(a, rows[i][j], b, rows[rank][j]);
            normalize(rows[i]);
        }
        normalize(rows[rank]);
        ++rank;
    }
    rows.resize(rank);
    std::sort(rows.begin(), rows.end());
    return rows;
}

template <class Int>
HullResult hull_impl(const std::vector<BitVec>& points, int dim) {
    auto [facet_rays, lin] = dual_cone_dd<Int>(points, dim);
    HullResult out;
    out.facets.dim = dim;
    out.equalities.dim = dim;
    for (const auto& w : facet_rays) {
        LinearInequality q;
        q.coeffs.resize(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) q.coeffs[static_cast<std::size_t>(i)] = IntOps<Int>::to_ll(w[static_cast<std::size_t>(i) + 1]);
        q.rhs = -IntOps<Int>::to_ll(w[0]);
        // the homogenizing direction itself ("0 >= -1") can turn up as an
        // extreme ray for degenerate inputs; it is never a facet
        if (std::all_of(q.coeffs.begin(), q.coeffs.end(),
                        [](long long c) { return c == 0; }))
            continue;
        out.facets.items.push_back(canonicalize(std::move(q)));
    }
    for (const auto& l : canonical_row_basis<Int>(std::move(lin))) {
        LinearInequality q;
        q.coeffs.resize(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) q.coeffs[static_cast<std::size_t>(i)] = IntOps<Int>::to_ll(l[static_cast<std::size_t>(i) + 1]);
        q.rhs = -IntOps<Int>::to_ll(l[0]);
        out.equalities.items.push_back(canonicalize(std::move(q)));
    }
    std::sort(out.facets.items.begin(), out.facets.items.end());
    out.facets.items.erase(std::unique(out.facets.items.begin(), out.facets.items.end()),
                           out.facets.items.end());
    return out;
}

}  // namespace detail

inline HullResult convex_hull_hrep(const std::vector<BitVec>& points, bool allow_high_dim = false) {
    if (points.empty()) throw std::invalid_argument("hull of an empty point set");
    const int dim = static_cast<int>(points[0].size());
    if (dim > 12 && !allow_high_dim)
        throw std::out_of_range("hull dimension above 12 (pass allow_high_dim to override)");
    for (const auto& p : points)
        if (static_cast<int>(p.size()) != dim)
            throw std::length_error("hull points of mixed dimension");
    std::vector<BitVec> pts = points;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    try {
        return detail::hull_impl<long long>(pts, dim);
    } catch (const detail::HullOverflow&) {
        return detail::hull_impl<detail::bigint>(pts, dim);
    }
}

// ---- inequality file format ----

inline void write_inequality_set(std::ostream& out, const InequalitySet& s,
                                 const std::vector<std::string>& header = {}) {
    for (const auto& h : header) out << "# " << h << '\n';
    for (const auto& q : s.items) {
        for (long long c : q.coeffs) out << c << ' ';
        out << q.rhs << '\n';
    }
}

inline InequalitySet read_inequality_set(std::istream& in) {
    InequalitySet s;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t h = line.find('#');
        if (h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        std::vector<long long> nums;
        long long v;
        while (ls >> v) nums.push_back(v);
        if (nums.empty()) continue;
        LinearInequality q;
        q.rhs = nums.back();
        nums.pop_back();
        q.coeffs = std::move(nums);
        if (s.items.empty())
            s.dim = static_cast<int>(q.coeffs.size());
        else if (static_cast<int>(q.coeffs.size()) != s.dim)
            throw std::invalid_argument("inequality file rows have mixed dimension");
        s.items.push_back(std::move(q));
    }
    if (s.items.empty()) throw std::invalid_argument("inequality file contains no rows");
    return s;
}

}  // namespace difftrail
