#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "rmp/errors.hpp"
#include "rmp/rational.hpp"

namespace rmp {

enum class RootFamily { A, B, C, D };

inline char family_letter(RootFamily f) {
    switch (f) {
        case RootFamily::A: return 'A';
        case RootFamily::B: return 'B';
        case RootFamily::C: return 'C';
        case RootFamily::D: return 'D';
    }
    return '?';
}

/// Orthogonal transformation stored as a (signed) coordinate permutation:
/// (w v)[i] = sign[i] * v[perm[i]].
struct WeylElement {
    std::vector<int> perm;
    std::vector<int> sign;

    static WeylElement identity(int n) {
        WeylElement w;
        w.perm.resize(n);
        std::iota(w.perm.begin(), w.perm.end(), 0);
        w.sign.assign(n, 1);
        return w;
    }

    template <class Vec>
    Vec apply(const Vec& v) const {
        Vec r = v;
        for (size_t i = 0; i < perm.size(); ++i) {
            r[i] = v[perm[i]];
            if (sign[i] < 0) r[i] = -r[i];
        }
        return r;
    }

    WeylElement compose(const WeylElement& o) const {
        // (this o other) v = this(other(v))
        WeylElement w;
        size_t n = perm.size();
        w.perm.resize(n);
        w.sign.resize(n);
        for (size_t i = 0; i < n; ++i) {
            w.perm[i] = o.perm[perm[i]];
            w.sign[i] = sign[i] * o.sign[perm[i]];
        }
        return w;
    }

    bool operator==(const WeylElement& o) const { return perm == o.perm && sign == o.sign; }
};

/// Restricted root system of classical type in coordinates e_1..e_n.
/// The bilinear form is the trace form of the standard representation, so the
/// Gram matrix is the identity; coroots come out integral for type A.
struct RootSystem {
    RootFamily family;
    int rank = 0;
    int ambient = 0;  // rank+1 for A, rank otherwise
    std::vector<RatVec> roots;
    std::vector<RatVec> positive_roots;
    std::vector<RatVec> simple_roots;
    RatMat form_matrix;  // identity Gram matrix, kept explicit for the dual solve
};

namespace detail {
inline RatVec unit_vec(int n, int i, const Rational& c = Rational(1)) {
    RatVec v(n);
    v[i] = c;
    return v;
}

/// Lexicographic regular vector (1, 1/2, 1/4, ...) fixing positivity.
inline RatVec regular_vector(int n) {
    RatVec v(n);
    long long d = 1;
    for (int i = 0; i < n; ++i) {
        v[i] = Rational(1, d);
        if (i + 1 < n) d *= 2;
    }
    return v;
}
} // namespace detail

inline RootSystem build_root_system(RootFamily family, int rank) {
    if (rank < 1) throw std::invalid_argument("build_root_system: rank must be >= 1");
    if (family == RootFamily::D && rank < 2)
        throw std::invalid_argument("build_root_system: type D needs rank >= 2");
    if (rank > 12) throw std::invalid_argument("build_root_system: rank too large");

    RootSystem rs;
    rs.family = family;
    rs.rank = rank;
    rs.ambient = family == RootFamily::A ? rank + 1 : rank;
    const int n = rs.ambient;

    auto push_pair = [&](RatVec v) {
        rs.roots.push_back(rv_neg(v));
        rs.roots.push_back(std::move(v));
    };

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            RatVec d(n);
            d[i] = Rational(1);
            d[j] = Rational(-1);
            push_pair(d);
            if (family != RootFamily::A) {
                RatVec s(n);
                s[i] = Rational(1);
                s[j] = Rational(1);
                push_pair(s);
            }
        }
    }
    if (family == RootFamily::B)
        for (int i = 0; i < n; ++i) push_pair(detail::unit_vec(n, i));
    if (family == RootFamily::C)
        for (int i = 0; i < n; ++i) push_pair(detail::unit_vec(n, i, Rational(2)));

    RatVec reg = detail::regular_vector(n);
    for (auto& r : rs.roots)
        if (rv_dot(r, reg).sign() > 0) rs.positive_roots.push_back(r);

    for (int i = 0; i + 1 < n; ++i) {
        RatVec d(n);
        d[i] = Rational(1);
        d[i + 1] = Rational(-1);
        rs.simple_roots.push_back(std::move(d));
    }
    switch (family) {
        case RootFamily::A: break;
        case RootFamily::B: rs.simple_roots.push_back(detail::unit_vec(n, n - 1)); break;
        case RootFamily::C: rs.simple_roots.push_back(detail::unit_vec(n, n - 1, Rational(2))); break;
        case RootFamily::D: {
            RatVec s(n);
            s[n - 2] = Rational(1);
            s[n - 1] = Rational(1);
            rs.simple_roots.push_back(std::move(s));
            break;
        }
    }

    rs.form_matrix.assign(n, RatVec(n));
    for (int i = 0; i < n; ++i) rs.form_matrix[i][i] = Rational(1);
    return rs;
}

inline bool is_root(const RootSystem& rs, const RatVec& alpha) {
    for (auto& r : rs.roots)
        if (rv_eq(r, alpha)) return true;
    return false;
}

/// Dual of alpha under the form: the h with <alpha, X> = (h, X)_b for all X,
/// obtained by an exact linear solve against the Gram matrix.
inline RatVec coroot(const RootSystem& rs, const RatVec& alpha) {
    if (!is_root(rs, alpha)) throw std::invalid_argument("coroot: not a root of this system");
    auto h = rat_solve(rs.form_matrix, alpha);
    if (!h) throw NumericFailure("coroot: singular form matrix");
    return *h;
}

/// Expand a vector in the simple-root basis; nullopt when outside the span.
inline std::optional<RatVec> simple_coordinates(const RootSystem& rs, const RatVec& v) {
    const int n = rs.ambient;
    const int r = (int)rs.simple_roots.size();
    RatMat m(n, RatVec(r + 1));
    for (int j = 0; j < r; ++j)
        for (int i = 0; i < n; ++i) m[i][j] = rs.simple_roots[j][i];
    for (int i = 0; i < n; ++i) m[i][r] = v[i];
    auto pivots = rat_rref(m);
    RatVec coeffs(r);
    for (size_t row = 0; row < pivots.size(); ++row) {
        if (pivots[row] == r) return std::nullopt;  // inconsistent: v not in span
        coeffs[pivots[row]] = m[row][r];
    }
    return coeffs;
}

/// Face of the closed chamber given by the vanishing set S of simple roots,
/// together with the positive roots supported on S.
struct ChamberFace {
    std::vector<int> vanishing_simple_roots;
    std::vector<RatVec> sigma_plus_s;
};

inline ChamberFace make_face(const RootSystem& rs, std::vector<int> vanishing) {
    std::sort(vanishing.begin(), vanishing.end());
    for (int i : vanishing)
        if (i < 0 || i >= (int)rs.simple_roots.size())
            throw std::invalid_argument("make_face: simple root index out of range");
    std::vector<bool> in_s(rs.simple_roots.size(), false);
    for (int i : vanishing) in_s[i] = true;

    ChamberFace face;
    face.vanishing_simple_roots = std::move(vanishing);
    for (auto& alpha : rs.positive_roots) {
        auto coeffs = simple_coordinates(rs, alpha);
        if (!coeffs) continue;
        bool supported = true;
        for (size_t j = 0; j < coeffs->size(); ++j)
            if (!(*coeffs)[j].is_zero() && !in_s[j]) { supported = false; break; }
        if (supported) face.sigma_plus_s.push_back(alpha);
    }
    return face;
}

inline std::vector<ChamberFace> all_faces(const RootSystem& rs) {
    int r = (int)rs.simple_roots.size();
    std::vector<ChamberFace> faces;
    for (int mask = 0; mask < (1 << r); ++mask) {
        std::vector<int> s;
        for (int i = 0; i < r; ++i)
            if (mask & (1 << i)) s.push_back(i);
        faces.push_back(make_face(rs, s));
    }
    return faces;
}

/// Exact basis of the face's span, the common kernel of its vanishing simple roots.
inline std::vector<RatVec> face_span_basis(const RootSystem& rs, const ChamberFace& face) {
    if (face.vanishing_simple_roots.empty()) {
        std::vector<RatVec> basis;
        for (int i = 0; i < rs.ambient; ++i) basis.push_back(detail::unit_vec(rs.ambient, i));
        return basis;
    }
    RatMat rows;
    for (int i : face.vanishing_simple_roots) rows.push_back(rs.simple_roots[i]);
    return rat_kernel(rows, rs.ambient);
}

/// The distinguished rational vector of a face: minus the sum of the coroots
/// of the positive roots orthogonal to it.
inline RatVec gamma_s(const RootSystem& rs, const ChamberFace& face) {
    RatVec g(rs.ambient);
    for (auto& alpha : face.sigma_plus_s) g = rv_sub(g, coroot(rs, alpha));
    return g;
}

// ---------------------------------------------------------------------------
// Weyl group enumeration and the chamber sweep.

inline long long weyl_order(RootFamily family, int rank) {
    auto fact = [](int m) {
        long long f = 1;
        for (int i = 2; i <= m; ++i) f *= i;
        return f;
    };
    switch (family) {
        case RootFamily::A: return fact(rank + 1);
        case RootFamily::B:
        case RootFamily::C: return fact(rank) << rank;
        case RootFamily::D: return fact(rank) << (rank - 1);
    }
    return 0;
}

inline std::vector<WeylElement> weyl_elements(const RootSystem& rs,
                                              long long bound = 3628800) {
    long long order = weyl_order(rs.family, rs.rank);
    if (order > bound)
        throw ResourceLimit("weyl_elements: group order " + std::to_string(order) +
                            " exceeds bound " + std::to_string(bound));
    const int n = rs.ambient;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<WeylElement> out;
    out.reserve((size_t)order);
    do {
        if (rs.family == RootFamily::A) {
            WeylElement w;
            w.perm = perm;
            w.sign.assign(n, 1);
            out.push_back(std::move(w));
            continue;
        }
        for (int mask = 0; mask < (1 << n); ++mask) {
            int bits = __builtin_popcount((unsigned)mask);
            if (rs.family == RootFamily::D && (bits & 1)) continue;
            WeylElement w;
            w.perm = perm;
            w.sign.resize(n);
            for (int i = 0; i < n; ++i) w.sign[i] = (mask >> i) & 1 ? -1 : 1;
            out.push_back(std::move(w));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

/// Sweep v into the closed chamber; returns the dominant representative and
/// the Weyl element realizing it (v_plus = w(v)). Type A is descending sort.
inline std::pair<std::vector<double>, WeylElement> dominant_sweep(
    const RootSystem& rs, const std::vector<double>& v) {
    const int n = rs.ambient;
    if ((int)v.size() != n) throw std::invalid_argument("dominant_sweep: dimension mismatch");
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    WeylElement w = WeylElement::identity(n);

    auto key = [&](int i) {
        return rs.family == RootFamily::A ? v[i] : std::fabs(v[i]);
    };
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return key(a) > key(b); });
    w.perm = idx;
    if (rs.family != RootFamily::A)
        for (int i = 0; i < n; ++i)
            if (v[idx[i]] < 0) w.sign[i] = -1;
    if (rs.family == RootFamily::D) {
        int negs = 0;
        for (int s : w.sign)
            if (s < 0) ++negs;
        if (negs & 1) w.sign[n - 1] = -w.sign[n - 1];
    }
    return {w.apply(v), w};
}

} // namespace rmp
