#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rmp/errors.hpp"

namespace rmp {

/// Exact rational number on 64-bit numerator/denominator.
/// All arithmetic goes through 128-bit intermediates and throws on overflow
/// after reduction; denominators are kept positive.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n) : num(n), den(1) {}
    Rational(long long n, long long d) { *this = make(n, d); }

    static Rational make(__int128 n, __int128 d) {
        if (d == 0) throw std::invalid_argument("Rational: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n;
        __int128 g = gcd128(a, d);
        if (g > 1) { n /= g; d /= g; }
        Rational r;
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw std::overflow_error("Rational: value out of 64-bit range");
        r.num = static_cast<long long>(n);
        r.den = static_cast<long long>(d);
        return r;
    }

    bool is_zero() const { return num == 0; }
    int sign() const { return num > 0 ? 1 : (num < 0 ? -1 : 0); }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    Rational operator-() const { Rational r; r.num = -num; r.den = den; return r; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return make((__int128)a.num * b.den + (__int128)b.num * a.den, (__int128)a.den * b.den);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return make((__int128)a.num * b.den - (__int128)b.num * a.den, (__int128)a.den * b.den);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make((__int128)a.num * b.num, (__int128)a.den * b.den);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num == 0) throw std::invalid_argument("Rational: division by zero");
        return make((__int128)a.num * b.den, (__int128)a.den * b.num);
    }
    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num * b.den < (__int128)b.num * a.den;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    Rational abs() const { return num < 0 ? -*this : *this; }

    /// "p" for integers, "p/q" otherwise.
    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }

    /// Accepts "p", "p/q" and plain decimals like "-1.25".
    static std::optional<Rational> parse(std::string_view s) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        if (s.empty()) return std::nullopt;
        auto slash = s.find('/');
        if (slash != std::string_view::npos) {
            auto a = parse_int(s.substr(0, slash));
            auto b = parse_int(s.substr(slash + 1));
            if (!a || !b || *b == 0) return std::nullopt;
            return make(*a, *b);
        }
        auto dot = s.find('.');
        if (dot != std::string_view::npos) {
            auto ip = s.substr(0, dot);
            auto fp = s.substr(dot + 1);
            if (fp.empty() || fp.size() > 15) return std::nullopt;
            bool neg = !ip.empty() && ip.front() == '-';
            auto a = ip.empty() || ip == "-" || ip == "+" ? std::optional<long long>(0) : parse_int(ip);
            auto f = parse_int(fp);
            if (!a || !f || *f < 0) return std::nullopt;
            __int128 scale = 1;
            for (size_t i = 0; i < fp.size(); ++i) scale *= 10;
            __int128 n = (__int128)std::llabs(*a) * scale + *f;
            if (neg || *a < 0) n = -n;
            return make(n, scale);
        }
        auto a = parse_int(s);
        if (!a) return std::nullopt;
        return Rational(*a);
    }

private:
    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        return a < 0 ? -a : a;
    }
    static std::optional<long long> parse_int(std::string_view s) {
        if (s.empty()) return std::nullopt;
        size_t i = 0;
        bool neg = false;
        if (s[0] == '+' || s[0] == '-') { neg = s[0] == '-'; i = 1; }
        if (i == s.size()) return std::nullopt;
        __int128 v = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') return std::nullopt;
            v = v * 10 + (s[i] - '0');
            if (v > INT64_MAX) return std::nullopt;
        }
        return neg ? -(long long)v : (long long)v;
    }
};

using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>;

inline RatVec rv_zero(int n) { return RatVec(n); }

inline RatVec rv_add(const RatVec& a, const RatVec& b) {
    RatVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline RatVec rv_sub(const RatVec& a, const RatVec& b) {
    RatVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline RatVec rv_neg(const RatVec& a) {
    RatVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

inline RatVec rv_scale(const Rational& c, const RatVec& a) {
    RatVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

inline Rational rv_dot(const RatVec& a, const RatVec& b) {
    Rational s;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool rv_is_zero(const RatVec& a) {
    for (auto& x : a)
        if (!x.is_zero()) return false;
    return true;
}

inline bool rv_eq(const RatVec& a, const RatVec& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

inline std::vector<double> rv_to_doubles(const RatVec& a) {
    std::vector<double> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i].value();
    return r;
}

inline std::string rv_str(const RatVec& a) {
    std::string s = "(";
    for (size_t i = 0; i < a.size(); ++i) {
        if (i) s += ",";
        s += a[i].str();
    }
    return s + ")";
}

inline __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) { __int128 t = a % b; a = b; b = t; }
    return a;
}

/// Scale by a positive rational so that all entries are integers with gcd 1.
/// The zero vector is returned unchanged.
inline RatVec rv_primitive(const RatVec& a) {
    __int128 lcm = 1;
    bool any = false;
    for (auto& x : a) {
        if (x.is_zero()) continue;
        any = true;
        lcm = lcm / gcd128(lcm, x.den) * x.den;
    }
    if (!any) return a;
    RatVec ints(a.size());
    __int128 content = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        __int128 v = (__int128)a[i].num * (long long)(lcm / a[i].den);
        ints[i] = Rational::make(v, 1);
        content = gcd128(content, v);
    }
    if (content > 1)
        for (auto& x : ints) x = Rational::make(x.num / (long long)content, 1);
    return ints;
}

// ---------------------------------------------------------------------------
// Exact linear algebra (small systems only).

/// Reduced row echelon form in place; returns pivot column indices.
inline std::vector<int> rat_rref(RatMat& m) {
    std::vector<int> pivots;
    if (m.empty()) return pivots;
    size_t rows = m.size(), cols = m[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t sel = r;
        while (sel < rows && m[sel][c].is_zero()) ++sel;
        if (sel == rows) continue;
        std::swap(m[sel], m[r]);
        Rational inv = Rational(1) / m[r][c];
        for (size_t j = c; j < cols; ++j) m[r][j] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c].is_zero()) continue;
            Rational f = m[i][c];
            for (size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        pivots.push_back((int)c);
        ++r;
    }
    return pivots;
}

inline int rat_rank(RatMat m) { return (int)rat_rref(m).size(); }

/// Basis of the null space of m (viewed as rows x cols map on column vectors).
inline std::vector<RatVec> rat_kernel(RatMat m, int cols) {
    auto pivots = rat_rref(m);
    std::vector<bool> is_pivot(cols, false);
    for (int p : pivots) is_pivot[p] = true;
    std::vector<RatVec> basis;
    for (int free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        RatVec v(cols);
        v[free] = Rational(1);
        for (size_t r = 0; r < pivots.size(); ++r)
            v[pivots[r]] = r < m.size() ? -m[r][free] : Rational(0);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Solve A x = b exactly for square A; nullopt when singular.
inline std::optional<RatVec> rat_solve(const RatMat& A, const RatVec& b) {
    size_t n = A.size();
    RatMat aug(n, RatVec(n + 1));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) aug[i][j] = A[i][j];
        aug[i][n] = b[i];
    }
    auto pivots = rat_rref(aug);
    if (pivots.size() != n) return std::nullopt;
    for (size_t i = 0; i < n; ++i)
        if (pivots[i] != (int)i) return std::nullopt;
    RatVec x(n);
    for (size_t i = 0; i < n; ++i) x[i] = aug[i][n];
    return x;
}

// ---------------------------------------------------------------------------
// Rational reconstruction of floating-point data.

/// Best continued-fraction convergent of x with denominator <= max_den.
inline Rational rational_convergent(double x, long long max_den) {
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double v = x;
    for (int it = 0; it < 64; ++it) {
        double fl = std::floor(v);
        if (fl > 9e17 || fl < -9e17) break;
        long long a = (long long)fl;
        __int128 p2 = (__int128)a * p1 + p0;
        __int128 q2 = (__int128)a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1;
        p1 = (long long)p2; q1 = (long long)q2;
        double rem = v - fl;
        if (rem < 1e-15) break;
        v = 1.0 / rem;
    }
    if (q1 == 0) return Rational(0);
    return Rational(p1, q1);
}

/// Smallest-denominator rational within tol of x (denominator <= max_den),
/// or nullopt when no such rational exists.
inline std::optional<Rational> snap_rational(double x, double tol, long long max_den) {
    for (long long q = 1; q <= max_den; ++q) {
        double pd = std::round(x * (double)q);
        if (std::fabs(pd) > 9e17) return std::nullopt;
        long long p = (long long)pd;
        if (std::fabs(x - (double)p / (double)q) <= tol) return Rational(p, q);
    }
    return std::nullopt;
}

struct VectorRationalization {
    RatVec value;       // primitive integer vector
    double residual;    // || unit(value) - unit(input) ||
};

namespace detail {
inline std::optional<VectorRationalization> finish_rationalization(
    const std::vector<double>& v, RatVec cand, double residual_tol) {
    cand = rv_primitive(cand);
    if (rv_is_zero(cand)) return std::nullopt;
    double nf = 0, nr = 0, dot = 0;
    for (size_t i = 0; i < v.size(); ++i) {
        nf += v[i] * v[i];
        double c = cand[i].value();
        nr += c * c;
    }
    nf = std::sqrt(nf); nr = std::sqrt(nr);
    double res2 = 0;
    for (size_t i = 0; i < v.size(); ++i) {
        double d = cand[i].value() / nr - v[i] / nf;
        res2 += d * d;
    }
    (void)dot;
    double res = std::sqrt(res2);
    if (res > residual_tol) return std::nullopt;
    return VectorRationalization{std::move(cand), res};
}
} // namespace detail

/// Continued-fraction reconstruction of each coordinate after scaling by the
/// largest magnitude entry; fails when the residual between unit vectors
/// exceeds residual_tol.
inline std::optional<VectorRationalization> rationalize_vector(
    const std::vector<double>& v, long long max_den, double residual_tol) {
    double scale = 0;
    for (double x : v) scale = std::max(scale, std::fabs(x));
    if (scale == 0) return std::nullopt;
    RatVec cand(v.size());
    for (size_t i = 0; i < v.size(); ++i) cand[i] = rational_convergent(v[i] / scale, max_den);
    return detail::finish_rationalization(v, cand, residual_tol);
}

/// Smallest-denominator per-coordinate snap; looser than rationalize_vector,
/// meant for normals recovered from noisy sample hulls. The returned residual
/// must still be checked against the supporting data by the caller.
inline std::optional<VectorRationalization> snap_vector(
    const std::vector<double>& v, double coord_tol, long long max_den) {
    double scale = 0;
    for (double x : v) scale = std::max(scale, std::fabs(x));
    if (scale == 0) return std::nullopt;
    RatVec cand(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        auto r = snap_rational(v[i] / scale, coord_tol, max_den);
        if (!r) return std::nullopt;
        cand[i] = *r;
    }
    return detail::finish_rationalization(v, cand, 1.0);
}

} // namespace rmp
