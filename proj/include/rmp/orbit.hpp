#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rmp/lie.hpp"
#include "rmp/linalg.hpp"

namespace rmp {

enum class Mode { Real, Hermitian };

/// A product of isospectral matrix orbits: k factors of size n with exact
/// rational, strictly decreasing spectra. In real mode the points are real
/// symmetric matrices; in hermitian mode complex Hermitian ones.
struct OrbitProblem {
    int n = 0;
    int k = 0;
    std::vector<RatVec> spectra;
    Mode mode = Mode::Real;
    std::vector<VectorXd> spectra_f;  // float mirrors

    OrbitProblem() = default;
    OrbitProblem(int n_, std::vector<RatVec> spectra_, Mode mode_ = Mode::Real)
        : n(n_), k((int)spectra_.size()), spectra(std::move(spectra_)), mode(mode_) {
        if (n < 2) throw std::invalid_argument("OrbitProblem: n must be >= 2");
        if (k < 1) throw std::invalid_argument("OrbitProblem: k must be >= 1");
        for (auto& s : spectra) {
            if ((int)s.size() != n) throw std::invalid_argument("OrbitProblem: spectrum length != n");
            for (int i = 0; i + 1 < n; ++i)
                if (!(s[i] > s[i + 1]))
                    throw std::invalid_argument("OrbitProblem: spectra must be strictly decreasing");
        }
        for (auto& s : spectra) spectra_f.push_back(rv_to_eigen(s));
    }

    Rational total_trace() const {
        Rational t;
        for (auto& s : spectra)
            for (auto& x : s) t += x;
        return t;
    }
};

template <class Scalar>
struct OrbitPointT {
    std::vector<Mat<Scalar>> mats;
};

using OrbitPoint = OrbitPointT<double>;
using OrbitPointC = OrbitPointT<cplx>;

// ---------------------------------------------------------------------------
// Moment map and sampling.

inline MatrixXd moment_p(const OrbitProblem& p, const OrbitPoint& z) {
    MatrixXd s = MatrixXd::Zero(p.n, p.n);
    for (auto& a : z.mats) s += a;
    return s;
}

inline MatrixXc moment_u(const OrbitProblem& p, const OrbitPointC& z) {
    MatrixXc s = MatrixXc::Zero(p.n, p.n);
    for (auto& a : z.mats) s += a;
    return s;
}

inline VectorXd moment_chamber(const OrbitProblem& p, const OrbitPoint& z) {
    return sym_eig_desc(moment_p(p, z)).first;
}

inline VectorXd moment_chamber(const OrbitProblem& p, const OrbitPointC& z) {
    return herm_eig_desc(moment_u(p, z)).first;
}

/// Sampling is pure in (seed, index): each point draws from its own stream.
inline OrbitPoint sample_one(const OrbitProblem& p, uint64_t seed, uint64_t index) {
    Rng rng(derive_seed(seed, index));
    OrbitPoint z;
    for (int f = 0; f < p.k; ++f) {
        MatrixXd q = haar_rotation(p.n, rng);
        z.mats.push_back(q * p.spectra_f[f].asDiagonal() * q.transpose());
    }
    return z;
}

inline OrbitPointC sample_one_hermitian(const OrbitProblem& p, uint64_t seed, uint64_t index) {
    Rng rng(derive_seed(seed, index));
    OrbitPointC z;
    for (int f = 0; f < p.k; ++f) {
        MatrixXc q = haar_unitary(p.n, rng);
        z.mats.push_back(q * p.spectra_f[f].cast<cplx>().asDiagonal() * q.adjoint());
    }
    return z;
}

inline std::vector<OrbitPoint> sample(const OrbitProblem& p, uint64_t seed, int count) {
    if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
    std::vector<OrbitPoint> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(sample_one(p, seed, i));
    return out;
}

inline double spectrum_drift(const OrbitProblem& p, const OrbitPoint& z) {
    double d = 0;
    for (int f = 0; f < p.k; ++f) {
        VectorXd ev = sym_eig_desc(z.mats[f]).first;
        d = std::max(d, (ev - p.spectra_f[f]).lpNorm<Eigen::Infinity>());
    }
    return d;
}

// ---------------------------------------------------------------------------
// Group action through the eigenflag model.

/// Transports each factor along g: take the ordered eigenbasis, push it with
/// g, re-orthonormalize (QR with positive diagonal) and rebuild the matrix
/// with the exact spectrum. For rotations this is plain conjugation.
inline OrbitPoint g_action(const OrbitProblem& p, const MatrixXd& g, const OrbitPoint& z) {
    if (p.mode != Mode::Real) throw std::invalid_argument("g_action: real mode only");
    if (g.determinant() <= 0)
        throw std::invalid_argument("g_action: determinant must be positive");
    OrbitPoint out;
    for (int f = 0; f < p.k; ++f) {
        MatrixXd q = sym_eig_desc(z.mats[f]).second;
        MatrixXd q2 = qr_positive(MatrixXd(g * q));
        out.mats.push_back(q2 * p.spectra_f[f].asDiagonal() * q2.transpose());
    }
    return out;
}

/// Derivative of g_action along e^{tX} at t=0. With A = Q Lambda Q^T in the
/// ordered eigenbasis and Y = Q^T X Q, the QR transport keeps only the
/// skew part pi(Y) = Y_low - Y_low^T, giving Adot = [Q pi(Y) Q^T, A].
inline std::vector<MatrixXd> tangent_action(const OrbitProblem& p, const MatrixXd& x,
                                            const OrbitPoint& z) {
    if (p.mode != Mode::Real) throw std::invalid_argument("tangent_action: real mode only");
    std::vector<MatrixXd> out;
    for (int f = 0; f < p.k; ++f) {
        auto [vals, q] = sym_eig_desc(z.mats[f]);
        for (int i = 0; i + 1 < p.n; ++i)
            if (vals[i] - vals[i + 1] < 1e-12)
                throw std::invalid_argument("tangent_action: repeated eigenvalues in a factor");
        MatrixXd y = q.transpose() * x * q;
        MatrixXd low = y.triangularView<Eigen::StrictlyLower>();
        MatrixXd pi = low - low.transpose();
        MatrixXd w = q * pi * q.transpose();
        out.push_back(commutator<double>(w, z.mats[f]));
    }
    return out;
}

/// Dimension of the space of symmetric X acting trivially at z, by a
/// singular-value threshold on the stacked tangent map.
inline int stabilizer_p_dim(const OrbitProblem& p, const OrbitPoint& z, double tol = 1e-7) {
    const int n = p.n;
    const int m = n * (n + 1) / 2;
    std::vector<MatrixXd> basis;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            MatrixXd e = MatrixXd::Zero(n, n);
            e(i, j) = e(j, i) = 1;
            basis.push_back(e);
        }
    MatrixXd stacked(p.k * n * n, m);
    for (int c = 0; c < m; ++c) {
        auto t = tangent_action(p, basis[c], z);
        for (int f = 0; f < p.k; ++f)
            stacked.block(f * n * n, c, n * n, 1) =
                Eigen::Map<const VectorXd>(t[f].data(), n * n);
    }
    Eigen::JacobiSVD<MatrixXd> svd(stacked);
    double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > tol * std::max(1.0, smax)) ++rank;
    return m - rank;
}

// ---------------------------------------------------------------------------
// Fixed-point components of one-parameter subgroups.

/// A connected component of the fixed-point set of a rational direction:
/// the coordinate blocks of gamma (by decreasing value) and, per factor, the
/// assignment of eigenvalue slots to blocks.
struct ComponentDescriptor {
    RatVec gamma;
    std::vector<std::vector<int>> blocks;       // matrix slot indices per block
    std::vector<std::vector<int>> assignments;  // [factor][lambda slot] -> block index

    int block_of_slot(int slot) const {
        for (size_t b = 0; b < blocks.size(); ++b)
            for (int s : blocks[b])
                if (s == slot) return (int)b;
        return -1;
    }
};

/// Coordinate blocks of gamma sorted by strictly decreasing value.
inline std::vector<std::vector<int>> blocks_from_gamma(const RatVec& gamma) {
    std::vector<Rational> values;
    for (auto& x : gamma) {
        bool seen = false;
        for (auto& v : values)
            if (v == x) { seen = true; break; }
        if (!seen) values.push_back(x);
    }
    std::sort(values.begin(), values.end(), [](const Rational& a, const Rational& b) { return b < a; });
    std::vector<std::vector<int>> blocks(values.size());
    for (size_t b = 0; b < values.size(); ++b)
        for (int i = 0; i < (int)gamma.size(); ++i)
            if (gamma[i] == values[b]) blocks[b].push_back(i);
    return blocks;
}

inline Rational gamma_value_of_block(const RatVec& gamma, const std::vector<int>& block) {
    return gamma[block.front()];
}

inline long long count_components(int n, const std::vector<std::vector<int>>& blocks, int k) {
    // multinomial(n; block sizes)^k with overflow guard
    long long per = 1;
    int placed = 0;
    for (auto& b : blocks) {
        int sz = (int)b.size();
        // choose(placed+sz, sz)
        for (int i = 1; i <= sz; ++i) {
            per = per * (placed + i) / i;
            if (per > (1ll << 40)) return -1;
        }
        placed += sz;
    }
    long long total = 1;
    for (int f = 0; f < k; ++f) {
        total *= per;
        if (total > (1ll << 40)) return -1;
    }
    return total;
}

/// All components of the fixed-point set of gamma: every per-factor
/// assignment of eigenvalue slots to blocks with the prescribed counts.
inline std::vector<ComponentDescriptor> fixed_components(const OrbitProblem& p, const RatVec& gamma,
                                                         long long bound = 4096) {
    if (p.mode != Mode::Real) throw std::invalid_argument("fixed_components: real mode only");
    if ((int)gamma.size() != p.n) throw std::invalid_argument("fixed_components: bad gamma size");
    if (rv_is_zero(gamma)) throw std::invalid_argument("fixed_components: gamma must be nonzero");
    auto blocks = blocks_from_gamma(gamma);
    long long total = count_components(p.n, blocks, p.k);
    if (total < 0 || total > bound)
        throw ResourceLimit("fixed_components: component count exceeds bound");

    // enumerate assignments of {0..n-1} into blocks with fixed counts
    std::vector<std::vector<int>> per_factor;
    std::vector<int> current(p.n, -1);
    std::vector<int> remaining(blocks.size());
    std::function<void(int)> rec = [&](int slot) {
        if (slot == p.n) {
            per_factor.push_back(current);
            return;
        }
        for (size_t b = 0; b < blocks.size(); ++b) {
            if (remaining[b] == 0) continue;
            remaining[b]--;
            current[slot] = (int)b;
            rec(slot + 1);
            remaining[b]++;
        }
    };
    for (size_t b = 0; b < blocks.size(); ++b) remaining[b] = (int)blocks[b].size();
    rec(0);

    std::vector<ComponentDescriptor> out;
    std::vector<int> pick(p.k, 0);
    while (true) {
        ComponentDescriptor c;
        c.gamma = gamma;
        c.blocks = blocks;
        for (int f = 0; f < p.k; ++f) c.assignments.push_back(per_factor[pick[f]]);
        out.push_back(std::move(c));
        int f = p.k - 1;
        while (f >= 0 && ++pick[f] == (int)per_factor.size()) pick[f--] = 0;
        if (f < 0) break;
    }
    return out;
}

/// A random point of the component: independently Haar-rotate the assigned
/// eigenvalues inside each block; exactly block-diagonal by construction.
inline OrbitPoint component_point(const OrbitProblem& p, const ComponentDescriptor& c,
                                  uint64_t seed) {
    Rng rng(derive_seed(seed, 0x0c0de));
    OrbitPoint z;
    for (int f = 0; f < p.k; ++f) {
        MatrixXd a = MatrixXd::Zero(p.n, p.n);
        for (size_t b = 0; b < c.blocks.size(); ++b) {
            std::vector<int> lam_slots;
            for (int l = 0; l < p.n; ++l)
                if (c.assignments[f][l] == (int)b) lam_slots.push_back(l);
            const int sz = (int)c.blocks[b].size();
            if ((int)lam_slots.size() != sz)
                throw std::invalid_argument("component_point: assignment counts do not match block sizes");
            VectorXd vals(sz);
            for (int i = 0; i < sz; ++i) vals[i] = p.spectra_f[f][lam_slots[i]];
            MatrixXd small;
            if (sz == 1) {
                small = MatrixXd::Constant(1, 1, vals[0]);
            } else {
                MatrixXd q = haar_rotation(sz, rng);
                small = q * vals.asDiagonal() * q.transpose();
            }
            for (int i = 0; i < sz; ++i)
                for (int j = 0; j < sz; ++j) a(c.blocks[b][i], c.blocks[b][j]) = small(i, j);
        }
        z.mats.push_back(a);
    }
    return z;
}

/// <Phi(C), gamma>: each block contributes its gamma value times the sum of
/// the eigenvalues assigned to it, exactly.
inline Rational component_moment_value(const OrbitProblem& p, const ComponentDescriptor& c) {
    Rational v;
    for (int f = 0; f < p.k; ++f)
        for (int l = 0; l < p.n; ++l) {
            int b = c.assignments[f][l];
            v += p.spectra[f][l] * gamma_value_of_block(c.gamma, c.blocks[b]);
        }
    return v;
}

// ---------------------------------------------------------------------------
// Limits of the one-parameter flow.

inline double off_block_norm(const MatrixXd& a, const std::vector<std::vector<int>>& blocks) {
    std::vector<int> block_of(a.rows(), -1);
    for (size_t b = 0; b < blocks.size(); ++b)
        for (int s : blocks[b]) block_of[s] = (int)b;
    double s = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (block_of[i] != block_of[j]) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

inline double off_block_norm(const OrbitPoint& z, const std::vector<std::vector<int>>& blocks) {
    double s = 0;
    for (auto& a : z.mats) s = std::max(s, off_block_norm(a, blocks));
    return s;
}

/// Read the component of a (nearly) block-diagonal point: each block's
/// eigenvalues are matched against the factor spectrum. Fails when the match
/// is ambiguous beyond tol.
inline std::optional<ComponentDescriptor> identify_component(const OrbitProblem& p,
                                                             const OrbitPoint& z, const RatVec& gamma,
                                                             double tol) {
    ComponentDescriptor c;
    c.gamma = gamma;
    c.blocks = blocks_from_gamma(gamma);
    for (int f = 0; f < p.k; ++f) {
        std::vector<int> assign(p.n, -1);
        std::vector<bool> used(p.n, false);
        for (size_t b = 0; b < c.blocks.size(); ++b) {
            const int sz = (int)c.blocks[b].size();
            MatrixXd small(sz, sz);
            for (int i = 0; i < sz; ++i)
                for (int j = 0; j < sz; ++j) small(i, j) = z.mats[f](c.blocks[b][i], c.blocks[b][j]);
            VectorXd ev = sz == 1 ? VectorXd::Constant(1, small(0, 0)) : sym_eig_desc(small).first;
            for (int i = 0; i < sz; ++i) {
                int bestl = -1;
                double bestd = tol;
                for (int l = 0; l < p.n; ++l) {
                    if (used[l]) continue;
                    double d = std::fabs(ev[i] - p.spectra_f[f][l]);
                    if (d < bestd) { bestd = d; bestl = l; }
                }
                if (bestl < 0) return std::nullopt;
                used[bestl] = true;
                assign[bestl] = (int)b;
            }
        }
        c.assignments.push_back(std::move(assign));
    }
    return c;
}

inline double min_spectrum_gap(const OrbitProblem& p) {
    double g = std::numeric_limits<double>::infinity();
    for (auto& s : p.spectra_f)
        for (int i = 0; i + 1 < p.n; ++i) g = std::min(g, s[i] - s[i + 1]);
    return g;
}

struct BBControls {
    double dt = 0.5;
    double tol = 1e-8;
    int max_steps = 400;
};

struct BBResult {
    OrbitPoint limit;
    ComponentDescriptor component;
    int steps = 0;
    double residual = 0.0;
};

/// Iterate the one-parameter action exp(t*diag(gamma)) until every factor is
/// block-diagonal to tolerance; returns the limit and its component.
inline BBResult bb_limit(const OrbitProblem& p, const OrbitPoint& z, const RatVec& gamma,
                         const BBControls& controls = {}) {
    if (rv_is_zero(gamma)) throw std::invalid_argument("bb_limit: gamma must be nonzero");
    auto blocks = blocks_from_gamma(gamma);
    VectorXd g = rv_to_eigen(gamma);
    double scale = g.lpNorm<Eigen::Infinity>();
    VectorXd step_exp(p.n);
    for (int i = 0; i < p.n; ++i) step_exp[i] = std::exp(controls.dt * g[i] / scale);
    MatrixXd gmat = step_exp.asDiagonal();

    OrbitPoint cur = z;
    int steps = 0;
    double res = off_block_norm(cur, blocks);
    while (res > controls.tol && steps < controls.max_steps) {
        cur = g_action(p, gmat, cur);
        res = off_block_norm(cur, blocks);
        ++steps;
    }
    if (res > controls.tol)
        throw NumericFailure("bb_limit: no convergence after " + std::to_string(steps) +
                             " steps, residual " + std::to_string(res));
    double eigen_tol = 0.45 * min_spectrum_gap(p);
    auto c = identify_component(p, cur, gamma, eigen_tol);
    if (!c) throw NumericFailure("bb_limit: limit eigenvalues do not match any component");
    return {cur, *c, steps, res};
}

/// Rotate z so that its moment is exactly diagonal with descending entries;
/// stays on the orbit (conjugation by a rotation).
inline OrbitPoint rotate_to_diagonal_moment(const OrbitProblem& p, const OrbitPoint& z) {
    MatrixXd s = moment_p(p, z);
    MatrixXd q = sym_eig_desc(s).second;
    if (q.determinant() < 0) q.col(p.n - 1) = -q.col(p.n - 1);
    return g_action(p, MatrixXd(q.transpose()), z);
}

/// Norm of the gamma vector field at z; zero exactly on the fixed-point set.
inline double gamma_tangent_norm(const OrbitProblem& p, const RatVec& gamma, const OrbitPoint& z) {
    MatrixXd g = rv_to_eigen(gamma).asDiagonal();
    auto t = tangent_action(p, g, z);
    double s = 0;
    for (auto& m : t) s += m.squaredNorm();
    return std::sqrt(s);
}

} // namespace rmp
