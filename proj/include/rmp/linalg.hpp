#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "rmp/errors.hpp"
#include "rmp/rational.hpp"
#include "rmp/rng.hpp"

namespace rmp {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using cplx = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

inline VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const VectorXd>(v.data(), (Eigen::Index)v.size());
}

inline std::vector<double> from_eigen(const VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

inline VectorXd rv_to_eigen(const RatVec& v) {
    VectorXd r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[(Eigen::Index)i] = v[i].value();
    return r;
}

template <class Scalar>
Mat<Scalar> commutator(const Mat<Scalar>& a, const Mat<Scalar>& b) {
    return a * b - b * a;
}

template <class Scalar>
double fro_norm(const Mat<Scalar>& a) {
    return a.norm();
}

// ---------------------------------------------------------------------------
// Deterministic symmetric/Hermitian eigendecomposition.

namespace detail {
inline void fix_sign(Eigen::Ref<VectorXd> col) {
    for (Eigen::Index i = 0; i < col.size(); ++i) {
        if (std::fabs(col[i]) > 1e-11) {
            if (col[i] < 0) col = -col;
            return;
        }
    }
}
inline void fix_phase(Eigen::Ref<VectorXc> col) {
    for (Eigen::Index i = 0; i < col.size(); ++i) {
        if (std::abs(col[i]) > 1e-11) {
            cplx ph = col[i] / std::abs(col[i]);
            col = col / ph;
            return;
        }
    }
}
} // namespace detail

/// Eigenvalues descending; eigenvector columns with the first non-negligible
/// component made positive (real) / real-positive (complex), so flags are
/// reproducible across runs.
inline std::pair<VectorXd, MatrixXd> sym_eig_desc(const MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw NumericFailure("symmetric eigensolver failed");
    Eigen::Index n = a.rows();
    VectorXd vals(n);
    MatrixXd vecs(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        vals[i] = es.eigenvalues()[n - 1 - i];
        vecs.col(i) = es.eigenvectors().col(n - 1 - i);
        detail::fix_sign(vecs.col(i));
    }
    return {vals, vecs};
}

inline std::pair<VectorXd, MatrixXc> herm_eig_desc(const MatrixXc& a) {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(a);
    if (es.info() != Eigen::Success) throw NumericFailure("Hermitian eigensolver failed");
    Eigen::Index n = a.rows();
    VectorXd vals(n);
    MatrixXc vecs(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        vals[i] = es.eigenvalues()[n - 1 - i];
        vecs.col(i) = es.eigenvectors().col(n - 1 - i);
        detail::fix_phase(vecs.col(i));
    }
    return {vals, vecs};
}

// ---------------------------------------------------------------------------
// QR with positive diagonal and Haar sampling.

/// Q factor of a with R chosen to have positive diagonal.
inline MatrixXd qr_positive(const MatrixXd& a) {
    Eigen::HouseholderQR<MatrixXd> qr(a);
    MatrixXd q = qr.householderQ();
    MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < a.cols(); ++i)
        if (r(i, i) < 0) q.col(i) = -q.col(i);
    return q;
}

inline MatrixXc qr_positive(const MatrixXc& a) {
    Eigen::HouseholderQR<MatrixXc> qr(a);
    MatrixXc q = qr.householderQ();
    MatrixXc r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
        cplx d = r(i, i);
        if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
    }
    return q;
}

/// Haar-distributed element of SO(n): QR of a Gaussian matrix with
/// sign-fixed diagonal, then a column flip to land in the identity component.
inline MatrixXd haar_rotation(int n, Rng& rng) {
    MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.gauss();
    MatrixXd q = qr_positive(g);
    if (q.determinant() < 0) q.col(n - 1) = -q.col(n - 1);
    return q;
}

/// Haar-distributed element of U(n).
inline MatrixXc haar_unitary(int n, Rng& rng) {
    MatrixXc g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = cplx(rng.gauss(), rng.gauss());
    return qr_positive(g);
}

// ---------------------------------------------------------------------------
// Matrix exponential: [6/6] Pade with scaling and squaring. Adequate for the
// small (n <= 6) conjugators used here; exactly unitary up to rounding for
// skew/anti-Hermitian input.

template <class Scalar>
Mat<Scalar> expm(const Mat<Scalar>& a) {
    const Eigen::Index n = a.rows();
    double norm = a.template lpNorm<1>();
    int squarings = 0;
    Mat<Scalar> x = a;
    if (norm > 0.5) {
        squarings = (int)std::ceil(std::log2(norm / 0.5));
        x /= std::pow(2.0, squarings);
    }
    // Pade [6/6] coefficients via c_0 = 1, c_j = c_{j-1} * (7-j)/(j*(13-j)).
    double c[7];
    c[0] = 1.0;
    for (int j = 1; j <= 6; ++j) c[j] = c[j - 1] * (7.0 - j) / (j * (13.0 - j));
    Mat<Scalar> x2 = x * x;
    Mat<Scalar> even = c[0] * Mat<Scalar>::Identity(n, n) + c[2] * x2;
    Mat<Scalar> odd = c[1] * Mat<Scalar>::Identity(n, n) + c[3] * x2;
    Mat<Scalar> x4 = x2 * x2;
    even += c[4] * x4;
    odd += c[5] * x4;
    even += c[6] * x4 * x2;
    Mat<Scalar> u = x * odd;
    Mat<Scalar> p = even + u;
    Mat<Scalar> q = even - u;
    Mat<Scalar> r = q.fullPivLu().solve(p);
    for (int i = 0; i < squarings; ++i) r = r * r;
    return r;
}

} // namespace rmp
