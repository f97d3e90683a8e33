#pragma once

#include <vector>

#include "rmp/orbit.hpp"

namespace rmp {

struct FlowControls {
    double step = 0.05;
    double tol = 1e-9;        // critical-point residual on max_i ||[A_i, S]||
    int max_steps = 50000;
    double shrink_factor = 0.5;
    int min_steps = 0;        // keep stepping even after convergence (trace studies)

    void validate() const {
        if (!(step > 0)) throw std::invalid_argument("FlowControls: step must be positive");
        if (!(shrink_factor > 0 && shrink_factor < 1))
            throw std::invalid_argument("FlowControls: shrink_factor must be in (0,1)");
    }
};

template <class Scalar>
struct FlowResultT {
    OrbitPointT<Scalar> limit;
    Mat<Scalar> limit_moment;
    VectorXd type_vector;       // descending spectrum of the limit moment
    std::vector<double> f_trace;
    std::vector<double> residual_trace;
    bool converged = false;
    double residual = 0.0;
    int steps = 0;
};

using FlowResult = FlowResultT<double>;
using FlowResultC = FlowResultT<cplx>;

namespace flow_detail {

template <class Scalar>
double half_norm_sq(const Mat<Scalar>& s) {
    return 0.5 * s.squaredNorm();
}

template <class Scalar>
VectorXd spectrum_desc(const Mat<Scalar>& s);

template <>
inline VectorXd spectrum_desc<double>(const MatrixXd& s) {
    return sym_eig_desc(s).first;
}
template <>
inline VectorXd spectrum_desc<cplx>(const MatrixXc& s) {
    return herm_eig_desc(s).first;
}

/// One conjugation step A_i <- exp(-h W_i) A_i exp(h W_i) with W_i = [A_i, S].
template <class Scalar>
std::vector<Mat<Scalar>> conjugate_step(const std::vector<Mat<Scalar>>& mats,
                                        const std::vector<Mat<Scalar>>& omegas, double h) {
    std::vector<Mat<Scalar>> out(mats.size());
    for (size_t i = 0; i < mats.size(); ++i) {
        Mat<Scalar> e = expm<Scalar>(Mat<Scalar>(-h * omegas[i]));
        out[i] = e * mats[i] * e.adjoint();
    }
    return out;
}

/// Norm-square gradient flow on a plain list of isospectral factors. The
/// vector field per factor is [A_i, [A_i, S]] with S the sum; integration is
/// by conjugation, so spectra are preserved to rounding. Steps are halved
/// until the objective decreases.
template <class Scalar>
FlowResultT<Scalar> run(std::vector<Mat<Scalar>> mats, const FlowControls& controls) {
    controls.validate();
    FlowResultT<Scalar> out;
    const int k = (int)mats.size();
    auto moment = [&]() {
        Mat<Scalar> s = mats[0];
        for (int i = 1; i < k; ++i) s += mats[i];
        return s;
    };

    Mat<Scalar> s = moment();
    double f = half_norm_sq(s);
    double h = controls.step;
    out.f_trace.push_back(f);

    // Descent is enforced only above rounding level; near a critical point
    // the objective differences fall below double precision long before the
    // commutator residual does.
    const double slack = 1e-12;

    int step_count = 0;
    double res = 0;
    for (; step_count < controls.max_steps; ++step_count) {
        std::vector<Mat<Scalar>> omegas(k);
        res = 0;
        for (int i = 0; i < k; ++i) {
            omegas[i] = commutator<Scalar>(mats[i], s);
            res = std::max(res, fro_norm<Scalar>(omegas[i]));
        }
        out.residual_trace.push_back(res);
        if (res <= controls.tol && step_count >= controls.min_steps) {
            out.converged = true;
            break;
        }

        bool accepted = false;
        double htry = h;
        for (int halvings = 0; halvings < 60; ++halvings) {
            auto cand = conjugate_step(mats, omegas, htry);
            Mat<Scalar> s2 = cand[0];
            for (int i = 1; i < k; ++i) s2 += cand[i];
            double f2 = half_norm_sq(s2);
            if (f2 <= f + slack * std::max(1.0, f)) {
                mats = std::move(cand);
                s = std::move(s2);
                f = f2;
                accepted = true;
                h = std::min(controls.step, htry / controls.shrink_factor);
                break;
            }
            htry *= controls.shrink_factor;
        }
        out.f_trace.push_back(f);
        if (!accepted) break;  // no acceptable step: critical to rounding
    }

    std::vector<Mat<Scalar>> omegas(k);
    res = 0;
    for (int i = 0; i < k; ++i)
        res = std::max(res, fro_norm<Scalar>(commutator<Scalar>(mats[i], s)));
    out.converged = res <= controls.tol;
    out.residual = res;
    out.steps = step_count;
    out.limit.mats = std::move(mats);
    out.limit_moment = s;
    out.type_vector = spectrum_desc<Scalar>(out.limit_moment);
    return out;
}

} // namespace flow_detail

inline FlowResult kirwan_flow(const OrbitProblem& p, const OrbitPoint& z,
                              const FlowControls& controls = {}) {
    return flow_detail::run<double>(z.mats, controls);
}

inline FlowResultC kirwan_flow_hermitian(const OrbitProblem& p, const OrbitPointC& z,
                                         const FlowControls& controls = {}) {
    return flow_detail::run<cplx>(z.mats, controls);
}

struct ShiftedFlowResult {
    VectorXd xi_prime;   // descending spectrum of the un-shifted moment at the limit
    VectorXd gamma;      // xi_prime - xi
    double dist = 0.0;   // norm of the limit moment of the augmented product
    FlowResult result;
};

/// Membership/projection via the shifting trick: append one factor with
/// spectrum -reverse(xi) and flow the augmented product. The limit norm is
/// the distance from xi to the moment body; the descending spectrum of the
/// original factors' sum at the limit recovers the projection xi'.
inline ShiftedFlowResult shifted_flow(const OrbitProblem& p, const VectorXd& xi,
                                      const FlowControls& controls = {}, uint64_t seed = 1) {
    if ((int)xi.size() != p.n) throw std::invalid_argument("shifted_flow: bad xi size");
    for (int i = 0; i + 1 < p.n; ++i)
        if (!(xi[i] > xi[i + 1]))
            throw std::invalid_argument("shifted_flow: xi must be strictly decreasing");

    Rng rng(derive_seed(seed, 0x5f10));
    std::vector<MatrixXd> mats;
    for (int f = 0; f < p.k; ++f) {
        MatrixXd q = haar_rotation(p.n, rng);
        mats.push_back(q * p.spectra_f[f].asDiagonal() * q.transpose());
    }
    VectorXd shift_spec(p.n);
    for (int i = 0; i < p.n; ++i) shift_spec[i] = -xi[p.n - 1 - i];
    MatrixXd q = haar_rotation(p.n, rng);
    mats.push_back(q * shift_spec.asDiagonal() * q.transpose());

    FlowResult res = flow_detail::run<double>(mats, controls);
    if (!res.converged)
        throw NumericFailure("shifted_flow: flow did not reach the critical residual");

    MatrixXd sum_m = MatrixXd::Zero(p.n, p.n);
    for (int f = 0; f < p.k; ++f) sum_m += res.limit.mats[f];
    ShiftedFlowResult out;
    out.result = std::move(res);
    out.xi_prime = sym_eig_desc(sum_m).first;
    out.gamma = out.xi_prime - xi;
    out.dist = out.result.limit_moment.norm();
    return out;
}

} // namespace rmp
