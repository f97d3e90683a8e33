#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmp/flow.hpp"
#include "rmp/polytope.hpp"

namespace rmp {

enum class Provenance { GammaS, Affine, Facet, Projection, Exhaustive };

inline std::string provenance_name(Provenance p) {
    switch (p) {
        case Provenance::GammaS: return "gamma_s";
        case Provenance::Affine: return "affine";
        case Provenance::Facet: return "facet";
        case Provenance::Projection: return "projection";
        case Provenance::Exhaustive: return "exhaustive";
    }
    return "?";
}

/// Graded data of the rank test at a component point: the restricted-root
/// generators of negative gamma-weight, the contracted tangent directions,
/// and the matrix of the infinitesimal action between them.
struct WeightDecomposition {
    std::vector<std::pair<int, int>> lie_slots;  // matrix slots (i,j), i > j, gamma_i < gamma_j
    struct TangentDir {
        int factor;
        int hi;  // eigenvalue slot of the larger eigenvalue
        int lo;  // eigenvalue slot of the smaller eigenvalue
    };
    std::vector<TangentDir> tangent_dirs;
    int lie_dim = 0;
    int tangent_dim = 0;
    bool dims_match = false;
    MatrixXd map_matrix;
    int numeric_rank = 0;
    double tol = 0.0;
};

struct PairTestResult {
    bool is_pair = false;
    WeightDecomposition witness;
};

struct AdmissibleResult {
    bool admissible = false;
    int dim_z = 0;
    int dim_z_gamma = 0;
};

struct RessayrePair {
    RatVec gamma;
    bool gamma_is_rational = true;
    VectorXd gamma_float;
    ComponentDescriptor component;
    Rational value;
    double value_float = 0.0;
    bool admissible = false;
    bool regular = false;  // admissible and dim_p(C) - dim_p(Z) in {0,1}
    bool is_pair = false;
    int dim_z = 0;
    int dim_z_gamma = 0;
    int dim_component = 0;
    WeightDecomposition witness;
    Provenance provenance = Provenance::Exhaustive;
};

// ---------------------------------------------------------------------------
// Admissibility: sampled stabilizer dimensions.

inline AdmissibleResult is_admissible(const OrbitProblem& p, const RatVec& gamma,
                                      int sampling_budget = 12, uint64_t seed = 7,
                                      double tol = 1e-7, long long component_bound = 4096) {
    if (rv_is_zero(gamma)) throw std::invalid_argument("is_admissible: gamma must be nonzero");
    AdmissibleResult r;
    int dim_z = INT32_MAX;
    for (int i = 0; i < std::max(1, sampling_budget); ++i)
        dim_z = std::min(dim_z, stabilizer_p_dim(p, sample_one(p, seed, i), tol));
    auto comps = fixed_components(p, gamma, component_bound);
    int per = std::max(1, sampling_budget / std::max<int>(1, (int)comps.size()));
    int dim_zg = INT32_MAX;
    for (size_t c = 0; c < comps.size(); ++c)
        for (int i = 0; i < per; ++i)
            dim_zg = std::min(dim_zg,
                              stabilizer_p_dim(p, component_point(p, comps[c], derive_seed(seed, 1000 + c * 97 + i)), tol));
    r.dim_z = dim_z;
    r.dim_z_gamma = dim_zg;
    int diff = dim_zg - dim_z;
    r.admissible = diff == 0 || diff == 1;
    return r;
}

/// Minimal stabilizer dimension over sampled points of one component.
inline int component_dim_p(const OrbitProblem& p, const ComponentDescriptor& c, int budget = 4,
                           uint64_t seed = 7, double tol = 1e-7) {
    int d = INT32_MAX;
    for (int i = 0; i < std::max(1, budget); ++i)
        d = std::min(d, stabilizer_p_dim(p, component_point(p, c, derive_seed(seed, 5000 + i)), tol));
    return d;
}

// ---------------------------------------------------------------------------
// The infinitesimal rank test.

/// Exact dimensions on both sides of the graded map, from the combinatorics
/// of the component alone; the numeric part is only the rank of the matrix.
inline PairTestResult infinitesimal_pair_test(const OrbitProblem& p, const RatVec& gamma,
                                              const ComponentDescriptor& c, int trials = 8,
                                              double tol = 1e-7, uint64_t seed = 11) {
    if ((int)gamma.size() != p.n) throw std::invalid_argument("pair test: bad gamma size");
    PairTestResult out;
    WeightDecomposition& w = out.witness;
    w.tol = tol;

    for (int i = 0; i < p.n; ++i)
        for (int j = 0; j < i; ++j)
            if (gamma[i] < gamma[j]) w.lie_slots.push_back({i, j});
    w.lie_dim = (int)w.lie_slots.size();

    // gamma value of the block each eigenvalue slot is assigned to
    std::vector<std::vector<Rational>> slot_gamma(p.k, std::vector<Rational>(p.n));
    for (int f = 0; f < p.k; ++f)
        for (int l = 0; l < p.n; ++l)
            slot_gamma[f][l] = gamma_value_of_block(gamma, c.blocks[c.assignments[f][l]]);
    for (int f = 0; f < p.k; ++f)
        for (int hi = 0; hi < p.n; ++hi)
            for (int lo = hi + 1; lo < p.n; ++lo)
                if (slot_gamma[f][hi] > slot_gamma[f][lo])
                    w.tangent_dirs.push_back({f, hi, lo});
    w.tangent_dim = (int)w.tangent_dirs.size();
    w.dims_match = w.lie_dim == w.tangent_dim;
    if (!w.dims_match) return out;  // exact rejection, no rank computation
    if (w.lie_dim == 0) {
        out.is_pair = true;  // zero map between zero spaces
        w.numeric_rank = 0;
        return out;
    }

    for (int trial = 0; trial < std::max(1, trials); ++trial) {
        OrbitPoint x = component_point(p, c, derive_seed(seed, trial));
        std::vector<MatrixXd> frames(p.k);
        for (int f = 0; f < p.k; ++f) frames[f] = sym_eig_desc(x.mats[f]).second;

        MatrixXd m(w.tangent_dim, w.lie_dim);
        for (int col = 0; col < w.lie_dim; ++col) {
            auto [i, j] = w.lie_slots[col];
            MatrixXd e = MatrixXd::Zero(p.n, p.n);
            e(i, j) = 1;
            auto t = tangent_action(p, e, x);
            for (int row = 0; row < w.tangent_dim; ++row) {
                auto& dir = w.tangent_dirs[row];
                const auto& q = frames[dir.factor];
                MatrixXd basis = q.col(dir.hi) * q.col(dir.lo).transpose() +
                                 q.col(dir.lo) * q.col(dir.hi).transpose();
                m(row, col) = 0.5 * (t[dir.factor].array() * basis.array()).sum();
            }
        }
        Eigen::JacobiSVD<MatrixXd> svd(m);
        double smax = svd.singularValues()[0];
        int rank = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()[i] > tol * std::max(smax, 1e-300)) ++rank;
        if (rank > w.numeric_rank) {
            w.numeric_rank = rank;
            w.map_matrix = m;
        }
        if (rank == w.lie_dim) {
            out.is_pair = true;
            return out;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hull-driven pair generation.

struct VerifyOptions {
    uint64_t seed = 1;
    int count = 10000;
    int trials = 8;
    double rank_tol = 1e-7;
    int admissible_budget = 12;
    long long component_bound = 4096;
    double membership_tol = 1e-8;
    double soundness_tol = 1e-8;
    double hausdorff_tol = 1e-2;
    double wall_tol = 1e-6;
    double value_tol = 1e-2;
    double fiber_dist = 5e-2;
    long long max_den = 64;
    double residual_tol = 1e-6;
    double snap_tol = 2e-2;
    double support_slack = 1e-3;
    int min_support = 3;
    double merge_angle = 1e-2;
    double hull_tol = 1e-9;
    FlowControls flow;
    BBControls bb;
    bool exhaustive = false;
    int probe_count = 0;
};

struct SampleSet {
    uint64_t seed = 0;
    std::vector<VectorXd> chamber;
};

inline SampleSet build_samples(const OrbitProblem& p, uint64_t seed, int count) {
    SampleSet s;
    s.seed = seed;
    s.chamber.reserve(count);
    for (int i = 0; i < count; ++i)
        s.chamber.push_back(moment_chamber(p, sample_one(p, seed, i)));
    return s;
}

/// The open chamber face whose closure carries the sampled body: walls that
/// are saturated across the entire cloud vanish on it.
inline ChamberFace detect_principal_face(const RootSystem& rs, const std::vector<VectorXd>& cloud,
                                         double wall_tol, std::vector<std::string>* warnings) {
    const int n = rs.ambient;
    std::vector<int> saturated;
    for (int i = 0; i + 1 < n; ++i) {
        double mx = 0;
        for (auto& c : cloud) mx = std::max(mx, c[i] - c[i + 1]);
        if (mx <= wall_tol) {
            saturated.push_back(i);
        } else if (mx <= 10 * wall_tol && warnings) {
            warnings->push_back("wall " + std::to_string(i) +
                                " saturation ambiguous (max gap " + std::to_string(mx) + ")");
        }
    }
    return make_face(rs, saturated);
}

/// Locate the fixed-point component from a point that is already nearly
/// block-diagonal (exact fibers are). Asymptotic flow is wrong here: a point
/// off the fixed set drifts along the expanding directions, so proximity is
/// certified instead.
inline std::optional<ComponentDescriptor> locate_component_near(const OrbitProblem& p,
                                                                const OrbitPoint& z,
                                                                const RatVec& gamma,
                                                                double off_tol) {
    auto blocks = blocks_from_gamma(gamma);
    if (off_block_norm(z, blocks) > off_tol) return std::nullopt;
    return identify_component(p, z, gamma, 0.45 * min_spectrum_gap(p));
}

struct FacetCertificate {
    VectorXd eta_float;       // unit inward normal, ambient
    std::optional<RatVec> eta;
    bool snapped = false;
    bool trivial = false;     // carried by a chamber wall
    bool spurious = false;    // sampling artifact without facet-level support
    bool verified = false;
    double support_offset = 0.0;  // min over cloud of <x, eta_float>
    int support_count = 0;
    double min_slack = 0.0;       // against the emitted rational inequality
    std::optional<RessayrePair> pair;
    std::string note;
};

namespace pair_detail {

struct MergedFacet {
    VectorXd normal;  // ambient unit, inward
    std::vector<VectorXd> verts;
};

inline std::vector<MergedFacet> merge_facets(const Polytope& hull, double merge_angle) {
    std::vector<MergedFacet> groups;
    double scale = 1.0;
    for (auto& v : hull.vertices) scale = std::max(scale, v.lpNorm<Eigen::Infinity>());
    for (auto& h : hull.halfspaces) {
        VectorXd n = h.normal.normalized();
        MergedFacet* grp = nullptr;
        for (auto& g : groups)
            if (g.normal.dot(n) >= std::cos(merge_angle)) { grp = &g; break; }
        if (!grp) {
            groups.push_back({n, {}});
            grp = &groups.back();
        }
        for (auto& v : hull.vertices)
            if (std::fabs(v.dot(h.normal) - h.offset) <= 1e-7 * std::max(1.0, scale)) {
                bool dup = false;
                for (auto& w : grp->verts)
                    if ((w - v).norm() < 1e-12) { dup = true; break; }
                if (!dup) grp->verts.push_back(v);
            }
    }
    return groups;
}

/// Refit the facet plane inside the affine hull from its supporting vertices.
inline VectorXd refit_normal(const MergedFacet& g, const Polytope& hull) {
    const Eigen::Index r = hull.affine_basis.cols();
    if (r <= 1 || (Eigen::Index)g.verts.size() < r) return g.normal;
    MatrixXd loc(g.verts.size(), r);
    VectorXd mean = VectorXd::Zero(r);
    for (size_t i = 0; i < g.verts.size(); ++i) {
        loc.row(i) = (hull.affine_basis.transpose() * (g.verts[i] - hull.affine_basepoint)).transpose();
        mean += loc.row(i).transpose();
    }
    mean /= (double)g.verts.size();
    MatrixXd cov = MatrixXd::Zero(r, r);
    for (size_t i = 0; i < g.verts.size(); ++i) {
        VectorXd d = loc.row(i).transpose() - mean;
        cov += d * d.transpose();
    }
    VectorXd nloc = sym_eig_desc(cov).second.col(r - 1);  // least-variance direction
    VectorXd namb = hull.affine_basis * nloc;
    // orient inward against the hull centroid
    VectorXd centroid = VectorXd::Zero(hull.vertices[0].size());
    for (auto& v : hull.vertices) centroid += v;
    centroid /= (double)hull.vertices.size();
    VectorXd rep = g.verts[0];
    if ((centroid - rep).dot(namb) < 0) namb = -namb;
    return namb.normalized();
}

/// Chamber-wall directions projected into the direction space of the hull.
inline std::vector<VectorXd> wall_directions(const RootSystem& rs, const Polytope& hull) {
    std::vector<VectorXd> out;
    const MatrixXd& b = hull.affine_basis;
    for (auto& alpha : rs.simple_roots) {
        VectorXd w = rv_to_eigen(alpha);
        VectorXd proj = b * (b.transpose() * w);
        if (proj.norm() > 1e-9) out.push_back(proj.normalized());
    }
    return out;
}

} // namespace pair_detail

/// Pairs carried by the principal chamber face. Empty whenever the face is
/// the full interior, which is the generic case for distinct spectra.
inline std::vector<RessayrePair> generate_gamma_s_pair(const OrbitProblem& p, const RootSystem& rs,
                                                       const SampleSet& sset,
                                                       const VerifyOptions& opts,
                                                       std::vector<std::string>* warnings = nullptr) {
    ChamberFace face = detect_principal_face(rs, sset.chamber, opts.wall_tol, warnings);
    if (face.vanishing_simple_roots.empty()) return {};
    RatVec gs = gamma_s(rs, face);
    if (rv_is_zero(gs)) return {};

    OrbitPoint z = rotate_to_diagonal_moment(p, sample_one(p, sset.seed, 0));
    ComponentDescriptor comp;
    auto near = locate_component_near(p, z, gs, 0.25 * min_spectrum_gap(p));
    if (near) {
        comp = *near;
    } else {
        comp = bb_limit(p, z, gs, opts.bb).component;
    }
    RessayrePair pair;
    pair.gamma = gs;
    pair.gamma_float = rv_to_eigen(gs);
    pair.component = comp;
    pair.value = component_moment_value(p, comp);
    pair.value_float = pair.value.value();
    auto adm = is_admissible(p, gs, opts.admissible_budget, opts.seed, opts.rank_tol, opts.component_bound);
    pair.admissible = adm.admissible;
    pair.dim_z = adm.dim_z;
    pair.dim_z_gamma = adm.dim_z_gamma;
    pair.dim_component = component_dim_p(p, comp, 4, opts.seed, opts.rank_tol);
    pair.regular = pair.admissible && (pair.dim_component - pair.dim_z == 0 || pair.dim_component - pair.dim_z == 1);
    auto test = infinitesimal_pair_test(p, gs, comp, opts.trials, opts.rank_tol, opts.seed);
    pair.is_pair = test.is_pair;
    pair.witness = test.witness;
    pair.provenance = Provenance::GammaS;
    return {pair};
}

/// Equality pairs spanning the orthogonal complement of the body's affine
/// hull: one +/- pair per rationalized normal direction.
inline std::vector<RessayrePair> generate_affine_pairs(const OrbitProblem& p, const RootSystem& rs,
                                                       const SampleSet& sset, const Polytope& hull,
                                                       const VerifyOptions& opts,
                                                       std::vector<std::string>* warnings = nullptr) {
    std::vector<RessayrePair> out;
    ChamberFace face = detect_principal_face(rs, sset.chamber, opts.wall_tol, nullptr);
    RatVec gs = face.vanishing_simple_roots.empty() ? rv_zero(p.n) : gamma_s(rs, face);

    OrbitPoint z0 = rotate_to_diagonal_moment(p, sample_one(p, sset.seed, 0));

    for (Eigen::Index j = 0; j < hull.normal_basis.cols(); ++j) {
        std::vector<double> col(hull.normal_basis.col(j).data(),
                                hull.normal_basis.col(j).data() + p.n);
        auto rat = rationalize_vector(col, opts.max_den, opts.residual_tol);
        bool snapped = false;
        if (!rat) {
            rat = snap_vector(col, opts.snap_tol, opts.max_den);
            snapped = true;
        }
        if (!rat) {
            if (warnings)
                warnings->push_back("affine normal " + std::to_string(j) +
                                    " has no rational reconstruction; pair skipped");
            continue;
        }
        for (int sign : {+1, -1}) {
            RatVec gamma = rv_add(sign > 0 ? rat->value : rv_neg(rat->value), gs);
            if (rv_is_zero(gamma)) continue;
            auto comp = locate_component_near(p, z0, gamma, 0.25 * min_spectrum_gap(p));
            if (!comp) {
                try {
                    comp = bb_limit(p, z0, gamma, opts.bb).component;
                } catch (const NumericFailure&) {
                    if (warnings)
                        warnings->push_back("affine pair component not located for direction " +
                                            std::to_string(j));
                    continue;
                }
            }
            RessayrePair pair;
            pair.gamma = gamma;
            pair.gamma_is_rational = true;
            pair.gamma_float = rv_to_eigen(gamma);
            if (snapped && warnings)
                warnings->push_back("affine normal " + std::to_string(j) + " snapped to rational");
            pair.component = *comp;
            pair.value = component_moment_value(p, *comp);
            pair.value_float = pair.value.value();
            auto adm = is_admissible(p, gamma, opts.admissible_budget, opts.seed, opts.rank_tol,
                                     opts.component_bound);
            pair.admissible = adm.admissible;
            pair.dim_z = adm.dim_z;
            pair.dim_z_gamma = adm.dim_z_gamma;
            pair.dim_component = component_dim_p(p, *comp, 4, opts.seed, opts.rank_tol);
            pair.regular = pair.admissible &&
                           (pair.dim_component - pair.dim_z == 0 || pair.dim_component - pair.dim_z == 1);
            auto test = infinitesimal_pair_test(p, gamma, *comp, opts.trials, opts.rank_tol, opts.seed);
            pair.is_pair = test.is_pair;
            pair.witness = test.witness;
            pair.provenance = Provenance::Affine;
            out.push_back(std::move(pair));
        }
    }
    return out;
}

/// Facet pairs: one certified (gamma, component) per non-trivial facet of the
/// sampled hull. Components are located from near-fiber samples and checked
/// against the facet's support offset; the emitted value is the component's
/// exact rational one.
inline std::vector<FacetCertificate> generate_facet_pairs(const OrbitProblem& p, const RootSystem& rs,
                                                          const SampleSet& sset, const Polytope& hull,
                                                          const VerifyOptions& opts,
                                                          std::vector<std::string>* warnings = nullptr) {
    std::vector<FacetCertificate> out;
    if (hull.affine_basis.cols() == 0) return out;  // a point has no facets

    ChamberFace face = detect_principal_face(rs, sset.chamber, opts.wall_tol, nullptr);
    RatVec gs = face.vanishing_simple_roots.empty() ? rv_zero(p.n) : gamma_s(rs, face);
    auto walls = pair_detail::wall_directions(rs, hull);
    double scale = 1.0;
    for (auto& v : hull.vertices) scale = std::max(scale, v.lpNorm<Eigen::Infinity>());

    for (auto& grp : pair_detail::merge_facets(hull, opts.merge_angle)) {
        FacetCertificate cert;
        cert.eta_float = pair_detail::refit_normal(grp, hull);

        for (auto& w : walls)
            if (cert.eta_float.dot(w) >= std::cos(opts.merge_angle)) {
                cert.trivial = true;
                cert.note = "chamber wall";
                break;
            }
        double offset = std::numeric_limits<double>::infinity();
        int support = 0;
        int nearest = -1;
        double nearest_slack = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < sset.chamber.size(); ++i) {
            double v = sset.chamber[i].dot(cert.eta_float);
            offset = std::min(offset, v);
        }
        for (size_t i = 0; i < sset.chamber.size(); ++i) {
            double slack = sset.chamber[i].dot(cert.eta_float) - offset;
            if (slack <= opts.support_slack * std::max(1.0, scale)) ++support;
            if (slack < nearest_slack) { nearest_slack = slack; nearest = (int)i; }
        }
        cert.support_offset = offset;
        cert.support_count = support;
        if (cert.trivial) {
            out.push_back(std::move(cert));
            continue;
        }
        if (support < opts.min_support) {
            cert.spurious = true;
            cert.note = "insufficient facet-level support in the cloud";
            out.push_back(std::move(cert));
            continue;
        }

        std::vector<double> nf(cert.eta_float.data(), cert.eta_float.data() + p.n);
        auto rat = rationalize_vector(nf, opts.max_den, opts.residual_tol);
        if (!rat) {
            rat = snap_vector(nf, opts.snap_tol, opts.max_den);
            if (rat) {
                // a snapped normal must be re-supported by the cloud
                VectorXd eta_r = rv_to_eigen(rat->value).normalized();
                if (eta_r.dot(cert.eta_float) < std::cos(opts.snap_tol)) {
                    rat.reset();
                } else {
                    double off2 = std::numeric_limits<double>::infinity();
                    int sup2 = 0;
                    for (auto& c : sset.chamber) off2 = std::min(off2, c.dot(eta_r));
                    for (auto& c : sset.chamber)
                        if (c.dot(eta_r) - off2 <= opts.support_slack * std::max(1.0, scale)) ++sup2;
                    if (sup2 < opts.min_support) rat.reset();
                    cert.snapped = true;
                }
            }
        }
        if (!rat) {
            cert.note = "facet normal has no rational reconstruction";
            if (warnings) warnings->push_back(cert.note);
            out.push_back(std::move(cert));
            continue;
        }
        cert.eta = rat->value;

        RatVec gamma = rv_add(rat->value, gs);
        VectorXd gamma_f = rv_to_eigen(gamma);
        double target = std::numeric_limits<double>::infinity();
        for (auto& c : sset.chamber) target = std::min(target, c.dot(gamma_f));

        if (nearest_slack > opts.fiber_dist * std::max(1.0, scale)) {
            cert.note = "no sample within the fiber distance of the facet";
            if (warnings) warnings->push_back(cert.note);
            out.push_back(std::move(cert));
            continue;
        }

        std::vector<ComponentDescriptor> candidates;
        OrbitPoint znear = rotate_to_diagonal_moment(p, sample_one(p, sset.seed, nearest));
        if (auto located = locate_component_near(p, znear, gamma, 0.45 * min_spectrum_gap(p)))
            candidates.push_back(*located);
        for (auto& c : fixed_components(p, gamma, opts.component_bound)) {
            if (std::fabs(component_moment_value(p, c).value() - target) > opts.value_tol) continue;
            bool dup = false;
            for (auto& d : candidates)
                if (d.assignments == c.assignments) { dup = true; break; }
            if (!dup) candidates.push_back(c);
        }

        for (auto& comp : candidates) {
            Rational value = component_moment_value(p, comp);
            if (std::fabs(value.value() - target) > opts.value_tol) continue;
            auto test = infinitesimal_pair_test(p, gamma, comp, opts.trials, opts.rank_tol, opts.seed);
            if (!test.is_pair) continue;
            RessayrePair pair;
            pair.gamma = gamma;
            pair.gamma_float = gamma_f;
            pair.component = comp;
            pair.value = value;
            pair.value_float = value.value();
            auto adm = is_admissible(p, gamma, opts.admissible_budget, opts.seed, opts.rank_tol,
                                     opts.component_bound);
            pair.admissible = adm.admissible;
            pair.dim_z = adm.dim_z;
            pair.dim_z_gamma = adm.dim_z_gamma;
            pair.dim_component = component_dim_p(p, comp, 4, opts.seed, opts.rank_tol);
            pair.regular = pair.admissible &&
                           (pair.dim_component - pair.dim_z == 0 || pair.dim_component - pair.dim_z == 1);
            pair.is_pair = true;
            pair.witness = test.witness;
            pair.provenance = Provenance::Facet;
            double slack = std::numeric_limits<double>::infinity();
            for (auto& c : sset.chamber)
                slack = std::min(slack, c.dot(gamma_f) - pair.value_float);
            cert.min_slack = slack;
            cert.pair = std::move(pair);
            cert.verified = true;
            break;
        }
        if (!cert.verified && cert.note.empty()) {
            cert.note = "no component certified the facet";
            if (warnings) warnings->push_back(cert.note);
        }
        out.push_back(std::move(cert));
    }
    return out;
}

struct ProjectionProbeResult {
    RessayrePair pair;
    VectorXd xi;
    VectorXd xi_prime_flow;
    VectorXd xi_prime_hull;
    double dist_flow = 0.0;
    double dist_hull = 0.0;
    double agreement = 0.0;  // |dist_flow - dist_hull|
    double separation = 0.0; // value - <xi, gamma>, must be positive
};

/// A pair separating an exterior probe: gamma from the shifted flow,
/// cross-checked against the hull projection.
inline ProjectionProbeResult generate_projection_pair(const OrbitProblem& p, const Polytope& hull,
                                                      const VectorXd& xi, const VerifyOptions& opts) {
    for (int i = 0; i + 1 < p.n; ++i)
        if (!(xi[i] > xi[i + 1]))
            throw std::invalid_argument("generate_projection_pair: probe must be strictly decreasing");
    if (membership(hull, xi, opts.membership_tol).inside)
        throw std::invalid_argument("generate_projection_pair: probe lies inside the body");

    ProjectionProbeResult out;
    out.xi = xi;
    auto sf = shifted_flow(p, xi, opts.flow, opts.seed);
    auto proj = project_point(hull, xi);
    out.xi_prime_flow = sf.xi_prime;
    out.xi_prime_hull = proj.point;
    out.dist_flow = sf.dist;
    out.dist_hull = proj.dist;
    out.agreement = std::fabs(sf.dist - proj.dist);

    RessayrePair pair;
    pair.provenance = Provenance::Projection;
    pair.gamma_float = sf.gamma;
    std::vector<double> gf(sf.gamma.data(), sf.gamma.data() + p.n);
    auto rat = rationalize_vector(gf, opts.max_den, opts.residual_tol);
    if (!rat) rat = snap_vector(gf, 1e-3, opts.max_den);
    if (rat) {
        // keep the magnitude of the float direction: the separation statement
        // is scale-invariant, the emitted value is the component's exact one
        pair.gamma = rat->value;
        pair.gamma_is_rational = true;
        VectorXd gr = rv_to_eigen(pair.gamma);
        OrbitPoint zlim;
        for (int f = 0; f < p.k; ++f) zlim.mats.push_back(sf.result.limit.mats[f]);
        OrbitPoint zrot = rotate_to_diagonal_moment(p, zlim);
        auto comp = locate_component_near(p, zrot, pair.gamma, 0.45 * min_spectrum_gap(p));
        if (!comp)
            throw NumericFailure("generate_projection_pair: flow limit is not near the fixed set");
        pair.component = *comp;
        pair.value = component_moment_value(p, *comp);
        pair.value_float = pair.value.value();
        auto adm = is_admissible(p, pair.gamma, opts.admissible_budget, opts.seed, opts.rank_tol,
                                 opts.component_bound);
        pair.admissible = adm.admissible;
        pair.dim_z = adm.dim_z;
        pair.dim_z_gamma = adm.dim_z_gamma;
        pair.dim_component = component_dim_p(p, *comp, 4, opts.seed, opts.rank_tol);
        pair.regular = pair.admissible &&
                       (pair.dim_component - pair.dim_z == 0 || pair.dim_component - pair.dim_z == 1);
        auto test = infinitesimal_pair_test(p, pair.gamma, *comp, opts.trials, opts.rank_tol, opts.seed);
        pair.is_pair = test.is_pair;
        pair.witness = test.witness;
        out.separation = pair.value_float - xi.dot(rv_to_eigen(pair.gamma));
    } else {
        pair.gamma_is_rational = false;
        pair.value_float = sf.xi_prime.dot(sf.gamma);
        out.separation = pair.value_float - xi.dot(sf.gamma);
    }
    if (out.separation <= 0)
        throw NumericFailure("generate_projection_pair: probe is not separated by the pair");
    out.pair = std::move(pair);
    return out;
}

/// Cross-check mode: all two-level indicator directions with every component.
inline std::vector<RessayrePair> exhaustive_pairs(const OrbitProblem& p, const VerifyOptions& opts) {
    if (p.n > 3)
        throw std::invalid_argument("exhaustive_pairs: supported for n <= 3 only");
    std::vector<RessayrePair> out;
    for (int mask = 1; mask < (1 << p.n) - 1; ++mask) {
        RatVec gamma(p.n);
        for (int i = 0; i < p.n; ++i) gamma[i] = Rational((mask >> i) & 1);
        auto adm = is_admissible(p, gamma, opts.admissible_budget, opts.seed, opts.rank_tol,
                                 opts.component_bound);
        for (auto& comp : fixed_components(p, gamma, opts.component_bound)) {
            auto test = infinitesimal_pair_test(p, gamma, comp, opts.trials, opts.rank_tol, opts.seed);
            if (!test.is_pair) continue;
            RessayrePair pair;
            pair.gamma = gamma;
            pair.gamma_float = rv_to_eigen(gamma);
            pair.component = comp;
            pair.value = component_moment_value(p, comp);
            pair.value_float = pair.value.value();
            pair.admissible = adm.admissible;
            pair.dim_z = adm.dim_z;
            pair.dim_z_gamma = adm.dim_z_gamma;
            pair.dim_component = component_dim_p(p, comp, 4, opts.seed, opts.rank_tol);
            pair.regular = pair.admissible &&
                           (pair.dim_component - pair.dim_z == 0 || pair.dim_component - pair.dim_z == 1);
            pair.is_pair = true;
            pair.witness = test.witness;
            pair.provenance = Provenance::Exhaustive;
            out.push_back(std::move(pair));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Inequality emission.

struct InequalitySystem {
    std::vector<std::pair<RatVec, Rational>> inequalities;  // <xi, gamma> >= value
    std::vector<std::pair<RatVec, Rational>> equalities;    // <xi, gamma> = value
};

namespace emit_detail {

/// Joint positive primitive scaling of (gamma, value).
inline std::pair<RatVec, Rational> primitive_form(RatVec gamma, Rational value) {
    RatVec prim = rv_primitive(gamma);
    // find the positive scale t with prim = t * gamma on a nonzero slot
    for (size_t i = 0; i < gamma.size(); ++i)
        if (!gamma[i].is_zero()) {
            Rational t = prim[i] / gamma[i];
            return {prim, value * t};
        }
    return {gamma, value};
}

inline bool rv_less(const RatVec& a, const RatVec& b) {
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (b[i] < a[i]) return false;
    }
    return false;
}

} // namespace emit_detail

/// Chamber inequalities plus one inequality per verified pair, with exact
/// rational data. Opposite pairs collapse to equalities; duplicates keep the
/// tighter value.
inline InequalitySystem emit_inequalities(const std::vector<RessayrePair>& pairs,
                                          const RootSystem& rs) {
    std::vector<std::pair<RatVec, Rational>> raw;
    for (auto& alpha : rs.simple_roots) raw.push_back({coroot(rs, alpha), Rational(0)});
    for (auto& pr : pairs) {
        if (!pr.is_pair || !pr.gamma_is_rational) continue;
        raw.push_back({pr.gamma, pr.value});
    }

    std::map<std::vector<std::pair<long long, long long>>, std::pair<RatVec, Rational>> dedup;
    auto key_of = [](const RatVec& v) {
        std::vector<std::pair<long long, long long>> k;
        for (auto& x : v) k.push_back({x.num, x.den});
        return k;
    };
    for (auto& [g, v] : raw) {
        auto [pg, pv] = emit_detail::primitive_form(g, v);
        auto key = key_of(pg);
        auto it = dedup.find(key);
        if (it == dedup.end())
            dedup[key] = {pg, pv};
        else if (it->second.second < pv)
            it->second.second = pv;  // the tighter sound bound wins
    }

    InequalitySystem sys;
    std::vector<std::pair<RatVec, Rational>> ineqs;
    for (auto& [k, gv] : dedup) ineqs.push_back(gv);
    std::vector<bool> used(ineqs.size(), false);
    for (size_t i = 0; i < ineqs.size(); ++i) {
        if (used[i]) continue;
        bool matched = false;
        for (size_t j = i + 1; j < ineqs.size(); ++j) {
            if (used[j]) continue;
            if (rv_eq(ineqs[j].first, rv_neg(ineqs[i].first)) &&
                ineqs[j].second == -ineqs[i].second) {
                // <xi,g> >= v and <xi,-g> >= -v force equality
                RatVec g = ineqs[i].first;
                Rational v = ineqs[i].second;
                if (emit_detail::rv_less(g, rv_neg(g))) { g = rv_neg(g); v = -v; }
                sys.equalities.push_back({g, v});
                used[i] = used[j] = true;
                matched = true;
                break;
            }
        }
        if (!matched && !used[i]) {
            sys.inequalities.push_back(ineqs[i]);
            used[i] = true;
        }
    }
    return sys;
}

/// Reduce every inequality modulo the equalities (exact row reduction on the
/// equality normals), rescale to primitive form, sort, and deduplicate.
/// Canonical systems compare by plain set equality.
inline InequalitySystem canonicalize_system(const InequalitySystem& sys) {
    InequalitySystem out;
    // echelonize augmented equality rows [gamma | value]
    RatMat eq;
    for (auto& [g, v] : sys.equalities) {
        RatVec row = g;
        row.push_back(v);
        eq.push_back(row);
    }
    auto pivots = rat_rref(eq);
    const int n = sys.equalities.empty() ? -1 : (int)sys.equalities[0].first.size();
    for (size_t r = 0; r < pivots.size(); ++r) {
        if (n >= 0 && pivots[r] == n)
            throw std::invalid_argument("canonicalize_system: inconsistent equalities");
        RatVec g(eq[r].begin(), eq[r].end() - 1);
        auto [pg, pv] = emit_detail::primitive_form(g, eq[r].back());
        if (emit_detail::rv_less(pg, rv_neg(pg))) { pg = rv_neg(pg); pv = -pv; }
        out.equalities.push_back({pg, pv});
    }

    std::map<std::vector<std::pair<long long, long long>>, std::pair<RatVec, Rational>> dedup;
    for (auto& [g0, v0] : sys.inequalities) {
        RatVec g = g0;
        Rational v = v0;
        for (size_t r = 0; r < pivots.size(); ++r) {
            int pc = pivots[r];
            if (pc >= (int)g.size()) continue;
            Rational t = g[pc] / eq[r][pc];
            if (t.is_zero()) continue;
            for (size_t c = 0; c < g.size(); ++c) g[c] -= t * eq[r][c];
            v -= t * eq[r].back();
        }
        if (rv_is_zero(g)) {
            if (v > Rational(0))
                throw std::invalid_argument("canonicalize_system: infeasible inequality");
            continue;  // trivially satisfied
        }
        auto [pg, pv] = emit_detail::primitive_form(g, v);
        std::vector<std::pair<long long, long long>> key;
        for (auto& x : pg) key.push_back({x.num, x.den});
        auto it = dedup.find(key);
        if (it == dedup.end())
            dedup[key] = {pg, pv};
        else if (it->second.second < pv)
            it->second.second = pv;
    }
    for (auto& [k, gv] : dedup) out.inequalities.push_back(gv);

    auto cmp = [](const std::pair<RatVec, Rational>& a, const std::pair<RatVec, Rational>& b) {
        if (emit_detail::rv_less(a.first, b.first)) return true;
        if (emit_detail::rv_less(b.first, a.first)) return false;
        return a.second < b.second;
    };
    std::sort(out.inequalities.begin(), out.inequalities.end(), cmp);
    std::sort(out.equalities.begin(), out.equalities.end(), cmp);
    return out;
}

inline bool systems_equal(const InequalitySystem& a, const InequalitySystem& b) {
    auto ca = canonicalize_system(a), cb = canonicalize_system(b);
    if (ca.inequalities.size() != cb.inequalities.size()) return false;
    if (ca.equalities.size() != cb.equalities.size()) return false;
    for (size_t i = 0; i < ca.inequalities.size(); ++i)
        if (!rv_eq(ca.inequalities[i].first, cb.inequalities[i].first) ||
            ca.inequalities[i].second != cb.inequalities[i].second)
            return false;
    for (size_t i = 0; i < ca.equalities.size(); ++i)
        if (!rv_eq(ca.equalities[i].first, cb.equalities[i].first) ||
            ca.equalities[i].second != cb.equalities[i].second)
            return false;
    return true;
}

inline HRepF system_to_hrep(const InequalitySystem& sys) {
    HRepF h;
    for (auto& [g, v] : sys.inequalities) h.halfspaces.push_back({rv_to_eigen(g), v.value()});
    for (auto& [g, v] : sys.equalities) h.equalities.push_back({rv_to_eigen(g), v.value()});
    return h;
}

// ---------------------------------------------------------------------------
// The end-to-end verification pipeline.

struct VerificationReport {
    std::string stage;  // last stage reached
    bool ok = false;
    bool soundness_ok = false;
    bool completeness_ok = false;
    bool facets_ok = false;
    int sample_count = 0;
    uint64_t seed = 0;
    double soundness = 0.0;
    double hausdorff = 0.0;
    bool region_bounded = true;
    std::vector<FacetCertificate> facets;
    std::vector<RessayrePair> pairs;
    std::vector<ProjectionProbeResult> probes;
    InequalitySystem system;
    ComparisonReport comparison;
    std::vector<std::string> warnings;
};

inline VerificationReport verify_theorem(const OrbitProblem& p, const VerifyOptions& opts) {
    VerificationReport rep;
    rep.sample_count = opts.count;
    rep.seed = opts.seed;
    RootSystem rs = build_root_system(RootFamily::A, p.n - 1);
    std::string stage = "sample";
    try {
        SampleSet sset = build_samples(p, opts.seed, opts.count);

        stage = "hull";
        rep.stage = stage;
        Polytope hull = hull_from_points(sset.chamber, opts.hull_tol);

        stage = "gamma_s";
        rep.stage = stage;
        for (auto& pr : generate_gamma_s_pair(p, rs, sset, opts, &rep.warnings))
            rep.pairs.push_back(pr);

        stage = "affine";
        rep.stage = stage;
        for (auto& pr : generate_affine_pairs(p, rs, sset, hull, opts, &rep.warnings))
            rep.pairs.push_back(pr);

        stage = "facet";
        rep.stage = stage;
        rep.facets = generate_facet_pairs(p, rs, sset, hull, opts, &rep.warnings);
        for (auto& cert : rep.facets)
            if (cert.pair) rep.pairs.push_back(*cert.pair);

        if (opts.exhaustive) {
            stage = "exhaustive";
            rep.stage = stage;
            for (auto& pr : exhaustive_pairs(p, opts)) rep.pairs.push_back(pr);
        }

        if (opts.probe_count > 0) {
            stage = "probes";
            rep.stage = stage;
            Rng rng(derive_seed(opts.seed, 0xace));
            double scale = 0;
            for (auto& c : sset.chamber) scale = std::max(scale, c.lpNorm<Eigen::Infinity>());
            int made = 0;
            for (int attempt = 0; attempt < 40 * opts.probe_count && made < opts.probe_count; ++attempt) {
                VectorXd xi(p.n);
                for (int i = 0; i < p.n; ++i) xi[i] = scale * rng.gauss();
                std::sort(xi.data(), xi.data() + p.n, std::greater<double>());
                bool strict = true;
                for (int i = 0; i + 1 < p.n; ++i)
                    if (xi[i] - xi[i + 1] < 0.05 * scale) strict = false;
                if (!strict) continue;
                if (membership(hull, xi, opts.membership_tol).inside) continue;
                rep.probes.push_back(generate_projection_pair(p, hull, xi, opts));
                ++made;
            }
        }

        stage = "emit";
        rep.stage = stage;
        rep.system = emit_inequalities(rep.pairs, rs);

        stage = "compare";
        rep.stage = stage;
        rep.comparison = compare_regions(system_to_hrep(rep.system), sset.chamber, opts.hull_tol);
        rep.soundness = rep.comparison.soundness_max_violation;
        rep.hausdorff = rep.comparison.hausdorff;
        rep.region_bounded = rep.comparison.region_bounded;

        rep.soundness_ok = rep.soundness <= opts.soundness_tol;
        rep.completeness_ok = rep.hausdorff <= opts.hausdorff_tol;
        rep.facets_ok = true;
        for (auto& cert : rep.facets)
            if (!cert.trivial && !cert.spurious && !cert.verified) rep.facets_ok = false;
        rep.ok = rep.soundness_ok && rep.completeness_ok && rep.facets_ok;
        rep.stage = "done";
    } catch (const std::exception& e) {
        throw NumericFailure("verify stage '" + stage + "': " + e.what());
    }
    return rep;
}

} // namespace rmp
