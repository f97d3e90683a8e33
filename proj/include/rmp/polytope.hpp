#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "rmp/linalg.hpp"

namespace rmp {

/// Closed halfspace <x, normal> >= offset. Equalities reuse the same struct
/// with the constraint read as <x, normal> = offset.
struct Halfspace {
    VectorXd normal;
    double offset = 0.0;
};

struct HRepF {
    std::vector<Halfspace> halfspaces;
    std::vector<Halfspace> equalities;
};

struct AffineHull {
    VectorXd basepoint;
    MatrixXd basis;         // ambient x r, orthonormal columns spanning the direction space
    MatrixXd normal_basis;  // ambient x (s - r), orthonormal, inside the given subspace
    std::vector<std::optional<VectorRationalization>> normal_rationalized;
};

struct Polytope {
    int ambient_dim = 0;
    std::vector<VectorXd> vertices;
    std::vector<Halfspace> halfspaces;  // unit inward normals, supported facets
    VectorXd affine_basepoint;
    MatrixXd affine_basis;
    MatrixXd normal_basis;
    std::vector<Halfspace> equalities;  // one per normal_basis column

    bool empty() const { return vertices.empty(); }
};

// ---------------------------------------------------------------------------
// Affine hull detection.

inline AffineHull affine_hull_basis(const std::vector<VectorXd>& points, double tol,
                                    const MatrixXd& subspace = MatrixXd(),
                                    long long max_den = 64, double residual_tol = 1e-6) {
    if (points.empty()) throw std::invalid_argument("affine_hull_basis: empty input");
    const Eigen::Index n = points[0].size();
    MatrixXd sub = subspace.size() ? subspace : MatrixXd::Identity(n, n);
    const Eigen::Index s = sub.cols();

    VectorXd mean = VectorXd::Zero(n);
    for (auto& p : points) mean += p;
    mean /= (double)points.size();

    MatrixXd cov = MatrixXd::Zero(s, s);
    for (auto& p : points) {
        VectorXd y = sub.transpose() * (p - mean);
        cov += y * y.transpose();
    }
    cov /= (double)points.size();

    auto [vals, vecs] = sym_eig_desc(cov);
    // The covariance accumulation has a rounding floor near 1e-17 * scale^2,
    // far above the actual deviation along conserved directions. Re-measure
    // the spread along each eigendirection with clean dot products.
    VectorXd sv = VectorXd::Zero(s);
    for (auto& p : points) {
        VectorXd y = vecs.transpose() * (sub.transpose() * (p - mean));
        for (Eigen::Index i = 0; i < s; ++i) sv[i] += y[i] * y[i];
    }
    for (Eigen::Index i = 0; i < s; ++i) sv[i] = std::sqrt(sv[i] / (double)points.size());
    double top = s > 0 ? sv[0] : 0.0;
    Eigen::Index r = 0;
    while (r < s && sv[r] > tol * std::max(1.0, top)) ++r;

    AffineHull hull;
    hull.basepoint = mean;
    hull.basis = sub * vecs.leftCols(r);
    hull.normal_basis = sub * vecs.rightCols(s - r);
    for (Eigen::Index j = 0; j < hull.basis.cols(); ++j) detail::fix_sign(hull.basis.col(j));
    for (Eigen::Index j = 0; j < hull.normal_basis.cols(); ++j) detail::fix_sign(hull.normal_basis.col(j));
    for (Eigen::Index j = 0; j < hull.normal_basis.cols(); ++j) {
        std::vector<double> col(hull.normal_basis.col(j).data(),
                                hull.normal_basis.col(j).data() + n);
        auto rat = rationalize_vector(col, max_den, residual_tol);
        hull.normal_rationalized.push_back(rat ? std::optional<VectorRationalization>(*rat)
                                               : std::nullopt);
    }
    return hull;
}

// ---------------------------------------------------------------------------
// Convex hull in the affine-hull coordinates.

namespace hull_detail {

struct Facet2 {
    std::vector<int> verts;  // indices into the local point list
    VectorXd normal;         // outward unit normal in local coords
    double offset;           // <x, normal> <= offset inside
    std::vector<int> neighbors;
    std::vector<int> outside;
    bool dead = false;
};

inline double facet_dist(const Facet2& f, const VectorXd& p) {
    return p.dot(f.normal) - f.offset;
}

/// Dimension-general incremental hull (quickhull flavor). Points must span
/// the full local dimension.
inline std::vector<Facet2> incremental_hull(const std::vector<VectorXd>& pts) {
    const int d = (int)pts[0].size();
    const int npts = (int)pts.size();
    double scale = 0;
    for (auto& p : pts) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
    const double eps = 1e-9 * std::max(1.0, scale);

    // Initial simplex: greedily maximize the orthogonal residual.
    std::vector<int> simplex;
    {
        int a = 0, b = 0;
        double best = -1;
        for (int i = 0; i < npts; ++i) {
            double dd = (pts[i] - pts[0]).norm();
            if (dd > best) { best = dd; b = i; }
        }
        best = -1;
        for (int i = 0; i < npts; ++i) {
            double dd = (pts[i] - pts[b]).norm();
            if (dd > best) { best = dd; a = i; }
        }
        simplex = {a, b};
        MatrixXd dirs(d, 1);
        dirs.col(0) = (pts[b] - pts[a]).normalized();
        while ((int)simplex.size() < d + 1) {
            Eigen::HouseholderQR<MatrixXd> qr(dirs);
            MatrixXd q = qr.householderQ();
            int bi = -1;
            double bd = eps;
            for (int i = 0; i < npts; ++i) {
                VectorXd rel = pts[i] - pts[simplex[0]];
                VectorXd res = rel - q.leftCols(dirs.cols()) * (q.leftCols(dirs.cols()).transpose() * rel);
                double dd = res.norm();
                if (dd > bd) { bd = dd; bi = i; }
            }
            if (bi < 0) throw NumericFailure("incremental_hull: degenerate input");
            simplex.push_back(bi);
            dirs.conservativeResize(d, dirs.cols() + 1);
            dirs.col(dirs.cols() - 1) = (pts[bi] - pts[simplex[0]]).normalized();
        }
    }

    VectorXd center = VectorXd::Zero(d);
    for (int i : simplex) center += pts[i];
    center /= (double)simplex.size();

    std::vector<Facet2> facets;
    auto make_facet = [&](std::vector<int> vs, const VectorXd& inside_pt) -> Facet2 {
        Facet2 f;
        f.verts = std::move(vs);
        MatrixXd m(d - 1 > 0 ? d - 1 : 1, d);
        for (int i = 1; i < (int)f.verts.size(); ++i)
            m.row(i - 1) = (pts[f.verts[i]] - pts[f.verts[0]]).transpose();
        Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullV);
        f.normal = svd.matrixV().col(d - 1);
        f.offset = f.normal.dot(pts[f.verts[0]]);
        if (inside_pt.dot(f.normal) > f.offset) {
            f.normal = -f.normal;
            f.offset = -f.offset;
        }
        return f;
    };

    // simplex facets: drop one vertex each
    for (int skip = 0; skip <= d; ++skip) {
        std::vector<int> vs;
        for (int i = 0; i <= d; ++i)
            if (i != skip) vs.push_back(simplex[i]);
        facets.push_back(make_facet(vs, center));
    }
    auto ridge_key = [](std::vector<int> vs) {
        std::sort(vs.begin(), vs.end());
        return vs;
    };
    auto rebuild_adjacency = [&](const std::vector<int>& ids) {
        std::map<std::vector<int>, std::vector<int>> ridges;
        for (int id : ids) {
            auto& f = facets[id];
            for (size_t skip = 0; skip < f.verts.size(); ++skip) {
                std::vector<int> rv;
                for (size_t i = 0; i < f.verts.size(); ++i)
                    if (i != skip) rv.push_back(f.verts[i]);
                ridges[ridge_key(rv)].push_back(id);
            }
        }
        return ridges;
    };
    {
        std::vector<int> ids;
        for (int i = 0; i < (int)facets.size(); ++i) ids.push_back(i);
        for (auto& [k, v] : rebuild_adjacency(ids))
            if (v.size() == 2) {
                facets[v[0]].neighbors.push_back(v[1]);
                facets[v[1]].neighbors.push_back(v[0]);
            }
    }

    for (int i = 0; i < npts; ++i) {
        for (auto& f : facets)
            if (facet_dist(f, pts[i]) > eps) { f.outside.push_back(i); break; }
    }

    // main loop
    for (int guard = 0; guard < 50 * npts + 1000; ++guard) {
        int fi = -1;
        for (int i = 0; i < (int)facets.size(); ++i)
            if (!facets[i].dead && !facets[i].outside.empty()) { fi = i; break; }
        if (fi < 0) break;
        auto& f0 = facets[fi];
        int apex = f0.outside[0];
        double bestd = -1;
        for (int i : f0.outside) {
            double dd = facet_dist(f0, pts[i]);
            if (dd > bestd) { bestd = dd; apex = i; }
        }
        // visible set via BFS
        std::set<int> visible;
        std::vector<int> stack = {fi};
        visible.insert(fi);
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            for (int nb : facets[cur].neighbors) {
                if (facets[nb].dead || visible.count(nb)) continue;
                if (facet_dist(facets[nb], pts[apex]) > eps) {
                    visible.insert(nb);
                    stack.push_back(nb);
                }
            }
        }
        // horizon ridges: ridges of visible facets shared with non-visible ones
        std::map<std::vector<int>, int> ridge_count;
        for (int id : visible) {
            auto& f = facets[id];
            for (size_t skip = 0; skip < f.verts.size(); ++skip) {
                std::vector<int> rv;
                for (size_t i = 0; i < f.verts.size(); ++i)
                    if (i != skip) rv.push_back(f.verts[i]);
                ridge_count[ridge_key(rv)]++;
            }
        }
        std::vector<int> orphans;
        for (int id : visible) {
            for (int p : facets[id].outside) orphans.push_back(p);
            facets[id].dead = true;
        }
        std::vector<int> fresh;
        for (auto& [rv, cnt] : ridge_count) {
            if (cnt != 1) continue;  // interior ridge of the visible set
            std::vector<int> vs = rv;
            vs.push_back(apex);
            facets.push_back(make_facet(vs, center));
            fresh.push_back((int)facets.size() - 1);
        }
        // adjacency among live facets touching the new ones
        std::vector<int> live;
        for (int i = 0; i < (int)facets.size(); ++i)
            if (!facets[i].dead) live.push_back(i);
        for (int id : live) facets[id].neighbors.clear();
        for (auto& [k, v] : rebuild_adjacency(live))
            if (v.size() == 2) {
                facets[v[0]].neighbors.push_back(v[1]);
                facets[v[1]].neighbors.push_back(v[0]);
            }
        std::sort(orphans.begin(), orphans.end());
        orphans.erase(std::unique(orphans.begin(), orphans.end()), orphans.end());
        for (int p : orphans) {
            if (p == apex) continue;
            for (int id : fresh)
                if (facet_dist(facets[id], pts[p]) > eps) {
                    facets[id].outside.push_back(p);
                    break;
                }
        }
    }

    std::vector<Facet2> out;
    for (auto& f : facets)
        if (!f.dead) out.push_back(f);
    return out;
}

/// Andrew monotone chain; returns CCW vertex indices of the hull.
inline std::vector<int> monotone_chain(const std::vector<VectorXd>& pts) {
    const int n = (int)pts.size();
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (pts[a][0] != pts[b][0]) return pts[a][0] < pts[b][0];
        return pts[a][1] < pts[b][1];
    });
    double scale = 0;
    for (auto& p : pts) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
    const double eps = 1e-12 * std::max(1.0, scale * scale);
    auto cross = [&](int o, int a, int b) {
        return (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1]) -
               (pts[a][1] - pts[o][1]) * (pts[b][0] - pts[o][0]);
    };
    std::vector<int> h(2 * n);
    int k = 0;
    for (int ii = 0; ii < n; ++ii) {
        int i = idx[ii];
        while (k >= 2 && cross(h[k - 2], h[k - 1], i) <= eps) --k;
        h[k++] = i;
    }
    for (int ii = n - 2, lower = k + 1; ii >= 0; --ii) {
        int i = idx[ii];
        while (k >= lower && cross(h[k - 2], h[k - 1], i) <= eps) --k;
        h[k++] = i;
    }
    h.resize(k > 1 ? k - 1 : k);
    return h;
}

} // namespace hull_detail

inline Polytope hull_from_points(const std::vector<VectorXd>& points, double tol = 1e-9) {
    if (points.empty()) throw std::invalid_argument("hull_from_points: empty input");
    const Eigen::Index n = points[0].size();
    for (auto& p : points)
        if (p.size() != n) throw std::invalid_argument("hull_from_points: mixed dimensions");

    Polytope poly;
    poly.ambient_dim = (int)n;
    AffineHull ah = affine_hull_basis(points, tol);
    poly.affine_basepoint = ah.basepoint;
    poly.affine_basis = ah.basis;
    poly.normal_basis = ah.normal_basis;
    for (Eigen::Index j = 0; j < ah.normal_basis.cols(); ++j) {
        Halfspace eq;
        eq.normal = ah.normal_basis.col(j);
        eq.offset = eq.normal.dot(ah.basepoint);
        poly.equalities.push_back(std::move(eq));
    }

    const int r = (int)ah.basis.cols();
    auto local = [&](const VectorXd& p) { return VectorXd(ah.basis.transpose() * (p - ah.basepoint)); };

    if (r == 0) {
        poly.vertices.push_back(ah.basepoint);
        return poly;
    }
    if (r == 1) {
        int imin = 0, imax = 0;
        double tmin = 0, tmax = 0;
        for (int i = 0; i < (int)points.size(); ++i) {
            double t = local(points[i])[0];
            if (i == 0 || t < tmin) { tmin = t; imin = i; }
            if (i == 0 || t > tmax) { tmax = t; imax = i; }
        }
        VectorXd axis = ah.basis.col(0);
        poly.vertices.push_back(points[imin]);
        poly.vertices.push_back(points[imax]);
        poly.halfspaces.push_back({axis, tmin + axis.dot(ah.basepoint)});
        poly.halfspaces.push_back({-axis, -(tmax + axis.dot(ah.basepoint))});
        return poly;
    }

    std::vector<VectorXd> loc(points.size());
    for (size_t i = 0; i < points.size(); ++i) loc[i] = local(points[i]);

    if (r == 2) {
        auto hv = hull_detail::monotone_chain(loc);
        for (int i : hv) poly.vertices.push_back(points[i]);
        const int m = (int)hv.size();
        for (int i = 0; i < m; ++i) {
            VectorXd a = loc[hv[i]], b = loc[hv[(i + 1) % m]];
            VectorXd e = b - a;
            if (e.norm() == 0) continue;
            VectorXd inward(2);
            inward << -e[1], e[0];  // CCW chain: interior on the left
            inward.normalize();
            VectorXd namb = ah.basis * inward;
            poly.halfspaces.push_back({namb, namb.dot(ah.basepoint) + inward.dot(a)});
        }
        return poly;
    }

    auto facets = hull_detail::incremental_hull(loc);
    std::set<int> vset;
    for (auto& f : facets)
        for (int v : f.verts) vset.insert(v);
    for (int v : vset) poly.vertices.push_back(points[v]);
    for (auto& f : facets) {
        VectorXd inward = -f.normal;  // stored outward in local coords
        VectorXd namb = ah.basis * inward;
        poly.halfspaces.push_back({namb, namb.dot(ah.basepoint) - f.offset});
    }
    return poly;
}

// ---------------------------------------------------------------------------
// Membership and nearest point.

struct MembershipResult {
    bool inside = false;
    double max_violation = 0.0;  // signed: negative = slack everywhere
};

inline MembershipResult membership(const Polytope& p, const VectorXd& xi, double tol) {
    if (p.halfspaces.empty() && p.equalities.empty() && p.vertices.size() == 1) {
        double d = (xi - p.vertices[0]).norm();
        return {d <= tol, d};
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (auto& h : p.halfspaces) worst = std::max(worst, h.offset - xi.dot(h.normal));
    for (auto& e : p.equalities) worst = std::max(worst, std::fabs(xi.dot(e.normal) - e.offset));
    return {worst <= tol, worst};
}

struct ProjectionResult {
    VectorXd point;
    double dist = 0.0;
};

/// Minimum-norm point in conv(pts) by the Wolfe active-set method.
inline VectorXd min_norm_point(const std::vector<VectorXd>& pts, double eps = 1e-12) {
    if (pts.empty()) throw std::invalid_argument("min_norm_point: empty input");
    int best = 0;
    for (int i = 1; i < (int)pts.size(); ++i)
        if (pts[i].squaredNorm() < pts[best].squaredNorm()) best = i;
    std::vector<int> corral = {best};
    std::vector<double> lambda = {1.0};
    VectorXd x = pts[best];
    const double tiny = 1e-12;

    auto affine_min = [&](const std::vector<int>& S) -> std::optional<VectorXd> {
        const int m = (int)S.size();
        MatrixXd kkt(m + 1, m + 1);
        kkt.setZero();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) kkt(i, j) = pts[S[i]].dot(pts[S[j]]);
        for (int i = 0; i < m; ++i) {
            kkt(m, i) = 1;
            kkt(i, m) = 1;
        }
        VectorXd rhs = VectorXd::Zero(m + 1);
        rhs[m] = 1;
        Eigen::FullPivLU<MatrixXd> lu(kkt);
        if (!lu.isInvertible()) return std::nullopt;
        VectorXd sol = lu.solve(rhs);
        return VectorXd(sol.head(m));
    };

    for (int major = 0; major < 1000; ++major) {
        int q = 0;
        double bestdot = std::numeric_limits<double>::infinity();
        for (int i = 0; i < (int)pts.size(); ++i) {
            double d = x.dot(pts[i]);
            if (d < bestdot) { bestdot = d; q = i; }
        }
        double xx = x.squaredNorm();
        if (xx - bestdot <= eps * std::max(1.0, xx)) break;
        if (std::find(corral.begin(), corral.end(), q) != corral.end()) break;
        corral.push_back(q);
        lambda.push_back(0.0);

        for (int minor = 0; minor < 200; ++minor) {
            auto a = affine_min(corral);
            if (!a) {
                corral.erase(corral.begin());
                lambda.erase(lambda.begin());
                if (corral.empty()) return x;
                continue;
            }
            double amin = a->minCoeff();
            if (amin > tiny) {
                for (int i = 0; i < (int)corral.size(); ++i) lambda[i] = (*a)[i];
                x.setZero();
                for (int i = 0; i < (int)corral.size(); ++i) x += lambda[i] * pts[corral[i]];
                break;
            }
            double theta = 1.0;
            for (int i = 0; i < (int)corral.size(); ++i)
                if ((*a)[i] <= tiny) {
                    double den = lambda[i] - (*a)[i];
                    if (den > 0) theta = std::min(theta, lambda[i] / den);
                }
            for (int i = 0; i < (int)corral.size(); ++i)
                lambda[i] = (1 - theta) * lambda[i] + theta * (*a)[i];
            for (int i = (int)corral.size() - 1; i >= 0; --i)
                if (lambda[i] <= tiny && corral.size() > 1) {
                    corral.erase(corral.begin() + i);
                    lambda.erase(lambda.begin() + i);
                }
            x.setZero();
            for (int i = 0; i < (int)corral.size(); ++i) x += lambda[i] * pts[corral[i]];
        }
    }
    return x;
}

inline ProjectionResult project_point(const Polytope& p, const VectorXd& xi) {
    if (p.empty()) throw std::invalid_argument("project_point: empty polytope");
    std::vector<VectorXd> shifted(p.vertices.size());
    for (size_t i = 0; i < p.vertices.size(); ++i) shifted[i] = p.vertices[i] - xi;
    VectorXd z = min_norm_point(shifted);
    return {VectorXd(z + xi), z.norm()};
}

// ---------------------------------------------------------------------------
// Region handling (H-rep with equality slice) and the verification report.

struct ComparisonReport {
    double soundness_max_violation = 0.0;
    std::vector<double> min_slack;  // per halfspace, over the cloud
    double hull_to_region = 0.0;
    double region_to_hull = 0.0;
    double hausdorff = 0.0;
    bool region_bounded = true;
    bool region_empty = false;
};

/// Enumerate vertices of {x : halfspaces, equalities} clipped to a large box.
/// Returns vertices and whether the box was active (region unbounded).
inline std::pair<std::vector<VectorXd>, bool> region_vertices(const HRepF& h, const VectorXd& center,
                                                              double box_radius) {
    const Eigen::Index n = center.size();
    MatrixXd eqmat(h.equalities.size(), n);
    VectorXd eqoff(h.equalities.size());
    for (size_t i = 0; i < h.equalities.size(); ++i) {
        eqmat.row(i) = h.equalities[i].normal.transpose();
        eqoff[i] = h.equalities[i].offset;
    }
    VectorXd x0 = center;
    MatrixXd basis = MatrixXd::Identity(n, n);
    if (h.equalities.size()) {
        Eigen::JacobiSVD<MatrixXd> svd(eqmat, Eigen::ComputeFullV | Eigen::ComputeThinU);
        x0 = svd.solve(eqoff);
        Eigen::Index rk = 0;
        double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()[i] > 1e-10 * std::max(1.0, smax)) ++rk;
        basis = svd.matrixV().rightCols(n - rk);
    }
    const Eigen::Index r = basis.cols();

    struct Plane {
        VectorXd n;
        double o;
        bool box;
    };
    std::vector<Plane> planes;
    for (auto& hs : h.halfspaces) {
        VectorXd ln = basis.transpose() * hs.normal;
        double lo = hs.offset - hs.normal.dot(x0);
        if (ln.norm() < 1e-12) {
            if (lo > 1e-9) return {{}, false};  // constraint violated on the whole slice
            continue;
        }
        planes.push_back({ln, lo, false});
    }
    for (Eigen::Index i = 0; i < r; ++i) {
        VectorXd e = VectorXd::Zero(r);
        double c = (basis.transpose() * (center - x0))[i];
        e[i] = 1;
        planes.push_back({e, c - box_radius, true});
        planes.push_back({-e, -(c + box_radius), true});
    }

    const int m = (int)planes.size();
    std::vector<VectorXd> verts;
    bool box_active = false;
    std::vector<int> comb(r);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == (int)r) {
            MatrixXd A(r, r);
            VectorXd b(r);
            for (Eigen::Index i = 0; i < r; ++i) {
                A.row(i) = planes[comb[i]].n.transpose();
                b[i] = planes[comb[i]].o;
            }
            Eigen::FullPivLU<MatrixXd> lu(A);
            if (!lu.isInvertible()) return;
            VectorXd y = lu.solve(b);
            for (auto& pl : planes)
                if (y.dot(pl.n) < pl.o - 1e-7 * std::max(1.0, std::fabs(pl.o))) return;
            for (auto& v : verts)
                if ((v - y).norm() < 1e-7) goto dup;
            verts.push_back(y);
            for (Eigen::Index i = 0; i < r; ++i)
                if (planes[comb[i]].box && std::fabs(y.dot(planes[comb[i]].n) - planes[comb[i]].o) < 1e-7)
                    box_active = true;
        dup:;
            return;
        }
        for (int i = start; i < m; ++i) {
            comb[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    if (r == 0) {
        // point slice: feasibility only
        bool ok = true;
        for (auto& pl : planes)
            if (0 < pl.o - 1e-7) ok = false;
        if (ok) verts.push_back(VectorXd::Zero(0));
    } else {
        rec(0, 0);
    }

    std::vector<VectorXd> amb;
    for (auto& y : verts) amb.push_back(x0 + basis * y);
    return {amb, box_active};
}

inline double distance_to_region(const HRepF& h, const VectorXd& x) {
    double worst = 0.0;
    for (auto& hs : h.halfspaces) {
        double nn = hs.normal.norm();
        if (nn == 0) continue;
        worst = std::max(worst, (hs.offset - x.dot(hs.normal)) / nn);
    }
    for (auto& e : h.equalities) {
        double nn = e.normal.norm();
        if (nn == 0) continue;
        worst = std::max(worst, std::fabs(x.dot(e.normal) - e.offset) / nn);
    }
    return std::max(worst, 0.0);
}

/// Soundness, per-facet tightness, and a Hausdorff estimate between the
/// sampled hull and the region cut out by the halfspaces. Dense probing only.
inline ComparisonReport compare_regions(const HRepF& h, const std::vector<VectorXd>& cloud,
                                        double hull_tol = 1e-9, double box_scale = 100.0) {
    if (cloud.empty()) throw std::invalid_argument("compare_regions: empty cloud");
    ComparisonReport rep;
    rep.min_slack.assign(h.halfspaces.size(), std::numeric_limits<double>::infinity());
    rep.soundness_max_violation = -std::numeric_limits<double>::infinity();
    for (auto& x : cloud) {
        double worst = -std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < h.halfspaces.size(); ++i) {
            auto& hs = h.halfspaces[i];
            double nn = hs.normal.norm();
            double slack = (x.dot(hs.normal) - hs.offset) / (nn > 0 ? nn : 1.0);
            rep.min_slack[i] = std::min(rep.min_slack[i], slack);
            worst = std::max(worst, -slack);
        }
        for (auto& e : h.equalities) {
            double nn = e.normal.norm();
            worst = std::max(worst, std::fabs(x.dot(e.normal) - e.offset) / (nn > 0 ? nn : 1.0));
        }
        rep.soundness_max_violation = std::max(rep.soundness_max_violation, worst);
    }

    Polytope hull = hull_from_points(cloud, hull_tol);
    VectorXd centroid = VectorXd::Zero(cloud[0].size());
    for (auto& v : hull.vertices) centroid += v;
    centroid /= (double)hull.vertices.size();
    double radius = 1.0;
    for (auto& v : hull.vertices) radius = std::max(radius, (v - centroid).norm());

    auto [verts, box_active] = region_vertices(h, centroid, box_scale * radius);
    rep.region_bounded = !box_active;
    rep.region_empty = verts.empty();

    for (auto& v : hull.vertices)
        rep.hull_to_region = std::max(rep.hull_to_region, distance_to_region(h, v));
    if (rep.region_empty) {
        rep.region_to_hull = std::numeric_limits<double>::infinity();
    } else {
        for (auto& v : verts)
            rep.region_to_hull = std::max(rep.region_to_hull, project_point(hull, v).dist);
    }
    rep.hausdorff = std::max(rep.hull_to_region, rep.region_to_hull);
    return rep;
}

/// Hausdorff estimate between two sampled hulls by mutual vertex projection.
inline double hausdorff_hulls(const Polytope& a, const Polytope& b) {
    double d = 0;
    for (auto& v : a.vertices) d = std::max(d, project_point(b, v).dist);
    for (auto& v : b.vertices) d = std::max(d, project_point(a, v).dist);
    return d;
}

} // namespace rmp
