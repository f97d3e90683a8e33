#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmp/ressayre.hpp"

namespace rmp {

using nlohmann::json;

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)v);
    return buf;
}

/// Write-temp-rename so partial output never lands under the final name.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoFailure("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw IoFailure("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoFailure("rename failed for " + path.string() + ": " + ec.message());
}

// ---------------------------------------------------------------------------
// Experiment configuration.

struct ExperimentConfig {
    // problem
    int n = 2;
    int k = 2;
    std::vector<std::vector<std::string>> spectra = {{"1", "0"}, {"1", "0"}};
    std::string mode = "real";
    // sampling
    uint64_t seed = 1;
    int count = 10000;
    // flow
    FlowControls flow;
    // ressayre
    int trials = 8;
    double rank_tol = 1e-7;
    int probe_count = 0;
    bool exhaustive = false;
    long long component_bound = 4096;
    int admissible_budget = 12;
    // tolerances
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
    // output
    std::string out_dir = "out";
    std::vector<std::string> formats = {"csv", "json"};
};

inline json config_to_json(const ExperimentConfig& c) {
    json j;
    j["problem"] = {{"n", c.n}, {"k", c.k}, {"spectra", c.spectra}, {"mode", c.mode}};
    j["sampling"] = {{"seed", c.seed}, {"count", c.count}};
    j["flow"] = {{"step", c.flow.step},
                 {"tol", c.flow.tol},
                 {"max_steps", c.flow.max_steps},
                 {"shrink_factor", c.flow.shrink_factor}};
    j["ressayre"] = {{"trials", c.trials},
                     {"rank_tol", c.rank_tol},
                     {"probe_count", c.probe_count},
                     {"exhaustive", c.exhaustive},
                     {"component_bound", c.component_bound},
                     {"admissible_budget", c.admissible_budget}};
    j["tolerances"] = {{"membership", c.membership_tol},
                       {"soundness", c.soundness_tol},
                       {"hausdorff", c.hausdorff_tol},
                       {"wall", c.wall_tol},
                       {"value_match", c.value_tol},
                       {"fiber_dist", c.fiber_dist},
                       {"rational_max_den", c.max_den},
                       {"rational_residual", c.residual_tol},
                       {"snap", c.snap_tol},
                       {"support_slack", c.support_slack},
                       {"min_support", c.min_support}};
    j["output"] = {{"dir", c.out_dir}, {"formats", c.formats}};
    return j;
}

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    if (j.contains("problem")) {
        auto& p = j.at("problem");
        c.n = p.value("n", c.n);
        c.k = p.value("k", c.k);
        if (p.contains("spectra")) c.spectra = p.at("spectra").get<decltype(c.spectra)>();
        c.mode = p.value("mode", c.mode);
    }
    if (j.contains("sampling")) {
        auto& s = j.at("sampling");
        c.seed = s.value("seed", c.seed);
        c.count = s.value("count", c.count);
    }
    if (j.contains("flow")) {
        auto& f = j.at("flow");
        c.flow.step = f.value("step", c.flow.step);
        c.flow.tol = f.value("tol", c.flow.tol);
        c.flow.max_steps = f.value("max_steps", c.flow.max_steps);
        c.flow.shrink_factor = f.value("shrink_factor", c.flow.shrink_factor);
    }
    if (j.contains("ressayre")) {
        auto& r = j.at("ressayre");
        c.trials = r.value("trials", c.trials);
        c.rank_tol = r.value("rank_tol", c.rank_tol);
        c.probe_count = r.value("probe_count", c.probe_count);
        c.exhaustive = r.value("exhaustive", c.exhaustive);
        c.component_bound = r.value("component_bound", c.component_bound);
        c.admissible_budget = r.value("admissible_budget", c.admissible_budget);
    }
    if (j.contains("tolerances")) {
        auto& t = j.at("tolerances");
        c.membership_tol = t.value("membership", c.membership_tol);
        c.soundness_tol = t.value("soundness", c.soundness_tol);
        c.hausdorff_tol = t.value("hausdorff", c.hausdorff_tol);
        c.wall_tol = t.value("wall", c.wall_tol);
        c.value_tol = t.value("value_match", c.value_tol);
        c.fiber_dist = t.value("fiber_dist", c.fiber_dist);
        c.max_den = t.value("rational_max_den", c.max_den);
        c.residual_tol = t.value("rational_residual", c.residual_tol);
        c.snap_tol = t.value("snap", c.snap_tol);
        c.support_slack = t.value("support_slack", c.support_slack);
        c.min_support = t.value("min_support", c.min_support);
    }
    if (j.contains("output")) {
        auto& o = j.at("output");
        c.out_dir = o.value("dir", c.out_dir);
        if (o.contains("formats")) c.formats = o.at("formats").get<decltype(c.formats)>();
    }
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot read config " + path.string());
    json j = json::parse(in);
    return config_from_json(j);
}

/// Validates the problem invariants before any run.
inline OrbitProblem make_problem(const ExperimentConfig& c) {
    std::vector<RatVec> spectra;
    for (auto& row : c.spectra) {
        RatVec s;
        for (auto& entry : row) {
            auto r = Rational::parse(entry);
            if (!r) throw std::invalid_argument("config: cannot parse spectrum entry '" + entry + "'");
            s.push_back(*r);
        }
        spectra.push_back(std::move(s));
    }
    Mode mode;
    if (c.mode == "real")
        mode = Mode::Real;
    else if (c.mode == "hermitian")
        mode = Mode::Hermitian;
    else
        throw std::invalid_argument("config: mode must be 'real' or 'hermitian'");
    if ((int)spectra.size() != c.k)
        throw std::invalid_argument("config: k does not match the number of spectra");
    return OrbitProblem(c.n, std::move(spectra), mode);
}

inline VerifyOptions verify_options(const ExperimentConfig& c) {
    VerifyOptions o;
    o.seed = c.seed;
    o.count = c.count;
    o.trials = c.trials;
    o.rank_tol = c.rank_tol;
    o.admissible_budget = c.admissible_budget;
    o.component_bound = c.component_bound;
    o.membership_tol = c.membership_tol;
    o.soundness_tol = c.soundness_tol;
    o.hausdorff_tol = c.hausdorff_tol;
    o.wall_tol = c.wall_tol;
    o.value_tol = c.value_tol;
    o.fiber_dist = c.fiber_dist;
    o.max_den = c.max_den;
    o.residual_tol = c.residual_tol;
    o.snap_tol = c.snap_tol;
    o.support_slack = c.support_slack;
    o.min_support = c.min_support;
    o.flow = c.flow;
    o.exhaustive = c.exhaustive;
    o.probe_count = c.probe_count;
    return o;
}

// ---------------------------------------------------------------------------
// CSV emitters (comma separated, header row, LF, 17 significant digits).

inline std::string samples_csv(const std::vector<VectorXd>& chamber) {
    std::string s = "seed_index";
    if (!chamber.empty())
        for (Eigen::Index i = 0; i < chamber[0].size(); ++i)
            s += ",c" + std::to_string(i + 1);
    s += "\n";
    for (size_t r = 0; r < chamber.size(); ++r) {
        s += std::to_string(r);
        for (Eigen::Index i = 0; i < chamber[r].size(); ++i) s += "," + format_double(chamber[r][i]);
        s += "\n";
    }
    return s;
}

template <class Scalar>
std::string flow_trace_csv(const FlowResultT<Scalar>& res) {
    std::string s = "step,f,residual\n";
    for (size_t i = 0; i < res.residual_trace.size(); ++i) {
        s += std::to_string(i) + "," + format_double(res.f_trace[i]) + "," +
             format_double(res.residual_trace[i]) + "\n";
    }
    return s;
}

// ---------------------------------------------------------------------------
// JSON views.

inline json ratvec_to_json(const RatVec& v) {
    json a = json::array();
    for (auto& x : v) a.push_back(x.str());
    return a;
}

inline json vec_to_json(const VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline json polytope_to_json(const Polytope& p) {
    json j;
    j["ambient_dim"] = p.ambient_dim;
    json vs = json::array();
    for (auto& v : p.vertices) vs.push_back(vec_to_json(v));
    j["vertices"] = vs;
    json hs = json::array();
    for (auto& h : p.halfspaces) hs.push_back({{"normal", vec_to_json(h.normal)}, {"offset", h.offset}});
    j["halfspaces"] = hs;
    json eqs = json::array();
    for (auto& e : p.equalities) eqs.push_back({{"normal", vec_to_json(e.normal)}, {"offset", e.offset}});
    j["equalities"] = eqs;
    return j;
}

inline json pair_to_json(const RessayrePair& p) {
    json j;
    j["gamma"] = ratvec_to_json(p.gamma);
    j["gamma_is_rational"] = p.gamma_is_rational;
    j["blocks"] = p.component.blocks;
    j["assignments"] = p.component.assignments;
    j["value"] = p.value.str();
    j["value_float"] = p.value_float;
    j["admissible"] = p.admissible;
    j["regular"] = p.regular;
    j["is_pair"] = p.is_pair;
    j["rank"] = p.witness.numeric_rank;
    j["dims"] = {{"lie", p.witness.lie_dim},
                 {"tangent", p.witness.tangent_dim},
                 {"matched", p.witness.dims_match},
                 {"rank_tol", p.witness.tol}};
    j["dim_z"] = p.dim_z;
    j["dim_z_gamma"] = p.dim_z_gamma;
    j["dim_component"] = p.dim_component;
    j["provenance"] = provenance_name(p.provenance);
    return j;
}

inline json system_to_json(const InequalitySystem& sys) {
    json j;
    json ineq = json::array();
    for (auto& [g, v] : sys.inequalities)
        ineq.push_back({{"normal", ratvec_to_json(g)},
                        {"offset", v.str()},
                        {"normal_float", vec_to_json(rv_to_eigen(g))},
                        {"offset_float", v.value()}});
    j["inequalities"] = ineq;
    json eq = json::array();
    for (auto& [g, v] : sys.equalities)
        eq.push_back({{"normal", ratvec_to_json(g)},
                      {"offset", v.str()},
                      {"normal_float", vec_to_json(rv_to_eigen(g))},
                      {"offset_float", v.value()}});
    j["equalities"] = eq;
    return j;
}

inline json facet_to_json(const FacetCertificate& c) {
    json j;
    j["normal_float"] = vec_to_json(c.eta_float);
    j["rational"] = c.eta.has_value();
    if (c.eta) j["eta"] = ratvec_to_json(*c.eta);
    j["snapped"] = c.snapped;
    j["trivial"] = c.trivial;
    j["spurious"] = c.spurious;
    j["verified"] = c.verified;
    j["support_offset"] = c.support_offset;
    j["support_count"] = c.support_count;
    j["min_slack"] = c.min_slack;
    if (c.pair) j["pair"] = pair_to_json(*c.pair);
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

inline json probe_to_json(const ProjectionProbeResult& r) {
    json j;
    j["xi"] = vec_to_json(r.xi);
    j["xi_prime"] = vec_to_json(r.xi_prime_flow);
    j["xi_prime_hull"] = vec_to_json(r.xi_prime_hull);
    j["gamma"] = vec_to_json(r.pair.gamma_float);
    j["dist"] = r.dist_flow;
    j["dist_hull"] = r.dist_hull;
    j["agreement_with_polytope"] = r.agreement;
    j["separation"] = r.separation;
    j["pair"] = pair_to_json(r.pair);
    return j;
}

inline json report_to_json(const VerificationReport& r) {
    json j;
    j["stage"] = r.stage;
    j["ok"] = r.ok;
    j["checks"] = {{"soundness_ok", r.soundness_ok},
                   {"completeness_ok", r.completeness_ok},
                   {"facets_ok", r.facets_ok}};
    j["sample_count"] = r.sample_count;
    j["seed"] = r.seed;
    j["soundness_max_violation"] = r.soundness;
    j["hausdorff"] = r.hausdorff;
    j["region_bounded"] = r.region_bounded;
    json fs = json::array();
    for (auto& f : r.facets) fs.push_back(facet_to_json(f));
    j["facets"] = fs;
    json ps = json::array();
    for (auto& p : r.pairs) ps.push_back(pair_to_json(p));
    j["pairs"] = ps;
    json pr = json::array();
    for (auto& q : r.probes) pr.push_back(probe_to_json(q));
    j["probes"] = pr;
    j["inequalities"] = system_to_json(r.system);
    json slack = json::array();
    for (double s : r.comparison.min_slack) slack.push_back(s);
    j["tightness_min_slack"] = slack;
    j["warnings"] = r.warnings;
    return j;
}

} // namespace rmp
