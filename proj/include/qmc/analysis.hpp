#pragma once

// The end-to-end pipeline: solve the relaxation, round both ways, keep the
// better state. Alongside it, the audit suite that checks every monogamy and
// convexgamy inequality on solver output, and the numeric certification of
// the approximation constant.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmc/graph.hpp"
#include "qmc/matching.hpp"
#include "qmc/oracle.hpp"
#include "qmc/rounding.hpp"
#include "qmc/sdp.hpp"
#include "qmc/states.hpp"

namespace qmc {

// ---------------------------------------------------------------------------
// Audits

struct StarViolation {
    std::uint32_t vertex;
    double sum;    // sum of h+ over incident edges
    double slack;  // 1/2 - sum, negative when violated
};

struct TriangleViolation {
    std::uint32_t i, j, k;
    bool is_graph_triangle;
    // slacks of the three inequalities; negative entries are violations
    double linear_low_slack;   // sum - 0
    double linear_high_slack;  // 3/2 - sum
    double quadratic_slack;    // 2*(cross terms) - (squares)
    double hplus_slack;        // 1/2 - sum of h+
};

struct ConvexgamyViolation {
    std::uint32_t i, j, k;  // 2-path centered at j
    double x, y;
};

struct AuditReport {
    std::vector<StarViolation> star;
    std::vector<TriangleViolation> triangle;
    std::vector<ConvexgamyViolation> convexgamy;
    std::size_t stars_checked = 0;
    std::size_t triples_checked = 0;
    std::size_t graph_triangles_checked = 0;
    std::size_t two_paths_checked = 0;
    double tol = 0.0;

    bool clean() const {
        return star.empty() && triangle.empty() && convexgamy.empty();
    }
    std::size_t graph_triangle_violations() const {
        std::size_t c = 0;
        for (const auto& t : triangle) c += t.is_graph_triangle ? 1 : 0;
        return c;
    }
};

/// Star monogamy: sum of h+ over the edges at each vertex stays below 1/2.
inline std::vector<StarViolation> audit_star(const SdpSolution& sol, const WeightedGraph& g,
                                             double tol = 1e-5) {
    std::vector<StarViolation> out;
    for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
        double sum = 0.0;
        for (std::uint32_t k : g.incident_edges(i))
            sum += std::max(sol.pair_g(g.edge(k).u, g.edge(k).v) - 0.5, 0.0);
        if (sum > 0.5 + tol) out.push_back({i, sum, 0.5 - sum});
    }
    return out;
}

/// Triangle monogamy over every vertex triple (g values of non-edges come
/// from the moment matrix): the linear window, the quadratic relation, and
/// the h+ corollary.
inline std::vector<TriangleViolation> audit_triangle(const SdpSolution& sol,
                                                     const WeightedGraph& g,
                                                     double tol = 1e-5) {
    std::vector<TriangleViolation> out;
    const std::uint32_t n = g.vertex_count();
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            for (std::uint32_t k = j + 1; k < n; ++k) {
                const double gij = sol.pair_g(i, j);
                const double gjk = sol.pair_g(j, k);
                const double gik = sol.pair_g(i, k);
                const double sum = gij + gjk + gik;
                const double quad = 2.0 * (gij * gjk + gij * gik + gjk * gik) -
                                    (gij * gij + gjk * gjk + gik * gik);
                const double hps = std::max(gij - 0.5, 0.0) + std::max(gjk - 0.5, 0.0) +
                                   std::max(gik - 0.5, 0.0);
                if (sum < -tol || sum > 1.5 + tol || quad < -tol || hps > 0.5 + tol) {
                    const bool tri =
                        g.has_edge(i, j) && g.has_edge(j, k) && g.has_edge(i, k);
                    out.push_back({i, j, k, tri, sum, 1.5 - sum, quad, 0.5 - hps});
                }
            }
    return out;
}

/// Membership in the convexgamy region: bounded by the axes and the upper
/// arc of the ellipse 3(x+y-1)^2 + (x-y)^2 = 3/4, solved for x+y at fixed
/// x-y.
inline bool convexgamy_feasible(double x, double y, double tol = 1e-5) {
    if (x < -tol || y < -tol) return false;
    const double diff = x - y;
    if (std::abs(diff) > std::sqrt(3.0) / 2.0 + tol) return false;
    const double cap = 0.75 - std::min(0.75, diff * diff);
    return x + y <= 1.0 + std::sqrt(cap / 3.0) + tol;
}

/// Convexgamy on every ordered 2-path (i, j, k): (g_ij, g_jk) must lie in
/// the feasible region.
inline std::vector<ConvexgamyViolation> audit_convexgamy(const SdpSolution& sol,
                                                         const WeightedGraph& g,
                                                         double tol = 1e-5) {
    std::vector<ConvexgamyViolation> out;
    for (std::uint32_t j = 0; j < g.vertex_count(); ++j) {
        const auto nbrs = g.neighbors(j);
        for (std::size_t a = 0; a < nbrs.size(); ++a)
            for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
                const double x = sol.pair_g(nbrs[a], j);
                const double y = sol.pair_g(j, nbrs[b]);
                if (!convexgamy_feasible(x, y, tol))
                    out.push_back({nbrs[a], j, nbrs[b], x, y});
            }
    }
    return out;
}

inline AuditReport run_audits(const SdpSolution& sol, const WeightedGraph& g,
                              double tol = 1e-5) {
    AuditReport r;
    r.tol = tol;
    r.star = audit_star(sol, g, tol);
    r.triangle = audit_triangle(sol, g, tol);
    r.convexgamy = audit_convexgamy(sol, g, tol);
    const std::uint32_t n = g.vertex_count();
    r.stars_checked = n;
    r.triples_checked = std::size_t(n) * (n - 1) * (n - 2) / 6;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            for (std::uint32_t k = j + 1; k < n; ++k)
                if (g.has_edge(i, j) && g.has_edge(j, k) && g.has_edge(i, k))
                    ++r.graph_triangles_checked;
    for (std::uint32_t j = 0; j < n; ++j) {
        const std::size_t deg = g.neighbors(j).size();
        r.two_paths_checked += deg * (deg - 1) / 2;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Figure data

struct EllipseRow {
    std::string curve;  // "ellipse" or "star_bound"
    double x, y;
};

/// Boundary points of the convexgamy figure: the feasible arc of the ellipse
/// from one axis tangency (3/4, 0) through (3/4, 3/4) to the other (0, 3/4),
/// and the star-monogamy line x + y = 3/2. Each curve gets exactly `samples`
/// rows.
inline std::vector<EllipseRow> ellipse_region_data(int samples) {
    if (samples < 2) throw std::invalid_argument("ellipse_region_data: samples must be >= 2");
    std::vector<EllipseRow> rows;
    rows.reserve(2 * std::size_t(samples));
    const double theta0 = 2.0 * std::numbers::pi / 3.0;
    for (int s = 0; s < samples; ++s) {
        const double theta = theta0 - (2.0 * theta0) * double(s) / double(samples - 1);
        const double sum = 1.0 + 0.5 * std::cos(theta);
        const double diff = (std::sqrt(3.0) / 2.0) * std::sin(theta);
        rows.push_back({"ellipse", (sum + diff) / 2.0, (sum - diff) / 2.0});
    }
    for (int s = 0; s < samples; ++s) {
        const double x = 1.5 * double(s) / double(samples - 1);
        rows.push_back({"star_bound", x, 1.5 - x});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Approximation-constant certification

struct AlphaGrid {
    double x_step = 1e-4;        // coarse grid over [-1, 1/3)
    double x_refine = 1e-8;      // local refinement width
    double p_tol = 1e-6;         // outer golden-section tolerance
    int curve_samples = 101;     // sampled alpha(p) curve in the certificate
};

struct RatioCertificate {
    double scale;       // matching-LP scale (4/5 from the odd-set lemma)
    double p_star;
    double alpha_star;
    double x_star;      // inner minimizer at p_star
    std::vector<std::pair<double, double>> curve;  // (p, alpha(p)) samples
    AlphaGrid grid;
};

namespace detail {

/// The per-edge guarantee ratio at correlation x, mixing the product branch
/// with probability p against the matching branch with coefficient c.
inline double guarantee_ratio(double p, double x, double c, double f3x) {
    const double hplus = std::max(-(1.0 + 3.0 * x) / 4.0, 0.0);
    const double num = p * (1.0 - f3x) / 4.0 + (1.0 - p) * (0.25 + c * hplus);
    return num / ((1.0 - 3.0 * x) / 4.0);
}

struct InnerMin {
    double value;
    double x;
};

/// Dense-grid inner minimization over x in [-1, 1/3), then golden-section
/// refinement around the grid minimizer. The grid contains the h+ kink at
/// x = -1/3 explicitly; the ratio diverges as x -> 1/3 so the open end is
/// harmless.
inline InnerMin minimize_ratio(double p, double c, const std::vector<double>& xs,
                               const std::vector<double>& f3s, double refine_width) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double v = guarantee_ratio(p, xs[k], c, f3s[k]);
        if (v < best) {
            best = v;
            best_k = k;
        }
    }
    double lo = best_k == 0 ? xs.front() : xs[best_k - 1];
    double hi = best_k + 1 == xs.size() ? xs.back() : xs[best_k + 1];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    while (hi - lo > refine_width) {
        const double m1 = hi - gr * (hi - lo);
        const double m2 = lo + gr * (hi - lo);
        if (guarantee_ratio(p, m1, c, f3_eval(m1)) <
            guarantee_ratio(p, m2, c, f3_eval(m2)))
            hi = m2;
        else
            lo = m1;
    }
    const double xm = 0.5 * (lo + hi);
    const double vm = guarantee_ratio(p, xm, c, f3_eval(xm));
    return vm < best ? InnerMin{vm, xm} : InnerMin{best, xs[best_k]};
}

inline std::pair<std::vector<double>, std::vector<double>> alpha_x_grid(const AlphaGrid& grid) {
    std::vector<double> xs;
    for (double x = -1.0; x < 1.0 / 3.0 - grid.x_step / 2.0; x += grid.x_step)
        xs.push_back(x);
    xs.push_back(-1.0 / 3.0);  // straddle the kink exactly
    std::sort(xs.begin(), xs.end());
    std::vector<double> f3s;
    f3s.reserve(xs.size());
    for (double x : xs) f3s.push_back(f3_eval(x));
    return {std::move(xs), std::move(f3s)};
}

}  // namespace detail

/// Inner minimum of the guarantee ratio at fixed p (p pinned to 1 gives the
/// product-only ratio, p = 0 the matching-only ratio).
inline detail::InnerMin alpha_at(double p, double scale, const AlphaGrid& grid = {}) {
    if (!(scale > 0.0) || scale > 1.0)
        throw std::invalid_argument("alpha_at: scale must lie in (0, 1]");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("alpha_at: p must lie in [0, 1]");
    const double c = 1.5 * scale;
    auto [xs, f3s] = detail::alpha_x_grid(grid);
    return detail::minimize_ratio(p, c, xs, f3s, grid.x_refine);
}

/// alpha(scale) = max_p min_x ratio. The inner minimum of linear-in-p
/// functions is concave in p, so golden section over [0, 1] finds the
/// maximizer.
inline RatioCertificate certify_alpha(double scale = 0.8, const AlphaGrid& grid = {}) {
    if (!(scale > 0.0) || scale > 1.0)
        throw std::invalid_argument("certify_alpha: scale must lie in (0, 1]");
    const double c = 1.5 * scale;
    auto [xs, f3s] = detail::alpha_x_grid(grid);
    auto alpha = [&](double p) {
        return detail::minimize_ratio(p, c, xs, f3s, grid.x_refine).value;
    };

    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > grid.p_tol) {
        const double m1 = hi - gr * (hi - lo);
        const double m2 = lo + gr * (hi - lo);
        if (alpha(m1) > alpha(m2))
            hi = m2;
        else
            lo = m1;
    }
    RatioCertificate cert;
    cert.scale = scale;
    cert.grid = grid;
    cert.p_star = 0.5 * (lo + hi);
    const auto inner = detail::minimize_ratio(cert.p_star, c, xs, f3s, grid.x_refine);
    cert.alpha_star = inner.value;
    cert.x_star = inner.x;
    cert.curve.reserve(grid.curve_samples);
    for (int s = 0; s < grid.curve_samples; ++s) {
        const double p = double(s) / double(grid.curve_samples - 1);
        cert.curve.push_back({p, alpha(p)});
    }
    return cert;
}

// ---------------------------------------------------------------------------
// Algorithm pipeline

enum class ChosenState { kProduct, kMatching };

inline const char* to_string(ChosenState c) {
    return c == ChosenState::kProduct ? "product" : "matching";
}

struct RunOptions {
    std::uint64_t seed = 0;
    int trials = 64;
    int level = 2;
    double tol = 1e-6;
    int max_iter = 200000;
    double audit_tol = 1e-5;
    std::uint32_t oracle_cap = kDefaultOracleCap;  // lambda_max computed when n <= cap
};

struct SolveReport {
    double nu = 0.0;
    double product_energy = 0.0;           // best of `trials` rounded states, exact
    double expected_product_energy = 0.0;  // closed-form rounding expectation
    double matching_energy = 0.0;
    ChosenState chosen = ChosenState::kMatching;
    double ratio_vs_nu = 1.0;
    std::optional<double> lambda_max;
    std::optional<double> ratio_vs_opt;
    AuditReport audit;
    std::vector<EdgeValues> edges;
    double primal_residual = 0.0;
    double psd_residual = 0.0;
    double admm_gap = 0.0;
    double mix_theta = 0.0;
    int sdp_iterations = 0;
    Matching matching;
    ProductState best_product;
    RunOptions options;
};

/// Full pipeline: solve the level-`level` relaxation, take the best of
/// `trials` rounded product states and the maximum-weight matching state,
/// return whichever has greater exact energy, with audits attached. The
/// exact oracle joins in when the instance is small enough.
inline SolveReport run_algorithm(const WeightedGraph& g, const RunOptions& opts = {}) {
    if (opts.trials < 1) throw std::invalid_argument("run_algorithm: trials must be >= 1");
    SolveReport report;
    report.options = opts;

    MomentStructure structure = build_moment_structure(g, opts.level);
    SdpSolution sol = solve_sdp(std::move(structure), g, {opts.tol, opts.max_iter});
    report.nu = sol.nu;
    report.primal_residual = sol.primal_residual;
    report.psd_residual = sol.psd_residual;
    report.admm_gap = sol.admm_gap;
    report.mix_theta = sol.mix_theta;
    report.sdp_iterations = sol.iterations;
    report.edges = edge_values(sol, g);
    report.audit = run_audits(sol, g, opts.audit_tol);

    report.matching = max_weight_matching(g);
    report.matching_energy = matching_state_energy(report.matching, g);

    report.expected_product_energy = expected_product_energy(sol, g);
    double best_energy = -1.0;
    RngSeed base{opts.seed};
    for (int t = 0; t < opts.trials; ++t) {
        ProductState state = gp_round(sol, trial_seed(base, std::uint64_t(t)));
        const double en = product_state_energy(state, g);
        if (en > best_energy) {
            best_energy = en;
            report.best_product = std::move(state);
        }
    }
    report.product_energy = best_energy;

    report.chosen = report.product_energy > report.matching_energy
                        ? ChosenState::kProduct
                        : ChosenState::kMatching;
    const double achieved = std::max(report.product_energy, report.matching_energy);
    report.ratio_vs_nu = report.nu > 1e-12 ? achieved / report.nu : 1.0;

    if (g.vertex_count() <= opts.oracle_cap) {
        const EnergyReport oracle = max_energy(build_hamiltonian(g, opts.oracle_cap));
        report.lambda_max = oracle.lambda_max;
        report.ratio_vs_opt =
            oracle.lambda_max > 1e-12 ? achieved / oracle.lambda_max : 1.0;
    }
    return report;
}

}  // namespace qmc
