#pragma once

// JSON views of the report types. Keys come out sorted (nlohmann's default
// object ordering), so identical runs serialize to identical bytes; the
// schema is pinned by golden tests and versioned via "schema_version".

#include <json.hpp>

#include "qmc/analysis.hpp"
#include "qmc/graph.hpp"
#include "qmc/matching.hpp"
#include "qmc/oracle.hpp"

namespace qmc {

inline constexpr int kSchemaVersion = 1;

inline nlohmann::json oracle_json(const WeightedGraph& g, const EnergyReport& r) {
    return {{"lambda_max", r.lambda_max},
            {"n", g.vertex_count()},
            {"schema_version", kSchemaVersion}};
}

inline nlohmann::json matching_json(const Matching& m, const WeightedGraph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (std::uint32_t k : m.matched_edges) {
        const Edge& e = g.edge(k);
        edges.push_back({{"index", k}, {"u", e.u}, {"v", e.v}, {"w", e.w}});
    }
    return {{"matched_edges", edges},
            {"schema_version", kSchemaVersion},
            {"unmatched_vertices", m.unmatched_vertices},
            {"weight", matching_weight(m, g)}};
}

inline nlohmann::json audit_json(const AuditReport& a) {
    nlohmann::json star = nlohmann::json::array();
    for (const auto& v : a.star)
        star.push_back({{"vertex", v.vertex}, {"sum", v.sum}, {"slack", v.slack}});
    nlohmann::json triangle = nlohmann::json::array();
    for (const auto& t : a.triangle)
        triangle.push_back({{"i", t.i},
                            {"j", t.j},
                            {"k", t.k},
                            {"is_graph_triangle", t.is_graph_triangle},
                            {"linear_low_slack", t.linear_low_slack},
                            {"linear_high_slack", t.linear_high_slack},
                            {"quadratic_slack", t.quadratic_slack},
                            {"hplus_slack", t.hplus_slack}});
    nlohmann::json convexgamy = nlohmann::json::array();
    for (const auto& c : a.convexgamy)
        convexgamy.push_back(
            {{"i", c.i}, {"j", c.j}, {"k", c.k}, {"x", c.x}, {"y", c.y}});
    return {{"checked",
             {{"stars", a.stars_checked},
              {"triples", a.triples_checked},
              {"graph_triangles", a.graph_triangles_checked},
              {"two_paths", a.two_paths_checked}}},
            {"clean", a.clean()},
            {"convexgamy", convexgamy},
            {"schema_version", kSchemaVersion},
            {"star", star},
            {"tol", a.tol},
            {"triangle", triangle}};
}

inline nlohmann::json solve_json(const SolveReport& r, const WeightedGraph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (std::size_t k = 0; k < r.edges.size(); ++k) {
        const Edge& e = g.edge(k);
        edges.push_back({{"u", e.u},
                         {"v", e.v},
                         {"w", e.w},
                         {"g", r.edges[k].g},
                         {"h", r.edges[k].h},
                         {"h_plus", r.edges[k].h_plus}});
    }
    nlohmann::json j{{"audit", audit_json(r.audit)},
                     {"chosen", to_string(r.chosen)},
                     {"edges", edges},
                     {"expected_product_energy", r.expected_product_energy},
                     {"level", r.options.level},
                     {"matching", matching_json(r.matching, g)},
                     {"matching_energy", r.matching_energy},
                     {"nu", r.nu},
                     {"product_energy", r.product_energy},
                     {"ratio_vs_nu", r.ratio_vs_nu},
                     {"residuals",
                      {{"admm_gap", r.admm_gap},
                       {"mix_theta", r.mix_theta},
                       {"primal", r.primal_residual},
                       {"psd", r.psd_residual},
                       {"sdp_iterations", r.sdp_iterations}}},
                     {"schema_version", kSchemaVersion},
                     {"seed", r.options.seed},
                     {"trials", r.options.trials}};
    if (r.lambda_max) j["lambda_max"] = *r.lambda_max;
    if (r.ratio_vs_opt) j["ratio_vs_opt"] = *r.ratio_vs_opt;
    return j;
}

inline nlohmann::json certificate_json(const RatioCertificate& c) {
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& [p, a] : c.curve) curve.push_back({p, a});
    return {{"alpha_star", c.alpha_star},
            {"curve", curve},
            {"grid",
             {{"curve_samples", c.grid.curve_samples},
              {"p_tol", c.grid.p_tol},
              {"x_refine", c.grid.x_refine},
              {"x_step", c.grid.x_step}}},
            {"p_star", c.p_star},
            {"scale", c.scale},
            {"schema_version", kSchemaVersion},
            {"x_star", c.x_star}};
}

inline std::string ellipse_csv(const std::vector<EllipseRow>& rows) {
    std::string out = "curve,x,y\n";
    for (const auto& r : rows) {
        out += r.curve;
        out += ',';
        out += nlohmann::json(r.x).dump();
        out += ',';
        out += nlohmann::json(r.y).dump();
        out += '\n';
    }
    return out;
}

}  // namespace qmc
