#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>

#include "qmc/analysis.hpp"
#include "qmc/json_io.hpp"
#include "testutil.hpp"

using qmc::WeightedGraph;

namespace {

const WeightedGraph& k2() {
    static WeightedGraph g = WeightedGraph::parse("0 1 1");
    return g;
}
const WeightedGraph& triangle() {
    static WeightedGraph g = WeightedGraph::parse("0 1 1\n1 2 1\n0 2 1");
    return g;
}

qmc::SdpSolution solve(const WeightedGraph& g, int level = 2) {
    return qmc::solve_sdp(qmc::build_moment_structure(g, level), g, {1e-6, 200000});
}

/// SdpSolution whose moments are the exact expectations of a matching state:
/// m(P) = Tr(rho P). Used to audit analytically-known points.
qmc::SdpSolution moments_of_matching_state(const qmc::MatchingState& state,
                                           const WeightedGraph& g) {
    auto s = qmc::build_moment_structure(g, 2);
    const std::size_t dim = std::size_t(1) << g.vertex_count();
    qmc::SdpSolution sol;
    sol.class_values.assign(s.class_count, 0.0);
    for (std::size_t b = 0; b < s.basis.size(); ++b) {
        const auto mat = testutil::dense_pauli(s.basis[b]);
        double tr = 0.0;
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c)
                tr += qmc::detail::matching_entry(state, r, c) * mat[c * dim + r].real();
        sol.class_values[s.class_of_key(s.basis[b].support_key())] = tr;
    }
    sol.structure = std::move(s);
    return sol;
}

}  // namespace

TEST_CASE("star audit fixtures") {
    auto sol = solve(k2());
    CHECK(qmc::audit_star(sol, k2()).empty());  // sum = 1/2, tight but legal

    // maximally mixed assignment: every h+ is zero
    auto s = qmc::build_moment_structure(triangle(), 2);
    qmc::SdpSolution mixed;
    mixed.class_values.assign(s.class_count, 0.0);
    mixed.class_values[s.identity_class] = 1.0;
    mixed.structure = std::move(s);
    CHECK(qmc::audit_star(mixed, triangle()).empty());

    // star K_{1,3} from a real solve
    auto star = WeightedGraph::parse("0 1 1\n0 2 1\n0 3 1");
    auto star_sol = solve(star);
    CHECK(qmc::audit_star(star_sol, star).empty());
}

TEST_CASE("level-1 solutions can violate star monogamy (the audit detects it)") {
    auto path2 = WeightedGraph::parse("0 1 1\n0 2 1");
    auto sol1 = solve(path2, 1);
    CHECK(sol1.nu == Catch::Approx(2.0).margin(1e-3));  // level 1 overshoots
    CHECK_FALSE(qmc::audit_star(sol1, path2).empty());
    auto sol2 = solve(path2, 2);
    CHECK(sol2.nu == Catch::Approx(1.5).margin(1e-4));
    CHECK(qmc::audit_star(sol2, path2).empty());
}

TEST_CASE("triangle audit on the solved unit triangle") {
    auto sol = solve(triangle());
    CHECK(qmc::audit_triangle(sol, triangle()).empty());
    // linear part is tight: sum of g = 3/2
    const double sum =
        sol.pair_g(0, 1) + sol.pair_g(1, 2) + sol.pair_g(0, 2);
    CHECK(sum == Catch::Approx(1.5).margin(1e-4));
}

TEST_CASE("triangle quadratic inequality is tight for singlet x mixed") {
    WeightedGraph g(3, {{0, 1, 1.0}});
    auto sol = moments_of_matching_state({{{0, 1}}, {2}}, g);
    CHECK(sol.pair_g(0, 1) == Catch::Approx(1.0).margin(1e-12));
    CHECK(sol.pair_g(0, 2) == Catch::Approx(0.25).margin(1e-12));
    CHECK(sol.pair_g(1, 2) == Catch::Approx(0.25).margin(1e-12));
    const double lhs = 1.0 + 1.0 / 16.0 + 1.0 / 16.0;
    const double rhs = 2.0 * (0.25 + 0.25 + 1.0 / 16.0);
    CHECK(lhs == Catch::Approx(rhs).margin(1e-15));
    CHECK(qmc::audit_triangle(sol, g).empty());
    CHECK(qmc::audit_star(sol, g).empty());
    CHECK(qmc::audit_convexgamy(sol, g).empty());
}

TEST_CASE("convexgamy membership fixtures") {
    CHECK(qmc::convexgamy_feasible(1.0, 0.25));       // boundary: maximal edge
    CHECK(qmc::convexgamy_feasible(0.75, 0.75));      // on the ellipse
    CHECK_FALSE(qmc::convexgamy_feasible(1.0, 1.0));  // two maximal neighbors
    CHECK(qmc::convexgamy_feasible(0.0, 0.0));
    CHECK(qmc::convexgamy_feasible(0.5, 0.5));
    CHECK_FALSE(qmc::convexgamy_feasible(-0.1, 0.2, 1e-9));
    CHECK_FALSE(qmc::convexgamy_feasible(0.2, 1.2, 1e-9));
}

TEST_CASE("full audit is clean on solved fixtures") {
    for (const WeightedGraph* g : {&k2(), &triangle()}) {
        auto sol = solve(*g);
        auto report = qmc::run_audits(sol, *g);
        CHECK(report.clean());
        CHECK(report.stars_checked == g->vertex_count());
    }
}

TEST_CASE("ellipse region data") {
    auto rows = qmc::ellipse_region_data(5);
    REQUIRE(rows.size() == 10);
    // arc endpoints are the axis tangency points
    CHECK(rows[0].x == Catch::Approx(0.75).margin(1e-12));
    CHECK(rows[0].y == Catch::Approx(0.0).margin(1e-12));
    CHECK(rows[4].x == Catch::Approx(0.0).margin(1e-12));
    CHECK(rows[4].y == Catch::Approx(0.75).margin(1e-12));
    // midpoint is the symmetry point where the line x + y = 3/2 touches
    CHECK(rows[2].x == Catch::Approx(0.75).margin(1e-12));
    CHECK(rows[2].y == Catch::Approx(0.75).margin(1e-12));
    for (std::size_t k = 0; k < 5; ++k) {
        const auto& r = rows[k];
        CHECK(r.curve == "ellipse");
        const double s = r.x + r.y, d = r.x - r.y;
        CHECK(3.0 * (s - 1.0) * (s - 1.0) + d * d == Catch::Approx(0.75).margin(1e-12));
    }
    for (std::size_t k = 5; k < 10; ++k) {
        CHECK(rows[k].curve == "star_bound");
        CHECK(rows[k].x + rows[k].y == Catch::Approx(1.5).margin(1e-12));
    }
    CHECK_THROWS_AS(qmc::ellipse_region_data(1), std::invalid_argument);
}

TEST_CASE("alpha at pinned p values") {
    // matching only: the minimum sits exactly at the h+ kink
    auto m0 = qmc::alpha_at(0.0, 0.8);
    CHECK(m0.value == Catch::Approx(0.5).margin(1e-6));
    CHECK(m0.x == Catch::Approx(-1.0 / 3.0).margin(1e-6));
    // product only
    auto m1 = qmc::alpha_at(1.0, 0.8);
    CHECK(m1.value == Catch::Approx(0.498).margin(1e-3));
}

TEST_CASE("certify_alpha reproduces the guarantee constants") {
    auto cert = qmc::certify_alpha(0.8);
    CHECK(cert.alpha_star == Catch::Approx(0.595).margin(1e-3));
    CHECK(cert.p_star == Catch::Approx(0.674).margin(5e-3));
    // the sampled curve is concave and dominated by alpha_star
    for (std::size_t k = 1; k + 1 < cert.curve.size(); ++k) {
        CHECK(cert.curve[k - 1].second + cert.curve[k + 1].second <=
              2.0 * cert.curve[k].second + 1e-9);
        CHECK(cert.curve[k].second <= cert.alpha_star + 1e-9);
    }

    auto cert1 = qmc::certify_alpha(1.0);
    CHECK(cert1.alpha_star == Catch::Approx(0.606).margin(1e-3));
}

TEST_CASE("run_algorithm on the unit triangle finds the optimum") {
    qmc::RunOptions opts;
    opts.trials = 8;
    auto rep = qmc::run_algorithm(triangle(), opts);
    CHECK(rep.chosen == qmc::ChosenState::kMatching);
    CHECK(rep.matching_energy == Catch::Approx(1.5).margin(1e-12));
    REQUIRE(rep.ratio_vs_opt.has_value());
    CHECK(*rep.ratio_vs_opt == Catch::Approx(1.0).margin(1e-9));
    CHECK(rep.audit.clean());
    CHECK(rep.nu == Catch::Approx(1.5).margin(1e-4));
}

TEST_CASE("run_algorithm on K2") {
    qmc::RunOptions opts;
    opts.trials = 4;
    auto rep = qmc::run_algorithm(k2(), opts);
    CHECK(rep.chosen == qmc::ChosenState::kMatching);
    CHECK(rep.matching_energy == Catch::Approx(1.0).margin(1e-12));
    CHECK(*rep.ratio_vs_opt == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("run_algorithm is deterministic and honors the guarantee on C5") {
    auto c5 = WeightedGraph::parse("0 1 1\n1 2 1\n2 3 1\n3 4 1\n0 4 1");
    qmc::RunOptions opts;
    opts.trials = 16;
    auto r1 = qmc::run_algorithm(c5, opts);
    auto r2 = qmc::run_algorithm(c5, opts);
    CHECK(r1.product_energy == r2.product_energy);
    CHECK(r1.nu == r2.nu);
    CHECK(std::max(r1.product_energy, r1.matching_energy) >= 0.595 * r1.nu - 1e-6);
    CHECK(r1.ratio_vs_nu >= 0.595 - 1e-9);
    REQUIRE(r1.ratio_vs_opt.has_value());
    CHECK(*r1.ratio_vs_opt >= r1.ratio_vs_nu - 1e-12);  // lambda_max <= nu
}

TEST_CASE("sdp_to_fractional chains into the matching bound on fixtures") {
    auto sol = solve(k2());
    auto x = qmc::sdp_to_fractional(sol, k2());
    CHECK(x.x[0] == Catch::Approx(1.0).margin(1e-3));
    // solver slack can leave x marginally above 1, so check with SDP-scale tol
    auto scaled = qmc::scale_to_feasible(x, k2(), 1e-4);
    CHECK(scaled.x[0] == Catch::Approx(0.8).margin(1e-3));
    auto m = qmc::max_weight_matching(k2());
    CHECK(qmc::matching_weight(m, k2()) >= 1.6 * sol.pair_g(0, 1) - 0.8 - 1e-6);

    auto tri_sol = solve(triangle());
    auto tri_x = qmc::sdp_to_fractional(tri_sol, triangle());
    for (double xe : tri_x.x) CHECK(xe == Catch::Approx(0.0).margin(1e-3));
}

TEST_CASE("empty graph pipeline") {
    WeightedGraph g(2, {});
    qmc::RunOptions opts;
    opts.trials = 1;
    auto rep = qmc::run_algorithm(g, opts);
    CHECK(rep.nu == Catch::Approx(0.0).margin(1e-9));
    CHECK(rep.ratio_vs_nu == 1.0);
    CHECK(rep.matching_energy == 0.0);
}
