#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "qmc/linalg.hpp"
#include "qmc/matching.hpp"
#include "qmc/oracle.hpp"
#include "qmc/rounding.hpp"
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

}  // namespace

TEST_CASE("K2 Hamiltonian is the singlet projector") {
    auto h = qmc::build_hamiltonian(k2());
    auto eig = qmc::sym_eigen(h.h, 4);
    std::vector<double> expect{0.0, 0.0, 0.0, 1.0};
    for (int k = 0; k < 4; ++k) CHECK(eig.values[k] == Catch::Approx(expect[k]).margin(1e-14));
}

TEST_CASE("empty edge set gives the zero matrix") {
    auto h = qmc::build_hamiltonian(WeightedGraph(2, {}));
    for (double v : h.h) CHECK(v == 0.0);
}

TEST_CASE("unit triangle spectrum is {3/2 x4, 0 x4}") {
    auto h = qmc::build_hamiltonian(triangle());
    auto eig = qmc::sym_eigen(h.h, 8);
    for (int k = 0; k < 4; ++k) CHECK(eig.values[k] == Catch::Approx(0.0).margin(1e-12));
    for (int k = 4; k < 8; ++k) CHECK(eig.values[k] == Catch::Approx(1.5).margin(1e-12));
}

TEST_CASE("Hamiltonian is symmetric") {
    testutil::TestRng rng(42);
    auto g = testutil::random_graph(rng, 3, 6);
    auto h = qmc::build_hamiltonian(g);
    const std::size_t d = h.dim();
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = r + 1; c < d; ++c) CHECK(h.h[r * d + c] == h.h[c * d + r]);
}

TEST_CASE("qubit cap raises a resource error") {
    CHECK_THROWS_AS(qmc::build_hamiltonian(WeightedGraph(5, {{0, 1, 1.0}}), 4),
                    qmc::ResourceError);
}

TEST_CASE("lambda_max fixtures") {
    CHECK(qmc::max_energy(qmc::build_hamiltonian(k2())).lambda_max ==
          Catch::Approx(1.0).margin(1e-12));
    CHECK(qmc::max_energy(qmc::build_hamiltonian(triangle())).lambda_max ==
          Catch::Approx(1.5).margin(1e-12));
    // star K_{1,3}: frozen from this oracle's own dense eigensolve
    auto star = WeightedGraph::parse("0 1 1\n0 2 1\n0 3 1");
    CHECK(qmc::max_energy(qmc::build_hamiltonian(star)).lambda_max ==
          Catch::Approx(2.0).margin(1e-10));
}

TEST_CASE("energy of simple descriptions on K2") {
    auto h = qmc::build_hamiltonian(k2());

    qmc::MatchingState singlet{{{0, 1}}, {}};
    CHECK(qmc::energy_of_description(h, singlet) == Catch::Approx(1.0).margin(1e-12));

    qmc::MatchingState mixed{{}, {0, 1}};
    CHECK(qmc::energy_of_description(h, mixed) == Catch::Approx(0.25).margin(1e-12));

    qmc::ProductState anti{{{0, 0, 1}, {0, 0, -1}}};
    CHECK(qmc::energy_of_description(h, anti) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("dimension mismatch is rejected") {
    auto h = qmc::build_hamiltonian(k2());
    qmc::ProductState three{{{0, 0, 1}, {0, 0, 1}, {0, 0, 1}}};
    CHECK_THROWS_AS(qmc::energy_of_description(h, three), std::invalid_argument);
}

TEST_CASE("property: closed-form energies match the dense oracle to 1e-12") {
    testutil::TestRng rng(777);
    for (int trial = 0; trial < 25; ++trial) {
        auto g = testutil::random_graph(rng, 2, 6);
        auto h = qmc::build_hamiltonian(g);

        qmc::ProductState ps;
        for (std::uint32_t v = 0; v < g.vertex_count(); ++v)
            ps.bloch.push_back(rng.unit_vector3());
        CHECK(qmc::energy_of_description(h, ps) ==
              Catch::Approx(qmc::product_state_energy(ps, g)).margin(1e-12));

        auto m = qmc::max_weight_matching(g);
        CHECK(qmc::energy_of_description(h, qmc::make_matching_state(m, g)) ==
              Catch::Approx(qmc::matching_state_energy(m, g)).margin(1e-12));
    }
}

TEST_CASE("property: lambda_max dominates every described state") {
    testutil::TestRng rng(888);
    for (int trial = 0; trial < 15; ++trial) {
        auto g = testutil::random_graph(rng, 2, 6);
        auto h = qmc::build_hamiltonian(g);
        const double lmax = qmc::max_energy(h).lambda_max;
        qmc::ProductState ps;
        for (std::uint32_t v = 0; v < g.vertex_count(); ++v)
            ps.bloch.push_back(rng.unit_vector3());
        CHECK(qmc::energy_of_description(h, ps) <= lmax + 1e-9);
        auto m = qmc::max_weight_matching(g);
        CHECK(qmc::energy_of_description(h, qmc::make_matching_state(m, g)) <= lmax + 1e-9);
    }
}
