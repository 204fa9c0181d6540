#pragma once

// Random-projection rounding of the SDP vertex vectors to Bloch vectors, and
// the closed-form expected edge energy through f3, the dimension-3 expected
// inner product of projected unit vectors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qmc/graph.hpp"
#include "qmc/rng.hpp"
#include "qmc/sdp.hpp"
#include "qmc/states.hpp"

namespace qmc {

namespace detail {

/// Gauss series for 2F1(a, b; c; z), |z| < 1 and c not a nonpositive integer.
inline double gauss_2f1(double a, double b, double c, double z) {
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 4000; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum) + 1e-300) return sum;
    }
    throw std::runtime_error("gauss_2f1: series did not converge");
}

}  // namespace detail

/// f3(x) = (8 / 3 pi) x 2F1(1/2, 1/2; 5/2; x^2): odd, strictly increasing,
/// f3(0) = 0, f3(+-1) = +-1. Evaluated by the direct series for x^2 <= 1/2,
/// by the 1 - x^2 connection formula above that (the direct series slows to
/// a crawl near the endpoints), and by Gauss summation exactly at |x| = 1.
inline double f3_eval(double x) {
    if (std::isnan(x) || std::abs(x) > 1.0)
        throw std::domain_error("f3_eval: argument outside [-1, 1]");
    if (x == 1.0) return 1.0;
    if (x == -1.0) return -1.0;
    const double z = x * x;
    const double prefactor = 8.0 / (3.0 * std::numbers::pi);
    double series;
    if (z <= 0.5) {
        series = detail::gauss_2f1(0.5, 0.5, 2.5, z);
    } else {
        // 2F1(1/2,1/2;5/2;z) = (3 pi / 8) 2F1(1/2,1/2;-1/2;u) + u^(3/2) 2F1(2,2;5/2;u)
        const double u = 1.0 - z;
        series = (3.0 * std::numbers::pi / 8.0) * detail::gauss_2f1(0.5, 0.5, -0.5, u) +
                 u * std::sqrt(u) * detail::gauss_2f1(2.0, 2.0, 2.5, u);
    }
    return prefactor * x * series;
}

/// Deterministic trial-seed derivation so best-of-k rounding uses
/// independent streams off one user-facing seed.
inline RngSeed trial_seed(RngSeed base, std::uint64_t trial) {
    return {detail::splitmix64(base.value + 0x51a2bb3fb1e3a4c5ULL * (trial + 1))};
}

/// Gharibian-Parekh rounding: sample a 3 x 3d Gaussian matrix R and set
/// u_i = R v_i / ||R v_i||. Deterministic given the seed; the degenerate
/// event ||R v_i|| ~ 0 redraws R from the next stream.
inline ProductState gp_round(const SdpSolution& sol, RngSeed seed) {
    const std::uint32_t n = sol.structure.n;
    const std::size_t d = sol.structure.basis.size();
    const std::size_t dim = 3 * d;
    std::vector<std::vector<double>> v(n);
    for (std::uint32_t i = 0; i < n; ++i) v[i] = sol.vertex_vector(i);

    std::vector<double> r(3 * dim);
    for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt == 64)
            throw std::runtime_error("gp_round: repeated degenerate projections");
        NormalStream rng(seed, attempt);
        for (double& rv : r) rv = rng.next();
        ProductState state;
        state.bloch.assign(n, {0.0, 0.0, 0.0});
        bool degenerate = false;
        for (std::uint32_t i = 0; i < n && !degenerate; ++i) {
            std::array<double, 3> u{0.0, 0.0, 0.0};
            for (int row = 0; row < 3; ++row) {
                const double* rrow = r.data() + std::size_t(row) * dim;
                double s = 0.0;
                for (std::size_t k = 0; k < dim; ++k) s += rrow[k] * v[i][k];
                u[row] = s;
            }
            const double norm = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
            if (norm < 1e-12) {
                degenerate = true;
                break;
            }
            for (int row = 0; row < 3; ++row) state.bloch[i][row] = u[row] / norm;
        }
        if (!degenerate) return state;
    }
}

/// sum_e w_e (1 - u_i . u_j) / 4
inline double product_state_energy(const ProductState& state, const WeightedGraph& g) {
    if (state.bloch.size() != g.vertex_count())
        throw std::invalid_argument("product_state_energy: vertex count mismatch");
    double s = 0.0;
    for (const Edge& e : g.edges()) {
        const auto& a = state.bloch[e.u];
        const auto& b = state.bloch[e.v];
        const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        s += e.w * (1.0 - dot) / 4.0;
    }
    return s;
}

/// Closed-form rounding expectation: sum_e w_e (1 - f3(v_i . v_j)) / 4.
inline double expected_product_energy(const SdpSolution& sol, const WeightedGraph& g) {
    if (g.vertex_count() != sol.structure.n)
        throw std::invalid_argument("expected_product_energy: graph mismatch");
    double s = 0.0;
    for (const Edge& e : g.edges()) {
        double dot = sol.vertex_dot(e.u, e.v);
        if (std::abs(dot) > 1.0 + 1e-6)
            throw std::runtime_error("expected_product_energy: vertex dot outside [-1, 1]");
        dot = std::clamp(dot, -1.0, 1.0);
        s += e.w * (1.0 - f3_eval(dot)) / 4.0;
    }
    return s;
}

}  // namespace qmc
