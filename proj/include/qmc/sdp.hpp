#pragma once

// Level-1/2 quantum Lasserre relaxation of Quantum Max Cut. The moment
// matrix is indexed by Pauli strings of weight <= level; algebra identities
// partition its entries into equality classes, and the solver runs an
// operator-splitting loop between the class-structured affine subspace
// (with an objective tilt) and the PSD cone.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "qmc/graph.hpp"
#include "qmc/linalg.hpp"
#include "qmc/pauli.hpp"

namespace qmc {

class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string& what, double primal, double psd, int iters)
        : std::runtime_error(what), primal_residual(primal), psd_residual(psd),
          iterations(iters) {}
    double primal_residual;
    double psd_residual;
    int iterations;
};

/// Entry-equality structure of the moment matrix for one instance.
///
/// For basis elements P, Q with product PQ = phase * R:
///   - anticommuting pairs (imaginary phase) are pinned to zero,
///   - commuting pairs share a class keyed by R, with the +-1 phase recorded
///     per pair relative to the canonically-signed representative,
///   - the diagonal (R = I) is the class pinned to one.
/// Entries whose defining product carries an imaginary phase are exactly the
/// pinned zeros, so the matrix stays real.
struct MomentStructure {
    std::uint32_t n = 0;
    int level = 2;
    std::vector<PauliString> basis;

    // upper-triangle pair data, index via pair_index()
    std::vector<std::int32_t> pair_class;  // -1 for pinned-zero entries
    std::vector<std::int8_t> pair_sign;

    std::int32_t class_count = 0;
    std::int32_t identity_class = -1;
    std::vector<double> class_mass;  // # matrix cells per class (diag 1, off-diag 2)

    std::vector<double> objective_coeff;  // d nu / d m_c
    double objective_const = 0.0;

    std::unordered_map<std::uint64_t, std::int32_t> key_to_class;

    int dim() const { return int(basis.size()); }

    std::size_t pair_index(std::size_t i, std::size_t j) const {
        // i <= j, row-major upper triangle
        const std::size_t d = basis.size();
        return i * d - i * (i - 1) / 2 + (j - i);
    }

    /// Class id of the string P (the class containing entry (I, P)), or -1.
    std::int32_t class_of_key(std::uint64_t support_key) const {
        auto it = key_to_class.find(support_key);
        return it == key_to_class.end() ? -1 : it->second;
    }

    /// Basis index of the weight-1 string (qubit, axis), valid at both levels.
    std::size_t single_index(std::uint32_t qubit, Axis a) const {
        return 1 + 3 * std::size_t(qubit) + axis_rank(a);
    }

    double nu_of(const std::vector<double>& class_values) const {
        double s = objective_const;
        for (std::int32_t c = 0; c < class_count; ++c)
            s += objective_coeff[c] * class_values[c];
        return s;
    }
};

inline MomentStructure build_moment_structure(const WeightedGraph& g, int level) {
    if (level != 1 && level != 2)
        throw std::invalid_argument("build_moment_structure: level must be 1 or 2");
    MomentStructure s;
    s.n = g.vertex_count();
    s.level = level;
    s.basis = level == 2 ? enumerate_p2(s.n) : enumerate_p1(s.n);
    const std::size_t d = s.basis.size();
    s.pair_class.assign(d * (d + 1) / 2, -1);
    s.pair_sign.assign(d * (d + 1) / 2, 0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            auto [phase, prod] = multiply(s.basis[i], s.basis[j]);
            if (!phase.is_real()) continue;  // anticommuting: pinned zero
            std::uint64_t key = prod.support_key();
            auto [it, inserted] = s.key_to_class.try_emplace(key, s.class_count);
            if (inserted) {
                ++s.class_count;
                s.class_mass.push_back(0.0);
            }
            const std::size_t t = s.pair_index(i, j);
            s.pair_class[t] = it->second;
            s.pair_sign[t] = std::int8_t(phase.real_sign());
            s.class_mass[it->second] += (i == j) ? 1.0 : 2.0;
        }
    }
    s.identity_class = s.key_to_class.at(PauliString::identity(s.n).support_key());

    s.objective_coeff.assign(s.class_count, 0.0);
    for (const Edge& e : g.edges()) {
        s.objective_const += e.w / 4.0;
        for (int r = 0; r < 3; ++r) {
            Axis a = axis_from_rank(r);
            std::uint64_t key = PauliString::two(s.n, e.u, a, e.v, a).support_key();
            s.objective_coeff[s.key_to_class.at(key)] -= e.w / 4.0;
        }
    }
    return s;
}

struct SolveOptions {
    double tol = 1e-6;
    int max_iter = 200000;
};

struct EdgeValues {
    double g, h, h_plus;
};

/// Solved relaxation: class representative values (the moment matrix
/// satisfies every equality class exactly by construction), the factor rows
/// v(P), and per-edge derived quantities.
struct SdpSolution {
    MomentStructure structure;
    std::vector<double> class_values;  // m, indexed by class id
    std::vector<double> factors;       // row-major d x d, row p = v(P)
    double nu = 0.0;
    double primal_residual = 0.0;  // class-equality violation of the output (0 by construction)
    double psd_residual = 0.0;     // |most negative eigenvalue| of the output
    double admm_gap = 0.0;         // Frobenius gap between the two projections at exit
    double mix_theta = 0.0;        // identity-mix applied to clear the PSD cone
    int iterations = 0;

    /// Dense moment matrix entry, reconstructed from class values.
    double moment(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        const std::size_t t = structure.pair_index(i, j);
        std::int32_t c = structure.pair_class[t];
        return c < 0 ? 0.0 : structure.pair_sign[t] * class_values[c];
    }

    /// m(P) for a product string P, i.e. the entry (I, P).
    double moment_of_key(std::uint64_t support_key) const {
        std::int32_t c = structure.class_of_key(support_key);
        if (c < 0) throw std::out_of_range("moment_of_key: unknown product string");
        return class_values[c];
    }

    /// g value for an arbitrary vertex pair (edges and non-edges alike).
    double pair_g(std::uint32_t u, std::uint32_t v) const {
        if (u == v) throw std::invalid_argument("pair_g: identical vertices");
        double s = 0.0;
        for (int r = 0; r < 3; ++r) {
            Axis a = axis_from_rank(r);
            s += moment_of_key(PauliString::two(structure.n, u, a, v, a).support_key());
        }
        return (1.0 - s) / 4.0;
    }

    /// v_i . v_j from the extracted factors, v_i = (v(X_i)||v(Y_i)||v(Z_i))/sqrt(3).
    double vertex_dot(std::uint32_t i, std::uint32_t j) const {
        const std::size_t d = structure.basis.size();
        double s = 0.0;
        for (int r = 0; r < 3; ++r) {
            Axis a = axis_from_rank(r);
            const double* vi = factors.data() + structure.single_index(i, a) * d;
            const double* vj = factors.data() + structure.single_index(j, a) * d;
            for (std::size_t k = 0; k < d; ++k) s += vi[k] * vj[k];
        }
        return s / 3.0;
    }

    /// Concatenated vertex vector of dimension 3d (already divided by sqrt 3).
    std::vector<double> vertex_vector(std::uint32_t i) const {
        const std::size_t d = structure.basis.size();
        std::vector<double> out(3 * d);
        const double inv = 1.0 / std::sqrt(3.0);
        for (int r = 0; r < 3; ++r) {
            Axis a = axis_from_rank(r);
            const double* src = factors.data() + structure.single_index(i, a) * d;
            for (std::size_t k = 0; k < d; ++k) out[r * d + k] = inv * src[k];
        }
        return out;
    }
};

namespace detail {

/// Projects V onto the class-structured subspace, with an optional objective
/// tilt applied in class coordinates: m_c = avg_c(V) + tilt * coeff_c / mass_c.
inline void project_structure(const MomentStructure& s, const std::vector<double>& v,
                              double tilt, std::vector<double>& m_out) {
    const std::size_t d = s.basis.size();
    m_out.assign(s.class_count, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        const double* row = v.data() + i * d;
        for (std::size_t j = i; j < d; ++j) {
            const std::size_t t = s.pair_index(i, j);
            const std::int32_t c = s.pair_class[t];
            if (c < 0) continue;
            const double mult = (i == j) ? 1.0 : 2.0;
            m_out[c] += mult * s.pair_sign[t] * row[j];
        }
    }
    for (std::int32_t c = 0; c < s.class_count; ++c)
        m_out[c] = m_out[c] / s.class_mass[c] + tilt * s.objective_coeff[c] / s.class_mass[c];
    m_out[s.identity_class] = 1.0;
}

inline void reconstruct_dense(const MomentStructure& s, const std::vector<double>& m,
                              std::vector<double>& w_out) {
    const std::size_t d = s.basis.size();
    w_out.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            const std::size_t t = s.pair_index(i, j);
            const std::int32_t c = s.pair_class[t];
            if (c < 0) continue;
            double val = s.pair_sign[t] * m[c];
            w_out[i * d + j] = val;
            w_out[j * d + i] = val;
        }
}

}  // namespace detail

/// Solves the relaxation with over-relaxed ADMM: alternate the
/// structured-subspace projection (carrying the objective gradient) against
/// the PSD cone. The loop stops once the structured iterate is within
/// 10*tol of the cone in eigenvalue terms; a final mix toward the strictly
/// feasible maximally-mixed point (moment matrix = identity) then makes the
/// output PSD outright. Equality classes hold exactly throughout, so the
/// returned solution is feasible to machine precision and every inequality
/// provable for feasible points holds on it.
inline SdpSolution solve_sdp(MomentStructure structure, const WeightedGraph& g,
                             SolveOptions opts = {}) {
    if (opts.tol <= 0) throw std::invalid_argument("solve_sdp: tol must be positive");
    if (structure.n != g.vertex_count())
        throw std::invalid_argument("solve_sdp: structure does not match graph");
    const std::size_t d = structure.basis.size();
    // gates calibrated against the objective accuracy the mix can preserve:
    // lambda_min >= -10 tol costs O(10 tol * nu) objective after mixing
    const double eig_gate = 10.0 * opts.tol;
    const double gap_gate = 50.0 * opts.tol;

    std::vector<double> m;               // class values
    std::vector<double> w(d * d, 0.0);   // structured iterate M(m)
    std::vector<double> x(d * d, 0.0);   // PSD iterate
    std::vector<double> u(d * d, 0.0);   // scaled dual
    std::vector<double> scratch(d * d), x_prev(d * d);
    SymEigenWorkspace eig_ws{int(d)};

    m.assign(structure.class_count, 0.0);
    m[structure.identity_class] = 1.0;
    detail::reconstruct_dense(structure, m, w);
    x = w;

    double rho = 0.1;
    const double relax = 1.9;
    double primal = 0.0, dual = 0.0, min_eig = -1.0;
    int it = 0;
    bool converged = false;

    for (it = 1; it <= opts.max_iter; ++it) {
        // structured step: W = Pi_L(X - U + grad / rho)
        for (std::size_t k = 0; k < d * d; ++k) scratch[k] = x[k] - u[k];
        detail::project_structure(structure, scratch, 1.0 / rho, m);
        detail::reconstruct_dense(structure, m, w);

        // PSD step on the over-relaxed point
        x_prev.swap(x);
        for (std::size_t k = 0; k < d * d; ++k)
            x[k] = relax * w[k] + (1.0 - relax) * x_prev[k] + u[k];
        eig_ws.psd_project(x);

        // dual step
        for (std::size_t k = 0; k < d * d; ++k)
            u[k] += relax * w[k] + (1.0 - relax) * x_prev[k] - x[k];

        if (it % 20 == 0) {
            double r2 = 0.0, s2 = 0.0;
            for (std::size_t k = 0; k < d * d; ++k) {
                double rd = w[k] - x[k];
                double sd = x[k] - x_prev[k];
                r2 += rd * rd;
                s2 += sd * sd;
            }
            primal = std::sqrt(r2);
            dual = rho * std::sqrt(s2);
            if (primal <= gap_gate && dual <= gap_gate) {
                min_eig = eig_ws.min_eigenvalue(w);
                if (min_eig >= -eig_gate) {
                    converged = true;
                    break;
                }
            }
            // rebalance the penalty; the scaled dual rescales with it
            if (it % 100 == 0) {
                if (primal > 10.0 * dual && rho < 1e5) {
                    rho *= 2.0;
                    for (auto& uk : u) uk *= 0.5;
                } else if (dual > 10.0 * primal && rho > 1e-5) {
                    rho *= 0.5;
                    for (auto& uk : u) uk *= 2.0;
                }
            }
        }
    }

    SdpSolution sol;
    sol.admm_gap = primal;
    sol.iterations = std::min(it, opts.max_iter);

    if (!converged) {
        sol.nu = structure.nu_of(m);
        throw ConvergenceError("solve_sdp: no convergence after " +
                                   std::to_string(opts.max_iter) + " iterations",
                               primal, std::max(0.0, -min_eig), sol.iterations);
    }

    // feasibility repair: mix toward the identity moment point until the
    // smallest eigenvalue clears zero
    detail::reconstruct_dense(structure, m, w);
    eig_ws.decompose(w);
    double theta_total = 0.0;
    for (int rounds = 0; eig_ws.values().front() < -1e-13 && rounds < 8; ++rounds) {
        const double lam = eig_ws.values().front();
        const double theta = std::min(1.05 * (-lam) / (1.0 - lam) + 1e-15, 1.0);
        for (std::int32_t c = 0; c < structure.class_count; ++c) m[c] *= 1.0 - theta;
        m[structure.identity_class] = 1.0;
        theta_total = 1.0 - (1.0 - theta_total) * (1.0 - theta);
        detail::reconstruct_dense(structure, m, w);
        eig_ws.decompose(w);
    }
    sol.mix_theta = theta_total;

    sol.nu = structure.nu_of(m);
    sol.class_values = m;
    // the returned matrix satisfies every class identity by construction
    sol.primal_residual = 0.0;
    sol.psd_residual = std::max(0.0, -eig_ws.values().front());

    // factor rows v(P) from the final eigendecomposition (clamped at zero)
    sol.factors.assign(d * d, 0.0);
    const auto& evals = eig_ws.values();
    const auto& evecs = eig_ws.vectors();  // column k contiguous
    for (std::size_t k = 0; k < d; ++k) {
        if (evals[k] <= 0.0) continue;
        const double s = std::sqrt(evals[k]);
        const double* col = evecs.data() + k * d;
        for (std::size_t p = 0; p < d; ++p) sol.factors[p * d + k] = s * col[p];
    }
    sol.structure = std::move(structure);

    if (sol.psd_residual > opts.tol)
        throw ConvergenceError("solve_sdp: PSD residual above tolerance",
                               sol.primal_residual, sol.psd_residual, sol.iterations);
    return sol;
}

/// Per-edge (g, h, h+) with the cross-check g = 1/2 - (1 + 3 v_i.v_j)/4
/// against the extracted factors.
inline std::vector<EdgeValues> edge_values(const SdpSolution& sol, const WeightedGraph& g) {
    if (g.vertex_count() != sol.structure.n)
        throw std::invalid_argument("edge_values: graph does not match solution");
    std::vector<EdgeValues> out;
    out.reserve(g.edge_count());
    const double check_tol = 50.0 * (sol.psd_residual + 1e-12) + 1e-9;
    for (const Edge& e : g.edges()) {
        double gv = sol.pair_g(e.u, e.v);
        double gv_vec = (1.0 - 3.0 * sol.vertex_dot(e.u, e.v)) / 4.0;
        if (std::abs(gv - gv_vec) > check_tol)
            throw std::runtime_error(
                "edge_values: factor consistency check failed near " +
                PauliString::two(sol.structure.n, e.u, Axis::X, e.v, Axis::X).str());
        double h = gv - 0.5;
        out.push_back({gv, h, std::max(h, 0.0)});
    }
    return out;
}

}  // namespace qmc
