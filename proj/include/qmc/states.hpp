#pragma once

// Closed-form-evaluable state descriptions: products of single-qubit Bloch
// states, and matchings carrying singlets on matched edges with maximally
// mixed unmatched qubits.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "qmc/graph.hpp"

namespace qmc {

/// One unit Bloch vector per vertex.
struct ProductState {
    std::vector<std::array<double, 3>> bloch;
};

/// A matching on a fixed graph: edge indices plus the uncovered vertices.
struct Matching {
    std::vector<std::uint32_t> matched_edges;       // sorted edge indices
    std::vector<std::uint32_t> unmatched_vertices;  // sorted
};

inline double matching_weight(const Matching& m, const WeightedGraph& g) {
    double s = 0.0;
    for (std::uint32_t k : m.matched_edges) s += g.edge(k).w;
    return s;
}

/// Self-contained form of the matching state: singlet on each listed pair,
/// maximally mixed on each listed vertex. Pairs and vertices partition [0,n).
struct MatchingState {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> singlet_pairs;
    std::vector<std::uint32_t> mixed_vertices;
};

inline MatchingState make_matching_state(const Matching& m, const WeightedGraph& g) {
    MatchingState s;
    for (std::uint32_t k : m.matched_edges) {
        const Edge& e = g.edge(k);
        s.singlet_pairs.push_back({e.u, e.v});
    }
    s.mixed_vertices = m.unmatched_vertices;
    return s;
}

using QuantumStateDescription = std::variant<ProductState, MatchingState>;

inline std::uint32_t described_qubit_count(const QuantumStateDescription& s) {
    if (const auto* p = std::get_if<ProductState>(&s))
        return std::uint32_t(p->bloch.size());
    const auto& m = std::get<MatchingState>(s);
    return std::uint32_t(2 * m.singlet_pairs.size() + m.mixed_vertices.size());
}

}  // namespace qmc
