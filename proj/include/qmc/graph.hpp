#pragma once

// Weighted problem instances: validation, adjacency, and the edge-list text
// format. Graphs are immutable after construction and freely shared.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmc {

struct Edge {
    std::uint32_t u, v;
    double w;
};

class GraphParseError : public std::runtime_error {
  public:
    GraphParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

/// Simple graph with strictly positive finite edge weights. Edges are stored
/// with u < v; duplicates and self-loops are rejected at construction.
class WeightedGraph {
  public:
    WeightedGraph(std::uint32_t n, std::vector<Edge> edges) : n_(n) {
        if (n == 0) throw std::invalid_argument("graph: vertex count must be >= 1");
        edges_.reserve(edges.size());
        for (Edge e : edges) {
            if (e.u == e.v) throw std::invalid_argument("graph: self-loop");
            if (e.u > e.v) std::swap(e.u, e.v);
            if (e.v >= n_) throw std::invalid_argument("graph: vertex index out of range");
            if (!(e.w > 0.0) || !std::isfinite(e.w))
                throw std::invalid_argument("graph: edge weight must be positive and finite");
            edges_.push_back(e);
        }
        adj_.assign(n_, {});
        for (std::uint32_t k = 0; k < edges_.size(); ++k) {
            adj_[edges_[k].u].push_back(k);
            adj_[edges_[k].v].push_back(k);
        }
        auto key = [](const Edge& e) { return (std::uint64_t(e.u) << 32) | e.v; };
        std::vector<std::uint64_t> keys;
        keys.reserve(edges_.size());
        for (const Edge& e : edges_) keys.push_back(key(e));
        std::sort(keys.begin(), keys.end());
        if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
            throw std::invalid_argument("graph: duplicate edge");
    }

    std::uint32_t vertex_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(std::size_t k) const { return edges_.at(k); }

    /// Indices of edges incident to v.
    const std::vector<std::uint32_t>& incident_edges(std::uint32_t v) const {
        if (v >= n_) throw std::out_of_range("graph: vertex index out of range");
        return adj_[v];
    }

    std::vector<std::uint32_t> neighbors(std::uint32_t v) const {
        std::vector<std::uint32_t> out;
        for (std::uint32_t k : incident_edges(v))
            out.push_back(edges_[k].u == v ? edges_[k].v : edges_[k].u);
        std::sort(out.begin(), out.end());
        return out;
    }

    bool has_edge(std::uint32_t u, std::uint32_t v) const {
        if (u > v) std::swap(u, v);
        for (std::uint32_t k : incident_edges(u)) {
            const Edge& e = edges_[k];
            if (e.u == u && e.v == v) return true;
        }
        return false;
    }

    double total_weight() const {
        double s = 0.0;
        for (const Edge& e : edges_) s += e.w;
        return s;
    }

    /// Wedge enumeration: for every edge (u,v), scan the shorter incident
    /// list for a common neighbor.
    bool is_triangle_free() const {
        for (const Edge& e : edges_)
            for (std::uint32_t k : adj_[e.u]) {
                std::uint32_t x = edges_[k].u == e.u ? edges_[k].v : edges_[k].u;
                if (x != e.v && has_edge(x, e.v)) return false;
            }
        return true;
    }

    /// Edge-list format: optional "p <n> <m>" header, "<u> <v> <w>" lines,
    /// '#' comments, whitespace-separated. Vertex count is the declared
    /// header value or 1 + max index.
    static WeightedGraph parse(std::istream& in) {
        std::string line;
        std::size_t lineno = 0;
        bool have_header = false;
        std::uint64_t header_n = 0, header_m = 0;
        std::vector<Edge> edges;
        std::uint64_t max_index = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string first;
            if (!(ls >> first)) continue;  // blank or comment-only
            if (first == "p") {
                if (have_header || !edges.empty())
                    throw GraphParseError(lineno, "header must come first");
                if (!(ls >> header_n >> header_m) || header_n == 0)
                    throw GraphParseError(lineno, "malformed header, expected 'p <n> <m>'");
                have_header = true;
            } else {
                std::uint64_t u, v;
                double w;
                std::istringstream es(line);
                if (!(es >> u >> v >> w))
                    throw GraphParseError(lineno, "malformed edge line, expected '<u> <v> <w>'");
                std::string extra;
                if (es >> extra)
                    throw GraphParseError(lineno, "trailing tokens on edge line");
                if (u == v) throw GraphParseError(lineno, "self-loop");
                if (!(w > 0.0) || !std::isfinite(w))
                    throw GraphParseError(lineno, "nonpositive or non-finite weight");
                if (have_header && std::max(u, v) >= header_n)
                    throw GraphParseError(lineno, "edge endpoint exceeds declared vertex count");
                max_index = std::max(max_index, std::max(u, v));
                if (max_index >= (std::uint64_t(1) << 32))
                    throw GraphParseError(lineno, "vertex index too large");
                std::uint64_t key = (std::min(u, v) << 32) | std::max(u, v);
                for (const Edge& e : edges)
                    if (((std::uint64_t(e.u) << 32) | e.v) == key)
                        throw GraphParseError(lineno, "duplicate edge");
                edges.push_back({std::uint32_t(std::min(u, v)), std::uint32_t(std::max(u, v)), w});
            }
        }
        std::uint64_t n = have_header ? header_n : (edges.empty() ? 1 : max_index + 1);
        if (have_header && edges.size() != header_m)
            throw GraphParseError(lineno, "edge count does not match header");
        return WeightedGraph(std::uint32_t(n), std::move(edges));
    }

    static WeightedGraph parse(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    /// Canonical rendering: header, then edges as stored. parse(serialize(g))
    /// reproduces g bit-exactly (weights go through shortest round-trip
    /// formatting).
    std::string serialize() const {
        std::ostringstream out;
        out << "p " << n_ << ' ' << edges_.size() << '\n';
        out.precision(17);
        for (const Edge& e : edges_) {
            double w = e.w;
            // prefer the shortest representation that round-trips
            for (int prec = 1; prec <= 17; ++prec) {
                std::ostringstream t;
                t.precision(prec);
                t << w;
                if (std::stod(t.str()) == w) {
                    out << e.u << ' ' << e.v << ' ' << t.str() << '\n';
                    break;
                }
            }
        }
        return out.str();
    }

  private:
    std::uint32_t n_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::uint32_t>> adj_;
};

}  // namespace qmc
