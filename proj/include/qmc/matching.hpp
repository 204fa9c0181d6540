#pragma once

// Maximum weight matching via the primal-dual blossom algorithm, plus the
// fractional-matching LP machinery: feasibility checking against vertex and
// odd-set constraints, the 4/5 scaling step, and the bridge from SDP edge
// values to a fractional matching.
//
// The blossom search keeps explicit vertex duals y and blossom duals z. All
// exposed vertices start at half the maximum edge weight and decrease in
// lockstep; the algorithm stops when they reach zero, at which point
// (y, z) certify optimality: every edge has nonnegative reduced weight and
// the dual objective equals the matching weight.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmc/graph.hpp"
#include "qmc/oracle.hpp"
#include "qmc/sdp.hpp"
#include "qmc/states.hpp"

namespace qmc {

class AuditError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Optimality certificate: vertex duals plus the surviving blossoms.
struct MatchingDuals {
    std::vector<double> y;
    std::vector<std::pair<std::vector<std::uint32_t>, double>> blossoms;  // (vertex set, z)
};

namespace detail {

class BlossomSolver {
  public:
    explicit BlossomSolver(const WeightedGraph& g) : g_(g), n_(int(g.vertex_count())) {
        cap_ = 2 * n_ + 1;
        parent_.assign(cap_, -1);
        dual_.assign(cap_, 0.0);
        match_.assign(n_, -1);
        label_.assign(cap_, kFree);
        tree_edge_.assign(cap_, {-1, -1});
        cyc_.resize(cap_);
        cyc_edge_.resize(cap_);
        active_.assign(cap_, false);
        for (int v = 0; v < n_; ++v) active_[v] = true;
        for (int b = cap_ - 1; b >= n_; --b) free_ids_.push_back(b);
        double wmax = 0.0;
        for (const Edge& e : g.edges()) wmax = std::max(wmax, e.w);
        eps_ = 1e-12 * std::max(1.0, wmax);
        for (int v = 0; v < n_; ++v) dual_[v] = wmax / 2.0;
    }

    void run() {
        if (g_.edge_count() == 0) return;
        for (int phase = 0; phase <= 2 * n_ + 2; ++phase) {
            clear_labels();
            double min_root_dual = std::numeric_limits<double>::infinity();
            bool any_root = false;
            for (int t : top_nodes()) {
                if (match_[base(t)] < 0) {
                    any_root = true;
                    min_root_dual = std::min(min_root_dual, dual_[base(t)]);
                }
            }
            if (!any_root || min_root_dual <= eps_) return;
            for (int t : top_nodes())
                if (match_[base(t)] < 0) label_[t] = kEven;
            PhaseResult r = run_phase();
            dissolve_loose_blossoms();
            if (r == PhaseResult::kExhausted) return;
        }
        throw std::logic_error("blossom: phase bound exceeded");
    }

    std::vector<int> matches() const {
        return std::vector<int>(match_.begin(), match_.end());
    }

    MatchingDuals duals() const {
        MatchingDuals d;
        d.y.assign(dual_.begin(), dual_.begin() + n_);
        for (int b = n_; b < cap_; ++b) {
            if (!active_[b] || dual_[b] <= eps_) continue;
            std::vector<std::uint32_t> verts;
            collect_vertices(b, verts);
            std::sort(verts.begin(), verts.end());
            d.blossoms.push_back({std::move(verts), dual_[b]});
        }
        return d;
    }

  private:
    enum Label { kFree = -1, kEven = 0, kOdd = 1 };
    enum class PhaseResult { kAugmented, kExhausted };
    using VertexPair = std::pair<int, int>;

    const WeightedGraph& g_;
    int n_, cap_;
    double eps_;
    std::vector<int> parent_;                 // immediate containing blossom, -1 at top
    std::vector<double> dual_;                // y for vertices, z for blossoms
    std::vector<int> match_;                  // per vertex, matched partner vertex
    std::vector<int> label_;                  // valid on top-level nodes during a phase
    std::vector<VertexPair> tree_edge_;       // (vertex in parent node, vertex here)
    std::vector<std::vector<int>> cyc_;       // blossom children, base child first
    std::vector<std::vector<VertexPair>> cyc_edge_;  // edge k joins child k to k+1
    std::vector<bool> active_;
    std::vector<int> free_ids_;

    int top(int x) const {
        while (parent_[x] >= 0) x = parent_[x];
        return x;
    }

    int base(int x) const {
        while (x >= n_) x = cyc_[x][0];
        return x;
    }

    std::vector<int> top_nodes() const {
        std::vector<int> out;
        for (int x = 0; x < cap_; ++x)
            if (active_[x] && parent_[x] < 0) out.push_back(x);
        return out;
    }

    void collect_vertices(int x, std::vector<std::uint32_t>& out) const {
        if (x < n_) {
            out.push_back(std::uint32_t(x));
            return;
        }
        for (int c : cyc_[x]) collect_vertices(c, out);
    }

    void clear_labels() {
        std::fill(label_.begin(), label_.end(), int(kFree));
        std::fill(tree_edge_.begin(), tree_edge_.end(), VertexPair{-1, -1});
    }

    bool has_tree_edge(int x) const { return tree_edge_[x].second >= 0; }

    int find_root(int t) const {
        while (has_tree_edge(t)) t = top(tree_edge_[t].first);
        return t;
    }

    double reduced_weight(int u, int v, double w) const {
        return dual_[u] + dual_[v] - w;
    }

    int child_containing(int b, int v) const {
        int c = v;
        while (parent_[c] != b) c = parent_[c];
        return c;
    }

    /// Rearranges the interior of node x so vertex v becomes its base.
    /// Children re-pair along the even side of the cycle; the invariant that
    /// children (1,2), (3,4), ... are matched through their joining edges is
    /// restored relative to the rotated order.
    void reroot(int x, int v) {
        if (x < n_) return;
        const int i = child_containing(x, v);
        int pos = 0;
        while (cyc_[x][pos] != i) ++pos;
        std::rotate(cyc_[x].begin(), cyc_[x].begin() + pos, cyc_[x].end());
        std::rotate(cyc_edge_[x].begin(), cyc_edge_[x].begin() + pos, cyc_edge_[x].end());
        const int len = int(cyc_[x].size());
        for (int k = 1; k + 1 < len; k += 2) {
            auto [p, q] = cyc_edge_[x][k];
            reroot(cyc_[x][k], p);
            reroot(cyc_[x][k + 1], q);
            match_[p] = q;
            match_[q] = p;
        }
        reroot(cyc_[x][0], v);
    }

    /// Flips matched edges along the alternating tree path from vertex u's
    /// top node to its root; afterwards u is the base of its node and free
    /// to take an external partner.
    void augment_up(int u) {
        int cur = top(u);
        reroot(cur, u);
        while (has_tree_edge(cur)) {
            const auto [a, b] = tree_edge_[cur];  // matched edge up to the odd node
            (void)b;
            const int odd = top(a);
            const auto [a2, b2] = tree_edge_[odd];  // unmatched edge up to even node
            reroot(odd, b2);
            const int up = top(a2);
            reroot(up, a2);
            match_[b2] = a2;
            match_[a2] = b2;
            cur = up;
        }
    }

    void augment(int u, int v) {
        augment_up(u);
        augment_up(v);
        match_[u] = v;
        match_[v] = u;
    }

    /// Contracts the odd cycle closed by the tight edge (u, v) whose top
    /// nodes share a root. The least common ancestor becomes the base child.
    void form_blossom(int u, int v) {
        std::vector<char> on_path(cap_, 0);
        for (int t = top(u);; t = top(tree_edge_[t].first)) {
            on_path[t] = 1;
            if (!has_tree_edge(t)) break;
        }
        int lca = top(v);
        while (!on_path[lca]) lca = top(tree_edge_[lca].first);

        std::vector<int> children{lca};
        std::vector<VertexPair> edges;
        // side from lca down to top(u)
        {
            std::vector<int> side;
            std::vector<VertexPair> side_edges;
            for (int t = top(u); t != lca; t = top(tree_edge_[t].first)) {
                side.push_back(t);
                side_edges.push_back(tree_edge_[t]);  // (vertex above, vertex in t)
            }
            for (int k = int(side.size()) - 1; k >= 0; --k) {
                edges.push_back(side_edges[k]);
                children.push_back(side[k]);
            }
        }
        edges.push_back({u, v});
        // side from top(v) up to lca
        for (int t = top(v); t != lca; t = top(tree_edge_[t].first)) {
            children.push_back(t);
            auto [p, q] = tree_edge_[t];
            edges.push_back({q, p});  // oriented child -> parent direction
        }

        if (free_ids_.empty()) throw std::logic_error("blossom: node pool exhausted");
        const int b = free_ids_.back();
        free_ids_.pop_back();
        active_[b] = true;
        dual_[b] = 0.0;
        cyc_[b] = children;
        cyc_edge_[b] = edges;
        for (int c : children) parent_[c] = b;
        label_[b] = kEven;
        tree_edge_[b] = tree_edge_[lca];
    }

    /// Expands an odd top-level blossom whose dual reached zero. Children on
    /// the alternating path from the tree edge's entry child to the base
    /// child inherit tree labels; the remaining children drop out as free
    /// matched pairs.
    void expand_odd(int b) {
        const auto entry = tree_edge_[b];
        const int entry_child = child_containing(b, entry.second);
        const auto children = cyc_[b];
        const auto edges = cyc_edge_[b];
        const int len = int(children.size());
        int i = 0;
        while (children[i] != entry_child) ++i;

        for (int c : children) parent_[c] = -1;
        for (int c : children) {
            label_[c] = kFree;
            tree_edge_[c] = {-1, -1};
        }

        std::vector<int> path;
        std::vector<VertexPair> path_edges;  // oriented (prev-side vertex, this-side vertex)
        if (i % 2 == 1) {
            for (int k = i; k < len; ++k) path.push_back(children[k]);
            path.push_back(children[0]);
            for (int k = i; k < len; ++k) path_edges.push_back(edges[k]);
        } else {
            for (int k = i; k >= 0; --k) path.push_back(children[k]);
            for (int k = i - 1; k >= 0; --k)
                path_edges.push_back({edges[k].second, edges[k].first});
        }
        label_[path[0]] = kOdd;
        tree_edge_[path[0]] = entry;
        for (std::size_t k = 1; k < path.size(); ++k) {
            label_[path[k]] = (k % 2 == 1) ? kEven : kOdd;
            tree_edge_[path[k]] = path_edges[k - 1];
        }

        active_[b] = false;
        dual_[b] = 0.0;
        label_[b] = kFree;
        tree_edge_[b] = {-1, -1};
        free_ids_.push_back(b);
    }

    /// Removes top-level blossoms whose dual is zero once the phase is over;
    /// their interior matchings are already consistent.
    void dissolve_loose_blossoms() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (int b = n_; b < cap_; ++b) {
                if (!active_[b] || parent_[b] >= 0 || dual_[b] > eps_) continue;
                for (int c : cyc_[b]) parent_[c] = -1;
                active_[b] = false;
                free_ids_.push_back(b);
                changed = true;
            }
        }
    }

    PhaseResult run_phase() {
        const long round_bound = 100 + 50L * n_ * n_;
        for (long round = 0; round < round_bound; ++round) {
            bool acted = false;
            for (const Edge& e : g_.edges()) {
                int u = int(e.u), v = int(e.v);
                int tu = top(u), tv = top(v);
                if (tu == tv) continue;
                if (label_[tu] != kEven) {
                    std::swap(u, v);
                    std::swap(tu, tv);
                }
                if (label_[tu] != kEven) continue;
                if (reduced_weight(u, v, e.w) > eps_) continue;
                if (label_[tv] == kFree) {
                    label_[tv] = kOdd;
                    tree_edge_[tv] = {u, v};
                    const int bv = base(tv);
                    const int mv = match_[bv];
                    const int tm = top(mv);
                    label_[tm] = kEven;
                    tree_edge_[tm] = {bv, mv};
                    acted = true;
                    break;
                }
                if (label_[tv] == kEven) {
                    if (find_root(tu) != find_root(tv)) {
                        augment(u, v);
                        return PhaseResult::kAugmented;
                    }
                    form_blossom(u, v);
                    acted = true;
                    break;
                }
            }
            if (acted) continue;

            // no tight action available: adjust duals
            const double inf = std::numeric_limits<double>::infinity();
            double d1 = inf, d2 = inf, d3 = inf, d4 = inf;
            for (const Edge& e : g_.edges()) {
                int u = int(e.u), v = int(e.v);
                int tu = top(u), tv = top(v);
                if (tu == tv) continue;
                if (label_[tu] != kEven) {
                    std::swap(u, v);
                    std::swap(tu, tv);
                }
                if (label_[tu] != kEven) continue;
                const double pi = reduced_weight(u, v, e.w);
                if (label_[tv] == kFree) d1 = std::min(d1, pi);
                else if (label_[tv] == kEven) d2 = std::min(d2, pi / 2.0);
            }
            for (int b = n_; b < cap_; ++b)
                if (active_[b] && parent_[b] < 0 && label_[b] == kOdd)
                    d3 = std::min(d3, dual_[b] / 2.0);
            for (int v = 0; v < n_; ++v)
                if (label_[top(v)] == kEven) d4 = std::min(d4, dual_[v]);

            const double delta = std::min(std::min(d1, d2), std::min(d3, d4));
            if (!(delta > 0) || !std::isfinite(delta))
                throw std::logic_error("blossom: nonpositive dual adjustment");
            for (int v = 0; v < n_; ++v) {
                const int l = label_[top(v)];
                if (l == kEven) dual_[v] -= delta;
                else if (l == kOdd) dual_[v] += delta;
            }
            for (int b = n_; b < cap_; ++b) {
                if (!active_[b] || parent_[b] >= 0) continue;
                if (label_[b] == kEven) dual_[b] += 2.0 * delta;
                else if (label_[b] == kOdd) dual_[b] -= 2.0 * delta;
            }
            if (delta >= d4 - eps_ * 0.5 && d4 <= std::min(std::min(d1, d2), d3))
                return PhaseResult::kExhausted;
            for (int b = n_; b < cap_; ++b)
                if (active_[b] && parent_[b] < 0 && label_[b] == kOdd && dual_[b] <= eps_)
                    expand_odd(b);
        }
        throw std::logic_error("blossom: round bound exceeded");
    }
};

inline double mwm_weight_only(const WeightedGraph& g) {
    BlossomSolver solver(g);
    solver.run();
    auto m = solver.matches();
    double w = 0.0;
    for (const Edge& e : g.edges())
        if (m[e.u] == int(e.v)) w += e.w;
    return w;
}

}  // namespace detail

/// Maximum weight matching. Among all maximum matchings, returns the one
/// whose sorted edge-index set is lexicographically smallest: after the
/// blossom pass fixes the optimal weight, edges are greedily committed in
/// index order whenever a maximum matching through the committed set exists.
/// Pass a MatchingDuals pointer to receive the optimality certificate of the
/// initial pass.
inline Matching max_weight_matching(const WeightedGraph& g, MatchingDuals* duals = nullptr) {
    detail::BlossomSolver solver(g);
    solver.run();
    if (duals) *duals = solver.duals();
    const auto m = solver.matches();
    double best = 0.0;
    for (const Edge& e : g.edges())
        if (m[e.u] == int(e.v)) best += e.w;

    const double tie_eps = 1e-9 * std::max(1.0, best);
    std::vector<char> used(g.vertex_count(), 0);
    std::vector<std::uint32_t> chosen;
    double chosen_w = 0.0;
    for (std::uint32_t k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edge(k);
        if (used[e.u] || used[e.v]) continue;
        // residual instance: drop all edges touching committed vertices or e
        std::vector<Edge> rest;
        for (std::uint32_t j = 0; j < g.edge_count(); ++j) {
            const Edge& f = g.edge(j);
            if (used[f.u] || used[f.v]) continue;
            if (f.u == e.u || f.v == e.u || f.u == e.v || f.v == e.v) continue;
            rest.push_back(f);
        }
        const double with_e =
            chosen_w + e.w +
            detail::mwm_weight_only(WeightedGraph(g.vertex_count(), std::move(rest)));
        if (with_e >= best - tie_eps) {
            chosen.push_back(k);
            chosen_w += e.w;
            used[e.u] = used[e.v] = 1;
        }
    }

    Matching out;
    out.matched_edges = std::move(chosen);
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v)
        if (!used[v]) out.unmatched_vertices.push_back(v);
    return out;
}

/// Tr(rho_2 H) in closed form: w/4 on every edge plus 3w/4 on matched edges.
inline double matching_state_energy(const Matching& m, const WeightedGraph& g) {
    std::vector<char> matched(g.edge_count(), 0);
    for (std::uint32_t k : m.matched_edges) matched.at(k) = 1;
    double s = 0.0;
    for (std::size_t k = 0; k < g.edge_count(); ++k)
        s += g.edge(k).w * (0.25 + (matched[k] ? 0.75 : 0.0));
    return s;
}

/// Nonnegative edge values; a candidate point for the matching LP.
struct FractionalMatching {
    std::vector<double> x;
};

struct LpViolation {
    enum class Kind { kNonneg, kVertex, kOddSet };
    Kind kind;
    std::uint32_t vertex = 0;             // kVertex: the vertex; kNonneg: the edge index
    std::vector<std::uint32_t> odd_set;   // kOddSet only
    double lhs = 0.0;
    double bound = 0.0;
    double slack() const { return bound - lhs; }
};

struct LpReport {
    std::vector<LpViolation> violations;
    bool feasible() const { return violations.empty(); }
};

/// Checks nonnegativity, all vertex constraints, and every odd-set
/// constraint with |S| <= max_odd_set by exhaustive subset enumeration.
inline LpReport check_lp_feasible(const FractionalMatching& fm, const WeightedGraph& g,
                                  std::uint32_t max_odd_set, double tol = 1e-9) {
    if (fm.x.size() != g.edge_count())
        throw std::invalid_argument("check_lp_feasible: edge value count mismatch");
    if (max_odd_set % 2 == 0)
        throw std::invalid_argument("check_lp_feasible: max_odd_set must be odd");
    if (max_odd_set > g.vertex_count())
        throw std::invalid_argument("check_lp_feasible: max_odd_set exceeds vertex count");
    const std::uint32_t n = g.vertex_count();
    if (n > 24) throw ResourceError("check_lp_feasible: enumeration beyond n = 24");

    LpReport report;
    for (std::uint32_t k = 0; k < fm.x.size(); ++k)
        if (fm.x[k] < -tol) {
            LpViolation v;
            v.kind = LpViolation::Kind::kNonneg;
            v.vertex = k;
            v.lhs = fm.x[k];
            v.bound = 0.0;
            report.violations.push_back(std::move(v));
        }
    for (std::uint32_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::uint32_t k : g.incident_edges(i)) s += fm.x[k];
        if (s > 1.0 + tol) {
            LpViolation v;
            v.kind = LpViolation::Kind::kVertex;
            v.vertex = i;
            v.lhs = s;
            v.bound = 1.0;
            report.violations.push_back(std::move(v));
        }
    }
    // odd sets via subset enumeration, |S| = 3, 5, ..., max_odd_set
    std::vector<std::uint32_t> set;
    auto edge_sum_in = [&](const std::vector<std::uint32_t>& s) {
        double total = 0.0;
        for (std::uint32_t k = 0; k < g.edge_count(); ++k) {
            const Edge& e = g.edge(k);
            bool iu = std::binary_search(s.begin(), s.end(), e.u);
            bool iv = std::binary_search(s.begin(), s.end(), e.v);
            if (iu && iv) total += fm.x[k];
        }
        return total;
    };
    for (std::uint32_t size = 3; size <= max_odd_set; size += 2) {
        set.assign(size, 0);
        for (std::uint32_t i = 0; i < size; ++i) set[i] = i;
        while (true) {
            const double s = edge_sum_in(set);
            const double bound = (size - 1) / 2.0;
            if (s > bound + tol) {
                LpViolation v;
                v.kind = LpViolation::Kind::kOddSet;
                v.odd_set = set;
                v.lhs = s;
                v.bound = bound;
                report.violations.push_back(std::move(v));
            }
            // next combination
            int i = int(size) - 1;
            while (i >= 0 && set[i] == n - size + i) --i;
            if (i < 0) break;
            ++set[i];
            for (std::uint32_t j = std::uint32_t(i) + 1; j < size; ++j)
                set[j] = set[j - 1] + 1;
        }
    }
    return report;
}

/// The 4/5 scaling step. Requires nonnegativity, vertex constraints, and the
/// |S| = 3 odd-set constraints; anything larger is covered by the scaling.
inline FractionalMatching scale_to_feasible(const FractionalMatching& fm,
                                            const WeightedGraph& g, double tol = 1e-9) {
    const std::uint32_t pre_set = g.vertex_count() >= 3 ? 3 : 1;
    LpReport pre = check_lp_feasible(fm, g, pre_set, tol);
    if (!pre.feasible()) {
        const LpViolation& v = pre.violations.front();
        std::string what = "scale_to_feasible: precondition violated (";
        if (v.kind == LpViolation::Kind::kNonneg)
            what += "negative value on edge " + std::to_string(v.vertex);
        else if (v.kind == LpViolation::Kind::kVertex)
            what += "vertex constraint at " + std::to_string(v.vertex);
        else
            what += "triangle odd-set constraint";
        what += ")";
        throw std::invalid_argument(what);
    }
    FractionalMatching out;
    out.x.reserve(fm.x.size());
    for (double xe : fm.x) out.x.push_back(0.8 * xe);
    return out;
}

/// x_e = 2 h+_e. Validates the star and |S| = 3 monogamy consequences on the
/// h+ values first; a failure means the SDP solution is out of tolerance.
inline FractionalMatching sdp_to_fractional(const SdpSolution& sol, const WeightedGraph& g,
                                            double tol = 1e-5) {
    const auto vals = edge_values(sol, g);
    for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
        double s = 0.0;
        for (std::uint32_t k : g.incident_edges(i)) s += 2.0 * vals[k].h_plus;
        if (s > 1.0 + tol)
            throw AuditError("sdp_to_fractional: star monogamy violated at vertex " +
                             std::to_string(i));
    }
    const std::uint32_t n = g.vertex_count();
    std::vector<double> hp_pair(std::size_t(n) * n, 0.0);
    for (std::uint32_t k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edge(k);
        hp_pair[std::size_t(e.u) * n + e.v] = vals[k].h_plus;
        hp_pair[std::size_t(e.v) * n + e.u] = vals[k].h_plus;
    }
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            for (std::uint32_t k = j + 1; k < n; ++k) {
                double s = 2.0 * (hp_pair[std::size_t(i) * n + j] +
                                  hp_pair[std::size_t(j) * n + k] +
                                  hp_pair[std::size_t(i) * n + k]);
                if (s > 1.0 + tol)
                    throw AuditError("sdp_to_fractional: triangle monogamy violated");
            }
    FractionalMatching out;
    out.x.reserve(vals.size());
    for (const EdgeValues& v : vals) out.x.push_back(2.0 * v.h_plus);
    return out;
}

}  // namespace qmc
