#pragma once

// Visibility between vertices of the non-convex local set and the graph
// analyses built on it.
//
// Two deterministic strategies see each other (the segment joining them stays
// inside the local set) iff they share A's response function or C's response
// function. The middle party's response plays no role, so after marginalizing
// B the same rule applies to the 16 reduced vertices indexed by (alpha, gamma).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "p3net/error.hpp"
#include "p3net/strategy.hpp"

namespace p3net {

enum class VisibilityStatus { Coincident, Visible, Hidden };

inline std::string to_string(VisibilityStatus s) {
    switch (s) {
    case VisibilityStatus::Coincident: return "coincident";
    case VisibilityStatus::Visible: return "visible";
    case VisibilityStatus::Hidden: return "hidden";
    }
    return "unknown";
}

inline VisibilityStatus visibility_test(const DeterministicStrategy& s1, const DeterministicStrategy& s2) {
    if (s1 == s2) return VisibilityStatus::Coincident;
    if (s1.alpha == s2.alpha || s1.gamma == s2.gamma) return VisibilityStatus::Visible;
    return VisibilityStatus::Hidden;
}

struct StatusCounts {
    int coincident = 0;
    int visible = 0;
    int hidden = 0;

    int total() const { return coincident + visible + hidden; }
    bool operator==(const StatusCounts&) const = default;
};

/// Classifies all 64 vertices as seen from `s`.
inline StatusCounts classify_from(const DeterministicStrategy& s) {
    StatusCounts counts;
    for (const auto& other : enumerate_strategies()) {
        switch (visibility_test(s, other)) {
        case VisibilityStatus::Coincident: ++counts.coincident; break;
        case VisibilityStatus::Visible: ++counts.visible; break;
        case VisibilityStatus::Hidden: ++counts.hidden; break;
        }
    }
    return counts;
}

using NodeMask = std::uint64_t;

/// Undirected simple graph on at most 64 nodes, adjacency kept as bit rows.
class VisibilityGraph {
public:
    static constexpr int kMaxNodes = 64;

    VisibilityGraph(Representation rep, int node_count) : rep_(rep), adjacency_(check_count(node_count), 0) {}

    void add_edge(int i, int j) {
        check_node(i);
        check_node(j);
        if (i == j) throw Error("self-loops are not allowed");
        adjacency_[i] |= bit(j);
        adjacency_[j] |= bit(i);
    }

    Representation representation() const { return rep_; }
    int node_count() const { return static_cast<int>(adjacency_.size()); }
    bool adjacent(int i, int j) const { return (adjacency_[i] >> j) & 1U; }
    int degree(int i) const { return std::popcount(adjacency_[i]); }
    NodeMask neighbors_mask(int i) const { return adjacency_[i]; }
    NodeMask closed_neighborhood(int i) const { return adjacency_[i] | bit(i); }

    NodeMask all_nodes_mask() const {
        return node_count() == 64 ? ~NodeMask{0} : (NodeMask{1} << node_count()) - 1;
    }

    std::vector<int> neighbors(int i) const { return mask_to_nodes(adjacency_[i]); }

    std::size_t edge_count() const {
        std::size_t twice = 0;
        for (auto row : adjacency_) twice += static_cast<std::size_t>(std::popcount(row));
        return twice / 2;
    }

    /// Edges (i, j) with i < j in lexicographic order.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        for (int i = 0; i < node_count(); ++i) {
            for (int j = i + 1; j < node_count(); ++j) {
                if (adjacent(i, j)) out.emplace_back(i, j);
            }
        }
        return out;
    }

    void check_node(int i) const {
        if (i < 0 || i >= node_count()) {
            throw Error("node index " + std::to_string(i) + " out of range [0," +
                        std::to_string(node_count()) + ")");
        }
    }

    static NodeMask bit(int i) { return NodeMask{1} << i; }

    static std::vector<int> mask_to_nodes(NodeMask m) {
        std::vector<int> out;
        while (m != 0) {
            out.push_back(std::countr_zero(m));
            m &= m - 1;
        }
        return out;
    }

private:
    static std::size_t check_count(int n) {
        if (n < 1 || n > kMaxNodes) throw Error("visibility graph supports 1..64 nodes");
        return static_cast<std::size_t>(n);
    }

    Representation rep_;
    std::vector<NodeMask> adjacency_;
};

/// (alpha, gamma) class of a node; the middle party is ignored.
inline std::pair<int, int> node_class(Representation rep, int node) {
    if (rep == Representation::Full26) {
        const auto s = DeterministicStrategy::from_table_index(node);
        return {s.alpha.index(), s.gamma.index()};
    }
    if (node < 0 || node >= 16) throw Error("reduced node index must be in 0..15");
    return {node / 4, node % 4};
}

inline VisibilityGraph build_visibility_graph(Representation rep) {
    const int n = rep == Representation::Full26 ? 64 : 16;
    VisibilityGraph g(rep, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            bool visible = false;
            if (rep == Representation::Full26) {
                visible = visibility_test(DeterministicStrategy::from_table_index(i),
                                          DeterministicStrategy::from_table_index(j)) ==
                          VisibilityStatus::Visible;
            } else {
                const auto [ai, gi] = node_class(rep, i);
                const auto [aj, gj] = node_class(rep, j);
                visible = ai == aj || gi == gj;
            }
            if (visible) g.add_edge(i, j);
        }
    }
    return g;
}

struct ShortestPaths {
    std::vector<std::vector<int>> hops;
    int max_distance = 0;
};

/// Breadth-first search from every node. Throws on a disconnected graph.
inline ShortestPaths all_pairs_shortest_paths(const VisibilityGraph& g) {
    const int n = g.node_count();
    ShortestPaths result;
    result.hops.assign(n, std::vector<int>(n, -1));
    for (int src = 0; src < n; ++src) {
        auto& dist = result.hops[src];
        dist[src] = 0;
        std::deque<int> queue{src};
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v : g.neighbors(u)) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (int dst = 0; dst < n; ++dst) {
            if (dist[dst] < 0) {
                throw Error("unreachable pair (" + std::to_string(src) + ", " + std::to_string(dst) + ")");
            }
            result.max_distance = std::max(result.max_distance, dist[dst]);
        }
    }
    return result;
}

/// A candidate generator set and the nodes it reaches (members plus neighbours).
struct GeneratorSet {
    std::vector<int> members;
    std::vector<int> covered;
    bool complete = false;
};

inline NodeMask coverage_mask(const VisibilityGraph& g, std::span<const int> members) {
    NodeMask covered = 0;
    for (int m : members) {
        g.check_node(m);
        covered |= g.closed_neighborhood(m);
    }
    return covered;
}

inline GeneratorSet make_generator_set(const VisibilityGraph& g, std::vector<int> members) {
    GeneratorSet set;
    const NodeMask covered = coverage_mask(g, members);
    set.members = std::move(members);
    set.covered = VisibilityGraph::mask_to_nodes(covered);
    set.complete = covered == g.all_nodes_mask();
    return set;
}

namespace detail {

// Visits every k-subset of `pool` in lexicographic order; stops when the
// visitor returns true.
template <typename Visitor>
bool for_each_subset(const std::vector<int>& pool, int k, Visitor&& visit) {
    const int n = static_cast<int>(pool.size());
    if (k < 0 || k > n) return false;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    std::vector<int> subset(k);
    while (true) {
        for (int i = 0; i < k; ++i) subset[i] = pool[idx[i]];
        if (visit(std::span<const int>(subset))) return true;
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return false;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

inline std::vector<int> all_nodes(const VisibilityGraph& g) {
    std::vector<int> nodes(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) nodes[i] = i;
    return nodes;
}

} // namespace detail

/// Number of k-node dominating sets, by exhaustive enumeration of all k-subsets.
inline std::size_t count_dominating_sets(const VisibilityGraph& g, int k) {
    std::size_t count = 0;
    const NodeMask all = g.all_nodes_mask();
    detail::for_each_subset(detail::all_nodes(g), k, [&](std::span<const int> s) {
        if (coverage_mask(g, s) == all) ++count;
        return false;
    });
    return count;
}

/// Lexicographically first k-node dominating set, if any.
inline std::optional<GeneratorSet> find_dominating_set(const VisibilityGraph& g, int k) {
    std::optional<GeneratorSet> found;
    const NodeMask all = g.all_nodes_mask();
    detail::for_each_subset(detail::all_nodes(g), k, [&](std::span<const int> s) {
        if (coverage_mask(g, s) != all) return false;
        found = make_generator_set(g, std::vector<int>(s.begin(), s.end()));
        return true;
    });
    return found;
}

/// Minimum dominating set ("generators").
///
/// Nodes with identical closed neighbourhoods are interchangeable in any
/// cover, so the search runs over one representative per such class (the 16
/// (alpha, gamma) classes on the full graph) for sizes k = ceil(n / (maxdeg + 1)), ...
inline GeneratorSet minimum_generators(const VisibilityGraph& g) {
    const int n = g.node_count();
    std::vector<int> representatives;
    std::vector<NodeMask> seen;
    int max_degree = 0;
    for (int i = 0; i < n; ++i) {
        max_degree = std::max(max_degree, g.degree(i));
        const NodeMask nb = g.closed_neighborhood(i);
        if (std::find(seen.begin(), seen.end(), nb) == seen.end()) {
            seen.push_back(nb);
            representatives.push_back(i);
        }
    }
    const NodeMask all = g.all_nodes_mask();
    const int lower = (n + max_degree) / (max_degree + 1);
    for (int k = std::max(lower, 1); k <= static_cast<int>(representatives.size()); ++k) {
        std::optional<GeneratorSet> found;
        detail::for_each_subset(representatives, k, [&](std::span<const int> s) {
            if (coverage_mask(g, s) != all) return false;
            found = make_generator_set(g, std::vector<int>(s.begin(), s.end()));
            return true;
        });
        if (found) return *found;
    }
    // Unreachable: the set of all representatives covers every node.
    throw Error("no generator set found");
}

/// Incremental coverage accounting for an ordered generator list.
struct CoverageReport {
    std::vector<int> members;
    std::vector<int> newly_covered;
    std::vector<int> running_total;
    bool complete = false;
};

inline CoverageReport verify_generator_set(const VisibilityGraph& g, std::span<const int> members) {
    if (members.empty()) throw Error("generator set must be nonempty");
    CoverageReport report;
    NodeMask covered = 0;
    for (int m : members) {
        g.check_node(m);
        const NodeMask next = covered | g.closed_neighborhood(m);
        report.members.push_back(m);
        report.newly_covered.push_back(std::popcount(next & ~covered));
        report.running_total.push_back(std::popcount(next));
        covered = next;
    }
    report.complete = covered == g.all_nodes_mask();
    return report;
}

/// Node index of the class representative (alpha_a, beta_b, gamma_c); b is ignored for reduced graphs.
inline int class_node(Representation rep, int a, int b, int c) {
    if (rep == Representation::Full26) return DeterministicStrategy::from_classes(a, b, c).table_index();
    if (a < 0 || a > 3 || c < 0 || c > 3) throw Error("class index must be in 0..3");
    return 4 * a + c;
}

/// Generators on the class diagonal: (alpha_i, beta_i, gamma_i), i = 0..3.
inline std::vector<int> diagonal_construction(Representation rep) {
    std::vector<int> out;
    for (int i = 0; i < 4; ++i) out.push_back(class_node(rep, i, i, i));
    return out;
}

/// Generators along one row of the class matrix: (alpha_0, beta_0, gamma_i), i = 0..3.
inline std::vector<int> same_row_construction(Representation rep) {
    std::vector<int> out;
    for (int i = 0; i < 4; ++i) out.push_back(class_node(rep, 0, 0, i));
    return out;
}

/// omega * p + (1 - omega) * q. Membership of the segment in the local set is
/// decided by visibility_test, not here.
inline BehaviourPoint segment(const BehaviourPoint& p, const BehaviourPoint& q, double omega) {
    if (!(omega >= 0.0 && omega <= 1.0)) throw Error("segment weight must lie in [0,1]");
    if (p.representation() != q.representation()) throw Error("shape mismatch between segment endpoints");
    std::vector<double> coords(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) coords[k] = omega * p[k] + (1.0 - omega) * q[k];
    return BehaviourPoint(p.representation(), std::move(coords));
}

namespace detail {

inline void bron_kerbosch(const VisibilityGraph& g, NodeMask r, NodeMask p, NodeMask x,
                          std::vector<std::vector<int>>& out) {
    if (p == 0 && x == 0) {
        out.push_back(VisibilityGraph::mask_to_nodes(r));
        return;
    }
    // Tomita pivot: the node of P | X with the most neighbours in P.
    int pivot = -1;
    int best = -1;
    for (int u : VisibilityGraph::mask_to_nodes(p | x)) {
        const int c = std::popcount(p & g.neighbors_mask(u));
        if (c > best) {
            best = c;
            pivot = u;
        }
    }
    for (int v : VisibilityGraph::mask_to_nodes(p & ~g.neighbors_mask(pivot))) {
        const NodeMask nv = g.neighbors_mask(v);
        bron_kerbosch(g, r | VisibilityGraph::bit(v), p & nv, x & nv, out);
        p &= ~VisibilityGraph::bit(v);
        x |= VisibilityGraph::bit(v);
    }
}

} // namespace detail

/// All maximal cliques: sets of mutually visible vertices, whose convex hull
/// lies inside the local set. Each clique is sorted; the list is lexicographic.
inline std::vector<std::vector<int>> maximal_convex_clusters(const VisibilityGraph& g) {
    std::vector<std::vector<int>> cliques;
    detail::bron_kerbosch(g, 0, g.all_nodes_mask(), 0, cliques);
    std::sort(cliques.begin(), cliques.end());
    return cliques;
}

} // namespace p3net
