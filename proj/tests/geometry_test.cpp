#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "p3net/geometry.hpp"
#include "p3net/quantum.hpp"

using namespace p3net;

namespace {

// Reference visibility on table rows: same A response or same C response.
bool sees(int i, int j) { return i != j && (i / 16 == j / 16 || i % 4 == j % 4); }

// Floyd-Warshall on the reference adjacency.
std::vector<std::vector<int>> reference_distances(int n, bool (*adj)(int, int)) {
    const int inf = 1 << 20;
    std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
    for (int i = 0; i < n; ++i) {
        d[i][i] = 0;
        for (int j = 0; j < n; ++j) {
            if (adj(i, j)) d[i][j] = 1;
        }
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

bool sees_reduced(int i, int j) { return i != j && (i / 4 == j / 4 || i % 4 == j % 4); }

} // namespace

TEST(Visibility, ClassificationCounts) {
    for (const auto& s : enumerate_strategies()) {
        EXPECT_EQ(classify_from(s), (StatusCounts{1, 27, 36}));
    }
}

TEST(Visibility, SymmetricAndMatchesReference) {
    for (int i = 0; i < 64; ++i) {
        for (int j = 0; j < 64; ++j) {
            const auto a = DeterministicStrategy::from_table_index(i);
            const auto b = DeterministicStrategy::from_table_index(j);
            const auto st = visibility_test(a, b);
            EXPECT_EQ(st, visibility_test(b, a));
            if (i == j) {
                EXPECT_EQ(st, VisibilityStatus::Coincident);
            } else {
                EXPECT_EQ(st == VisibilityStatus::Visible, sees(i, j));
            }
        }
    }
}

TEST(Graph, DegreesAndEdges) {
    const auto full = build_visibility_graph(Representation::Full26);
    EXPECT_EQ(full.node_count(), 64);
    EXPECT_EQ(full.edge_count(), 864u);
    for (int i = 0; i < 64; ++i) EXPECT_EQ(full.degree(i), 27);
    const auto red = build_visibility_graph(Representation::Reduced8);
    EXPECT_EQ(red.edge_count(), 48u);
    for (int i = 0; i < 16; ++i) {
        EXPECT_EQ(red.degree(i), 6);
        for (int j = 0; j < 16; ++j) EXPECT_EQ(red.adjacent(i, j), sees_reduced(i, j));
    }
}

TEST(Graph, RejectsBadNodes) {
    VisibilityGraph g(Representation::Reduced8, 4);
    EXPECT_THROW(g.add_edge(0, 4), Error);
    EXPECT_THROW(g.add_edge(1, 1), Error);
    EXPECT_THROW(VisibilityGraph(Representation::Full26, 65), Error);
}

TEST(Apsp, MatchesFloydWarshall) {
    const auto sp = all_pairs_shortest_paths(build_visibility_graph(Representation::Full26));
    const auto ref = reference_distances(64, sees);
    EXPECT_EQ(sp.hops, ref);
    EXPECT_EQ(sp.max_distance, 2);
    const auto spr = all_pairs_shortest_paths(build_visibility_graph(Representation::Reduced8));
    EXPECT_EQ(spr.hops, reference_distances(16, sees_reduced));
    EXPECT_EQ(spr.max_distance, 2);
}

TEST(Apsp, DisconnectedGraphThrows) {
    VisibilityGraph g(Representation::Reduced8, 3);
    g.add_edge(0, 1);
    EXPECT_THROW(all_pairs_shortest_paths(g), Error);
}

TEST(Generators, MinimumIsFour) {
    for (auto rep : {Representation::Full26, Representation::Reduced8}) {
        const auto g = build_visibility_graph(rep);
        const auto gens = minimum_generators(g);
        EXPECT_EQ(gens.members.size(), 4u);
        EXPECT_TRUE(gens.complete);
        EXPECT_EQ(gens.covered.size(), static_cast<std::size_t>(g.node_count()));
    }
}

// Plain triple loop, no bit masks.
TEST(Generators, NoThreeNodeCover) {
    int covers = 0;
    for (int a = 0; a < 64; ++a)
        for (int b = a + 1; b < 64; ++b)
            for (int c = b + 1; c < 64; ++c) {
                bool all = true;
                for (int v = 0; v < 64 && all; ++v) {
                    all = v == a || v == b || v == c || sees(v, a) || sees(v, b) || sees(v, c);
                }
                covers += all;
            }
    EXPECT_EQ(covers, 0);
    EXPECT_EQ(count_dominating_sets(build_visibility_graph(Representation::Full26), 3), 0u);
    EXPECT_EQ(count_dominating_sets(build_visibility_graph(Representation::Reduced8), 3), 0u);
    EXPECT_FALSE(find_dominating_set(build_visibility_graph(Representation::Reduced8), 3).has_value());
    EXPECT_TRUE(find_dominating_set(build_visibility_graph(Representation::Reduced8), 4).has_value());
}

TEST(Generators, Constructions) {
    const auto full = build_visibility_graph(Representation::Full26);
    const auto d = verify_generator_set(full, diagonal_construction(Representation::Full26));
    EXPECT_EQ(d.newly_covered, (std::vector<int>{28, 20, 12, 4}));
    EXPECT_EQ(d.running_total.back(), 64);
    EXPECT_TRUE(d.complete);
    const auto r = verify_generator_set(full, same_row_construction(Representation::Full26));
    EXPECT_EQ(r.newly_covered, (std::vector<int>{28, 12, 12, 12}));
    EXPECT_TRUE(r.complete);

    const auto red = build_visibility_graph(Representation::Reduced8);
    const auto dr = verify_generator_set(red, diagonal_construction(Representation::Reduced8));
    EXPECT_EQ(dr.newly_covered, (std::vector<int>{7, 5, 3, 1}));
    EXPECT_EQ(dr.running_total.back(), 16);
    const auto rr = verify_generator_set(red, same_row_construction(Representation::Reduced8));
    EXPECT_EQ(rr.newly_covered, (std::vector<int>{7, 3, 3, 3}));
    EXPECT_TRUE(rr.complete);

    const std::vector<int> partial{0, 1};
    EXPECT_FALSE(verify_generator_set(red, partial).complete);
    EXPECT_THROW(verify_generator_set(red, std::vector<int>{}), Error);
}

TEST(Clusters, MaximalCliques) {
    const auto g = build_visibility_graph(Representation::Full26);
    const auto cliques = maximal_convex_clusters(g);
    ASSERT_EQ(cliques.size(), 8u);
    std::set<std::vector<int>> uniq(cliques.begin(), cliques.end());
    EXPECT_EQ(uniq.size(), 8u);
    for (const auto& c : cliques) {
        EXPECT_EQ(c.size(), 16u);
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = i + 1; j < c.size(); ++j) EXPECT_TRUE(sees(c[i], c[j]));
        for (int v = 0; v < 64; ++v) {
            if (std::find(c.begin(), c.end(), v) != c.end()) continue;
            EXPECT_FALSE(std::all_of(c.begin(), c.end(), [&](int u) { return sees(u, v); }));
        }
    }
    const auto rc = maximal_convex_clusters(build_visibility_graph(Representation::Reduced8));
    ASSERT_EQ(rc.size(), 8u);
    for (const auto& c : rc) EXPECT_EQ(c.size(), 4u);
}

// The midpoint of two vertices sharing the A response is produced by a
// hidden-variable model that mixes only the B-C source.
TEST(Segment, VisibleMidpointIsLocal) {
    const auto s1 = DeterministicStrategy::from_classes(1, 2, 0);
    const auto s2 = DeterministicStrategy::from_classes(1, 3, 3);
    ASSERT_EQ(visibility_test(s1, s2), VisibilityStatus::Visible);
    LhvModel m;
    m.weights_lambda = {1.0};
    m.weights_lambda_prime = {0.5, 0.5};
    m.response_a = {LhvModel::deterministic_table(s1.alpha)};
    m.response_b = {{LhvModel::deterministic_table(s1.beta), LhvModel::deterministic_table(s2.beta)}};
    m.response_c = {LhvModel::deterministic_table(s1.gamma), LhvModel::deterministic_table(s2.gamma)};
    const auto mixed = collapse(lhv_evaluate(m));
    const auto mid = segment(BehaviourPoint::from_vertex(vertex_from_strategy(s1)),
                             BehaviourPoint::from_vertex(vertex_from_strategy(s2)), 0.5);
    EXPECT_TRUE(approx_equal(mixed, mid, 1e-12));
}

TEST(Segment, Errors) {
    const auto p = BehaviourPoint::from_vertex(enumerate_reduced()[0]);
    const auto q = BehaviourPoint::from_vertex(enumerate_full()[0]);
    EXPECT_THROW(segment(p, p, 1.5), Error);
    EXPECT_THROW(segment(p, q, 0.5), Error);
    EXPECT_TRUE(approx_equal(segment(p, p, 0.3), p));
}
