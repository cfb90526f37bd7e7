#include <catch2/catch_amalgamated.hpp>

#include "netalign/scoring.hpp"
#include "netalign/similarity.hpp"
#include "support/helpers.hpp"

using namespace netalign;
using Catch::Approx;

TEST_CASE("single isolated node has importance zero", "[scoring]") {
    auto g = testsupport::make_network("g", 1, {});
    auto s = topology_scores(g);
    REQUIRE(s.size() == 1);
    REQUIRE(s[0] == 0.0);
}

TEST_CASE("star center outranks the leaves", "[scoring]") {
    // K_{1,5}: the elimination ends with the center holding the accumulated
    // leaf weight plus all five unit edges
    std::vector<std::pair<int, int>> edges;
    for (int leaf = 1; leaf <= 5; ++leaf) edges.push_back({0, leaf});
    auto g = testsupport::make_network("g", 6, edges);
    auto s = topology_scores(g, 10);
    for (int leaf = 1; leaf <= 5; ++leaf) REQUIRE(s[0] > s[leaf]);
    // hand-run of the elimination: leaves 1..4 push weight 1 each onto the
    // center, the center (now degree 1) pushes 4+1 onto leaf 5
    REQUIRE(s[0] == Approx(4.0 + 5.0));
    REQUIRE(s[5] == Approx(5.0 + 1.0));
    for (int leaf = 1; leaf <= 4; ++leaf) REQUIRE(s[leaf] == Approx(1.0));
}

TEST_CASE("isomorphic networks get identical importance vectors", "[scoring]") {
    std::vector<std::pair<int, int>> edges{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}};
    auto g1 = testsupport::make_network("g1", 4, edges);
    auto g2 = testsupport::make_network("g2", 4, edges);
    REQUIRE(topology_scores(g1) == topology_scores(g2));
}

TEST_CASE("importance is invariant to edge input order", "[scoring]") {
    std::vector<std::pair<int, int>> edges{{0, 1}, {1, 2}, {2, 3}, {0, 3}, {1, 3}};
    auto g1 = testsupport::make_network("g", 4, edges);
    std::reverse(edges.begin(), edges.end());
    auto g2 = testsupport::make_network("g", 4, edges);
    auto s1 = topology_scores(g1);
    auto s2 = topology_scores(g2);
    for (std::size_t i = 0; i < s1.size(); ++i) REQUIRE(s1[i] == Approx(s2[i]).margin(1e-12));
}

TEST_CASE("degree threshold zero is rejected", "[scoring]") {
    auto g = testsupport::make_network("g", 2, {{0, 1}});
    REQUIRE_THROWS(topology_scores(g, 0));
}

TEST_CASE("topology similarity hits the stated corners", "[scoring]") {
    ImportanceVector sa{3.0}, sb{3.0};
    auto t = topology_similarity(sa, sb);
    REQUIRE(t(0, 0) == 1.0);  // both at the global max

    ImportanceVector sc{0.0}, sd{5.0};
    REQUIRE(topology_similarity(sc, sd)(0, 0) == 0.0);

    auto z = topology_similarity(ImportanceVector{0.0}, ImportanceVector{0.0});
    REQUIRE(z(0, 0) == 0.0);  // all-zero importance
}

TEST_CASE("topology similarity on (1,2) x (2,4)", "[scoring]") {
    // global max 4: T = [min(s_a,s_b)/4]
    auto t = topology_similarity(ImportanceVector{1.0, 2.0}, ImportanceVector{2.0, 4.0});
    REQUIRE(t(0, 0) == Approx(0.25));
    REQUIRE(t(0, 1) == Approx(0.25));
    REQUIRE(t(1, 0) == Approx(0.5));
    REQUIRE(t(1, 1) == Approx(0.5));
}

static NetworkFamily two_singletons() {
    return NetworkFamily(
        {testsupport::make_network("a", 1, {}), testsupport::make_network("b", 1, {})});
}

TEST_CASE("node score blends normalized similarity and topology", "[scoring]") {
    auto family = two_singletons();
    SimilarityTable sim(family);
    sim.add(family, 0, 1, 0, 0, 123.0);  // pair max, so normalized 1.0

    // lambda1 = 0.3 with T = 0 (both importances are 0): 0.7 * 1.0
    auto scores = build_score_matrices(family, sim, 0.3);
    REQUIRE(scores.pair(family, 0, 1)(0, 0) == Approx(0.7));

    // degenerate weights
    REQUIRE(build_score_matrices(family, sim, 0.0).pair(family, 0, 1)(0, 0) == Approx(1.0));
    REQUIRE(build_score_matrices(family, sim, 1.0).pair(family, 0, 1)(0, 0) == Approx(0.0));
}

TEST_CASE("direct blend arithmetic: 0.7*1.0 + 0.3*0.5 = 0.85", "[scoring]") {
    // topology scores: two 2-paths; midpoints... construct so T(u,v)=0.5 is hit:
    // simplest is to check the formula through topology_similarity directly
    auto t = topology_similarity(ImportanceVector{1.0, 2.0}, ImportanceVector{1.0, 2.0});
    REQUIRE(t(0, 0) == Approx(0.5));
    double node_score = (1 - 0.3) * 1.0 + 0.3 * t(0, 0);
    REQUIRE(node_score == Approx(0.85));
}

TEST_CASE("lambda1 outside [0,1] is rejected", "[scoring]") {
    auto family = two_singletons();
    SimilarityTable sim(family);
    REQUIRE_THROWS(build_score_matrices(family, sim, -0.1));
    REQUIRE_THROWS(build_score_matrices(family, sim, 1.1));
}

TEST_CASE("all node scores lie in [0,1] on random inputs", "[scoring]") {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        auto g1 = testsupport::random_network("a", 3 + rng.uniform_int(6), 0.4, rng);
        auto g2 = testsupport::random_network("b", 3 + rng.uniform_int(6), 0.4, rng);
        NetworkFamily family({g1, g2});
        SimilarityTable sim(family);
        for (int u = 0; u < g1.node_count(); ++u)
            for (int v = 0; v < g2.node_count(); ++v)
                if (rng.bernoulli(0.5)) sim.add(family, 0, 1, u, v, rng.uniform() * 100.0);
        auto scores = build_score_matrices(family, sim, rng.uniform());
        const auto& c = scores.pair(family, 0, 1);
        REQUIRE(c.minCoeff() >= 0.0);
        REQUIRE(c.maxCoeff() <= 1.0 + 1e-12);
    }
}

TEST_CASE("relabeling nodes permutes score matrices consistently", "[scoring]") {
    // Equal-minimum-degree ties are broken by node index, so exact
    // equivariance needs an instance whose elimination is tie-robust; this
    // graph was checked to be one. The similarity part is tested on fully
    // random graphs below.
    Rng rng(13);
    auto g2 = testsupport::random_network("b", 5, 0.5, rng);
    std::vector<std::pair<int, int>> edges{{0, 5}, {1, 2}, {1, 3}, {1, 4}, {1, 5}, {3, 5}, {4, 5}};
    auto g1 = testsupport::make_network("a", 6, edges);

    // permuted copy of g1: node k -> perm[k]
    std::vector<int> perm{2, 0, 4, 1, 3, 5};
    Network g1p("a");
    for (int i = 0; i < 6; ++i) g1p.add_node("a_" + std::to_string(i));
    for (auto [u, v] : edges) g1p.add_edge(perm[u], perm[v]);

    NetworkFamily f1({g1, g2});
    NetworkFamily f2({g1p, g2});
    SimilarityTable s1(f1), s2(f2);
    for (int u = 0; u < 6; ++u)
        for (int v = 0; v < 5; ++v) {
            double score = rng.uniform() * 10;
            s1.add(f1, 0, 1, u, v, score);
            s2.add(f2, 0, 1, perm[u], v, score);
        }
    auto c1 = build_score_matrices(f1, s1, 0.3).pair(f1, 0, 1);
    auto c2 = build_score_matrices(f2, s2, 0.3).pair(f2, 0, 1);
    for (int u = 0; u < 6; ++u)
        for (int v = 0; v < 5; ++v) REQUIRE(c1(u, v) == Approx(c2(perm[u], v)).margin(1e-12));
}

TEST_CASE("similarity part of the score is equivariant on any graph", "[scoring]") {
    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        int n1 = 4 + rng.uniform_int(3);
        auto g1 = testsupport::random_network("a", n1, 0.5, rng);
        auto g2 = testsupport::random_network("b", 4, 0.5, rng);
        std::vector<int> perm(n1);
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = n1 - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
        Network g1p("a");
        for (int i = 0; i < n1; ++i) g1p.add_node("a_" + std::to_string(i));
        for (auto [u, v] : g1.edges()) g1p.add_edge(perm[u], perm[v]);

        NetworkFamily f1({g1, g2});
        NetworkFamily f2({g1p, g2});
        SimilarityTable s1(f1), s2(f2);
        for (int u = 0; u < n1; ++u)
            for (int v = 0; v < 4; ++v) {
                double score = rng.uniform() * 10;
                s1.add(f1, 0, 1, u, v, score);
                s2.add(f2, 0, 1, perm[u], v, score);
            }
        // lambda1 = 0 isolates the normalized-similarity term
        auto c1 = build_score_matrices(f1, s1, 0.0).pair(f1, 0, 1);
        auto c2 = build_score_matrices(f2, s2, 0.0).pair(f2, 0, 1);
        for (int u = 0; u < n1; ++u)
            for (int v = 0; v < 4; ++v) REQUIRE(c1(u, v) == Approx(c2(perm[u], v)).margin(1e-12));
    }
}
