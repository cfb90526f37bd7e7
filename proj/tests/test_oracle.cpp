#include <catch2/catch_amalgamated.hpp>

#include "netalign/oracle.hpp"
#include "netalign/solver.hpp"
#include "support/helpers.hpp"

using namespace netalign;
using Catch::Approx;
using Eigen::MatrixXd;

TEST_CASE("two singleton networks: align when the score pays", "[oracle]") {
    auto g1 = testsupport::make_network("n1", 1, {});
    auto g2 = testsupport::make_network("n2", 1, {});
    NetworkFamily family({g1, g2});
    ScoreMatrices scores;
    scores.C = {MatrixXd::Constant(1, 1, 0.7)};
    auto result = exact_align(family, scores, ObjectiveSpec(0.0));
    REQUIRE(result.enumerated == 2);  // aligned or not
    REQUIRE(result.objective == Approx(0.7));
    REQUIRE(result.best.cluster_count() == 1);
}

TEST_CASE("zero scores tie-break to the empty alignment", "[oracle]") {
    auto g1 = testsupport::make_network("n1", 1, {});
    auto g2 = testsupport::make_network("n2", 1, {});
    NetworkFamily family({g1, g2});
    ScoreMatrices scores;
    scores.C = {MatrixXd::Zero(1, 1)};
    auto result = exact_align(family, scores, ObjectiveSpec(0.0));
    REQUIRE(result.objective == 0.0);
    REQUIRE(result.best.cluster_count() == 0);
}

TEST_CASE("identity-dominant paths align identically", "[oracle]") {
    auto g1 = testsupport::make_network("n1", 3, {{0, 1}, {1, 2}});
    auto g2 = testsupport::make_network("n2", 3, {{0, 1}, {1, 2}});
    NetworkFamily family({g1, g2});
    ScoreMatrices scores;
    scores.C = {0.9 * MatrixXd::Identity(3, 3)};
    auto result = exact_align(family, scores, ObjectiveSpec(0.02));
    REQUIRE(result.best.cluster_count() == 3);
    for (const auto& cluster : result.best.clusters) {
        REQUIRE(cluster.size() == 2);
        REQUIRE(cluster[0].node == cluster[1].node);
    }
    // 0.98 * 3 * 0.9 + 0.02 * 2 conserved edges
    REQUIRE(result.objective == Approx(0.98 * 2.7 + 0.02 * 2.0));
}

TEST_CASE("oracle output always verifies", "[oracle]") {
    Rng rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        auto g1 = testsupport::random_network("n1", 3 + rng.uniform_int(2), 0.5, rng);
        auto g2 = testsupport::random_network("n2", 3 + rng.uniform_int(2), 0.5, rng);
        NetworkFamily family({g1, g2});
        auto scores = testsupport::random_scores(family, rng);
        auto result = exact_align(family, scores, ObjectiveSpec(0.02));
        REQUIRE(verify_consistency(result.best, family).ok);
        REQUIRE(result.objective ==
                Approx(alignment_objective(result.best, family, scores, ObjectiveSpec(0.02)))
                    .margin(1e-9));
    }
}

TEST_CASE("oracle dominates the rounded solver result", "[oracle]") {
    Rng rng(67);
    for (int trial = 0; trial < 6; ++trial) {
        auto g1 = testsupport::random_network("n1", 3 + rng.uniform_int(2), 0.5, rng);
        auto g2 = testsupport::random_network("n2", 3 + rng.uniform_int(2), 0.5, rng);
        NetworkFamily family({g1, g2});
        auto scores = testsupport::random_scores(family, rng);
        ObjectiveSpec spec(0.02);
        auto exact = exact_align(family, scores, spec);
        auto solved = solve(family, scores, spec, SolverConfig{});
        auto rounded = round_alignment(solved.x_blocks, family, {0.05});
        double rounded_obj = alignment_objective(rounded, family, scores, spec);
        REQUIRE(rounded_obj <= exact.objective + 1e-9);
    }
}

TEST_CASE("three networks also enumerate exactly", "[oracle]") {
    auto g1 = testsupport::make_network("n1", 2, {{0, 1}});
    auto g2 = testsupport::make_network("n2", 2, {{0, 1}});
    auto g3 = testsupport::make_network("n3", 2, {{0, 1}});
    NetworkFamily family({g1, g2, g3});
    ScoreMatrices scores;
    scores.C = {MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2)};
    auto result = exact_align(family, scores, ObjectiveSpec(0.02));
    // identity triple clusters: node score 3 pairs/cluster... per cluster the
    // three cross pairs contribute 1 each across the three network pairs
    REQUIRE(result.best.cluster_count() == 2);
    for (const auto& cluster : result.best.clusters) REQUIRE(cluster.size() == 3);
    // f_node = 2 clusters * 3 pairs * 1.0; f_int = 3 network pairs conserved
    REQUIRE(result.objective == Approx(0.98 * 6.0 + 0.02 * 3.0));
}

TEST_CASE("the state-space guard rejects oversized instances", "[oracle]") {
    auto g1 = testsupport::make_network("n1", 6, {});
    auto g2 = testsupport::make_network("n2", 6, {});
    NetworkFamily family({g1, g2});
    ScoreMatrices scores;
    scores.C = {MatrixXd::Zero(6, 6)};
    OracleLimits limits;
    limits.max_states = 1000;  // 7^6 = 117649 exceeds this
    REQUIRE_THROWS_WITH(exact_align(family, scores, ObjectiveSpec(0.0), limits),
                        Catch::Matchers::ContainsSubstring("smaller instance"));
}
