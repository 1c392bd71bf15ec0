#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "vq/clustering.hpp"
#include "vq/core.hpp"
#include "vq/rng.hpp"
#include "vq/solvers.hpp"

using namespace vq;

namespace {

std::vector<double> random_sorted_distinct(SplitMix64& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(0.0, 100.0);
    return extract_distinct(v).values;
}

}  // namespace

TEST(Kmeans1d, WellSeparatedPairs) {
    auto a = kmeans_1d({0, 1, 10, 11}, 2, 7, 5);
    EXPECT_EQ(a.labels, (std::vector<std::size_t>{0, 0, 1, 1}));
    EXPECT_NEAR(a.centers[0], 0.5, 1e-12);
    EXPECT_NEAR(a.centers[1], 10.5, 1e-12);
    EXPECT_NEAR(a.inertia, 1.0, 1e-12);
    EXPECT_NEAR(oracle::exhaustive_kmeans_inertia({0, 1, 10, 11}, 2), 1.0, 1e-12);
}

TEST(Kmeans1d, SingleCluster) {
    auto a = kmeans_1d({2, 4, 9}, 1, 3, 2);
    EXPECT_NEAR(a.centers[0], 5.0, 1e-12);
    EXPECT_EQ(a.labels, (std::vector<std::size_t>{0, 0, 0}));
}

TEST(Kmeans1d, OneClusterPerPoint) {
    auto a = kmeans_1d({1, 5, 9, 14}, 4, 1, 3);
    EXPECT_NEAR(a.inertia, 0.0, 1e-15);
    EXPECT_EQ(a.centers, (std::vector<double>{1, 5, 9, 14}));
}

TEST(Kmeans1d, KOutOfRange) {
    EXPECT_THROW(kmeans_1d({1, 2}, 0, 0, 1), std::invalid_argument);
    EXPECT_THROW(kmeans_1d({1, 2}, 3, 0, 1), std::invalid_argument);
}

TEST(Kmeans1d, Deterministic) {
    SplitMix64 rng(400);
    auto values = random_sorted_distinct(rng, 200);
    auto a = kmeans_1d(values, 8, 12345, 10);
    auto b = kmeans_1d(values, 8, 12345, 10);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.centers, b.centers);
    EXPECT_DOUBLE_EQ(a.inertia, b.inertia);
}

TEST(Kmeans1d, ContiguousOnSortedInput) {
    SplitMix64 rng(401);
    for (int it = 0; it < 10; ++it) {
        auto values = random_sorted_distinct(rng, 50 + rng.next_index(100));
        std::size_t k = 2 + rng.next_index(10);
        auto a = kmeans_1d(values, k, it, 3);
        // Converged 1-D assignments form contiguous runs; this also checks
        // every cluster is non-empty.
        EXPECT_NO_THROW(assignment_segments(a, values));
    }
}

TEST(Kmeans1d, LloydInertiaNonIncreasing) {
    SplitMix64 rng(403);
    for (int it = 0; it < 10; ++it) {
        auto values = random_sorted_distinct(rng, 60 + rng.next_index(80));
        std::vector<double> path;
        kmeans_1d(values, 2 + rng.next_index(8), it, 1, nullptr, &path);
        ASSERT_FALSE(path.empty());
        for (std::size_t i = 1; i < path.size(); ++i)
            EXPECT_LE(path[i], path[i - 1] + 1e-9 * (1.0 + path[i - 1]));
    }
}

TEST(Kmeans1d, InertiaBoundedBelowByDp) {
    SplitMix64 rng(402);
    for (int it = 0; it < 10; ++it) {
        auto values = random_sorted_distinct(rng, 20 + rng.next_index(40));
        std::size_t k = 1 + rng.next_index(6);
        if (k > values.size()) k = values.size();
        auto a = kmeans_1d(values, k, it, 5);
        auto dp = solve_l0_dp(values, k);
        EXPECT_GE(a.inertia, dp.sse - 1e-9 * (1.0 + dp.sse));
    }
}

TEST(Kmeans1d, WellSeparatedMatchesDp) {
    // On clearly separated groups the heuristic should hit the DP optimum.
    std::vector<double> values{0, 1, 2, 50, 51, 52, 100, 101, 102};
    auto a = kmeans_1d(values, 3, 9, 10);
    auto dp = solve_l0_dp(values, 3);
    EXPECT_NEAR(a.inertia, dp.sse, 1e-9);
}

TEST(Kmeans1d, WeightedCentersAreWeightedMeans) {
    std::vector<double> values{0, 1, 10};
    std::vector<double> weights{3, 1, 1};
    auto a = kmeans_1d(values, 2, 5, 5, &weights);
    // Cluster {0, 1} with weights {3, 1} has weighted mean 0.25.
    EXPECT_NEAR(a.centers[0], 0.25, 1e-12);
    EXPECT_NEAR(a.centers[1], 10.0, 1e-12);
}

TEST(AssignmentSegments, DirectReading) {
    ClusterAssignment a;
    a.labels = {0, 0, 1, 1};
    a.centers = {1.0, 10.0};
    a.k = 2;
    EXPECT_EQ(assignment_segments(a, {1, 2, 10, 11}), (std::vector<std::size_t>{0, 2, 4}));
}

TEST(AssignmentSegments, SingleCluster) {
    ClusterAssignment a;
    a.labels = {0, 0, 0};
    a.centers = {5.0};
    a.k = 1;
    EXPECT_EQ(assignment_segments(a, {4, 5, 6}), (std::vector<std::size_t>{0, 3}));
}

TEST(AssignmentSegments, RelabelsByCenter) {
    ClusterAssignment a;
    a.labels = {1, 1, 0, 0};
    a.centers = {10.0, 1.0};  // out of order
    a.k = 2;
    EXPECT_EQ(assignment_segments(a, {1, 2, 10, 11}), (std::vector<std::size_t>{0, 2, 4}));
}

TEST(AssignmentSegments, NonContiguousRejected) {
    ClusterAssignment a;
    a.labels = {0, 1, 0};
    a.centers = {1.0, 2.0};
    a.k = 2;
    EXPECT_THROW(assignment_segments(a, {1, 2, 3}), std::invalid_argument);
}
