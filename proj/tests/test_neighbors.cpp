#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "fixedk/errors.hpp"
#include "fixedk/neighbors.hpp"
#include "fixedk/rng.hpp"
#include "fixedk/sample_set.hpp"

using namespace fixedk;

namespace {

SampleSet random_set(std::uint64_t seed, std::size_t n, const MetricConfig& metric) {
    CounterRng rng(seed);
    std::vector<double> coords(n * static_cast<std::size_t>(metric.dimension));
    for (double& c : coords) {
        c = rng.next_unit();
    }
    return SampleSet(metric, std::move(coords));
}

}  // namespace

TEST_CASE("knn_distance hand examples") {
    const SampleSet pair({1, 2.0}, {0.25, 0.75});
    const std::vector<double> q1{0.25};
    CHECK(knn_distance(q1, pair, 1, 0) == 0.5);  // leave-one-out at the first point

    const SampleSet triple({1, 2.0}, {0.2, 0.5, 0.8});
    const std::vector<double> mid{0.5};
    CHECK(knn_distance(mid, triple, 1, 1) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(knn_distance(mid, triple, 2, 1) == doctest::Approx(0.3).epsilon(1e-15));
    // Without exclusion the query coincides with the middle point: distance 0.
    CHECK(knn_distance(mid, triple, 1) == 0.0);
}

TEST_CASE("knn_distance returns zero for duplicates without throwing") {
    const SampleSet dup({1, 2.0}, {0.3, 0.3, 0.7});
    const std::vector<double> q{0.3};
    CHECK(knn_distance(q, dup, 1, 0) == 0.0);
}

TEST_CASE("knn_distance input validation") {
    const SampleSet data({2, 2.0}, {0.1, 0.2, 0.6, 0.7});
    const std::vector<double> wrong{0.5};
    CHECK_THROWS_AS(knn_distance(wrong, data, 1), dimension_error);
    const std::vector<double> q{0.5, 0.5};
    CHECK_THROWS_AS(knn_distance(q, data, 0), cardinality_error);
    CHECK_THROWS_AS(knn_distance(q, data, 3), cardinality_error);  // 2 candidates after exclusion
    CHECK_NOTHROW(knn_distance(q, data, 2));
    CHECK_THROWS_AS(knn_distance(q, data, 2, 0), cardinality_error);
}

TEST_CASE("leave_one_out_distances hand example") {
    const SampleSet triple({1, 2.0}, {0.2, 0.5, 0.8});
    const NeighborDistances one = leave_one_out_distances(triple, 1);
    REQUIRE(one.values.size() == 3);
    CHECK(one.k == 1);
    CHECK(one.self_excluded);
    CHECK(one.values[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(one.values[1] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(one.values[2] == doctest::Approx(0.3).epsilon(1e-15));

    const NeighborDistances two = leave_one_out_distances(triple, 2);
    REQUIRE(two.values.size() == 3);
    CHECK(two.values[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(two.values[1] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(two.values[2] == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("leave_one_out_distances validation and degeneracy") {
    const SampleSet triple({1, 2.0}, {0.2, 0.5, 0.8});
    CHECK_THROWS_AS(leave_one_out_distances(triple, 0), cardinality_error);
    CHECK_THROWS_AS(leave_one_out_distances(triple, 3), cardinality_error);  // k must be <= n-1

    const SampleSet dup({1, 2.0}, {0.3, 0.3, 0.7});
    CHECK_THROWS_AS(leave_one_out_distances(dup, 1), degenerate_sample_error);
}

TEST_CASE("cross_distances hand example and validation") {
    const SampleSet p({1, 2.0}, {0.3, 0.7});
    const SampleSet q({1, 2.0}, {0.2, 0.6, 0.9});
    const NeighborDistances delta = cross_distances(p, q, 1);
    REQUIRE(delta.values.size() == 2);
    CHECK_FALSE(delta.self_excluded);
    CHECK(delta.values[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(delta.values[1] == doctest::Approx(0.1).epsilon(1e-15));

    CHECK_THROWS_AS(cross_distances(p, q, 4), cardinality_error);
    CHECK_THROWS_AS(cross_distances(p, q, 0), cardinality_error);

    const SampleSet q2({2, 2.0}, {0.2, 0.6, 0.9, 0.1});
    CHECK_THROWS_AS(cross_distances(p, q2, 1), dimension_error);
    const SampleSet q_sup({1, kSupNorm}, {0.2, 0.6, 0.9});
    CHECK_THROWS_AS(cross_distances(p, q_sup, 1), dimension_error);  // norm orders differ

    // A query that coincides with a reference point is degenerate.
    CHECK_THROWS_AS(cross_distances(q, q, 1), degenerate_sample_error);
}

TEST_CASE("kd-tree backend support") {
    CHECK(KdTree::supports({3, 1.0}));
    CHECK(KdTree::supports({3, 2.0}));
    CHECK(KdTree::supports({3, kSupNorm}));
    CHECK_FALSE(KdTree::supports({3, 1.7}));

    const SampleSet frac = random_set(99, 32, {2, 1.7});
    const KnnSearcher searcher(frac, KnnBackend::kd_tree);
    CHECK(searcher.backend() == KnnBackend::brute_force);  // silently routed
    const SampleSet euclid = random_set(99, 32, {2, 2.0});
    const KnnSearcher tree_ok(euclid, KnnBackend::kd_tree);
    CHECK(tree_ok.backend() == KnnBackend::kd_tree);
    const KnnSearcher automatic(euclid);
    CHECK(automatic.backend() == KnnBackend::kd_tree);
}

TEST_CASE("kd-tree and brute force agree bitwise on random instances") {
    const double orders[] = {1.0, 2.0, kSupNorm};
    for (int inst = 0; inst < 25; ++inst) {
        const int dim = 1 + inst % 5;
        const MetricConfig metric{dim, orders[inst % 3]};
        const std::size_t n = 10 + static_cast<std::size_t>((inst * 37) % 291);
        const int k = 1 + inst % 5;
        const SampleSet data = random_set(1000 + static_cast<std::uint64_t>(inst), n, metric);

        const NeighborDistances brute = leave_one_out_distances(data, k, KnnBackend::brute_force);
        const NeighborDistances tree = leave_one_out_distances(data, k, KnnBackend::kd_tree);
        REQUIRE(brute.values.size() == n);
        REQUIRE(tree.values.size() == n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(brute.values[i] == tree.values[i]);
        }
    }
}

TEST_CASE("cross_distances backends agree bitwise") {
    const MetricConfig metric{3, kSupNorm};
    const SampleSet queries = random_set(7, 64, metric);
    const SampleSet data = random_set(8, 200, metric);
    const NeighborDistances brute = cross_distances(queries, data, 3, KnnBackend::brute_force);
    const NeighborDistances tree = cross_distances(queries, data, 3, KnnBackend::kd_tree);
    for (std::size_t i = 0; i < brute.values.size(); ++i) {
        CHECK(brute.values[i] == tree.values[i]);
    }
}

TEST_CASE("neighbor distances are nondecreasing in k") {
    const SampleSet data = random_set(5, 40, {2, 2.0});
    std::vector<NeighborDistances> by_k;
    for (int k = 1; k <= 5; ++k) {
        by_k.push_back(leave_one_out_distances(data, k));
    }
    for (int k = 1; k < 5; ++k) {
        for (std::size_t i = 0; i < 40; ++i) {
            CHECK(by_k[static_cast<std::size_t>(k)].values[i] >=
                  by_k[static_cast<std::size_t>(k - 1)].values[i]);
        }
    }
}

TEST_CASE("leave-one-out distances are permutation-equivariant") {
    const MetricConfig metric{2, 2.0};
    const SampleSet data = random_set(21, 30, metric);
    std::vector<double> reversed;
    for (std::size_t i = data.size(); i-- > 0;) {
        const auto p = data.point(i);
        reversed.insert(reversed.end(), p.begin(), p.end());
    }
    const SampleSet flipped(metric, std::move(reversed));
    const NeighborDistances a = leave_one_out_distances(data, 2);
    const NeighborDistances b = leave_one_out_distances(flipped, 2);
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(a.values[i] == b.values[data.size() - 1 - i]);
    }
}

TEST_CASE("serial reference matches the parallel kernel bitwise") {
    for (double order : {2.0, kSupNorm}) {
        const SampleSet data = random_set(31, 200, {3, order});
        const NeighborDistances par = leave_one_out_distances(data, 2);
        const NeighborDistances ser = leave_one_out_distances_serial(data, 2);
        REQUIRE(par.values.size() == ser.values.size());
        for (std::size_t i = 0; i < par.values.size(); ++i) {
            CHECK(par.values[i] == ser.values[i]);
        }
    }
}
