#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fixedk/metric.hpp"
#include "fixedk/sample_set.hpp"

namespace fixedk {

// Distances to the k-th nearest neighbor, one entry per query point.
struct NeighborDistances {
    std::vector<double> values;
    int k = 0;
    bool self_excluded = false;
};

enum class KnnBackend {
    brute_force,  // serial reference: full scan + selection
    kd_tree,      // box-pruned tree; exact for r in {1, 2, inf}
    automatic,    // kd_tree when the norm supports it, brute force otherwise
};

// Distance from `query` to the k-th nearest point of `data`, optionally
// excluding one index (leave-one-out convention). Full scan; returns 0 for
// duplicate points -- positivity is enforced by callers that need it.
// Throws dimension_error / cardinality_error on bad inputs.
double knn_distance(std::span<const double> query, const SampleSet& data, int k,
                    std::optional<std::size_t> exclude_index = std::nullopt);

// Static kd-tree over a sample set. Median split on the widest box dimension;
// queries prune with exact box distances, which requires r in {1, 2, inf}.
class KdTree {
  public:
    explicit KdTree(const SampleSet& data, int leaf_size = 16);

    static bool supports(const MetricConfig& metric);

    double knn_distance(std::span<const double> query, int k,
                        std::optional<std::size_t> exclude_index) const;

  private:
    struct Node {
        std::size_t begin = 0, end = 0;  // leaf range into perm_
        int left = -1, right = -1;       // children (indices into nodes_)
        int split_dim = 0;
        double split_value = 0.0;
    };

    int build(std::size_t begin, std::size_t end, int leaf_size);
    double box_distance(int node, std::span<const double> query) const;

    const SampleSet& data_;
    std::vector<Node> nodes_;
    std::vector<std::size_t> perm_;
    std::vector<double> box_lo_, box_hi_;  // node-major, dimension-minor
};

// One immutable index, many queries. Resolves `automatic` (and silently routes
// kd_tree requests with unsupported norms) to brute force.
class KnnSearcher {
  public:
    explicit KnnSearcher(const SampleSet& data, KnnBackend backend = KnnBackend::automatic);

    double query(std::span<const double> q, int k,
                 std::optional<std::size_t> exclude_index = std::nullopt) const;

    KnnBackend backend() const { return backend_; }
    const SampleSet& data() const { return data_; }

  private:
    const SampleSet& data_;
    KnnBackend backend_;
    std::optional<KdTree> tree_;
};

// Distance from each X_i to its k-th nearest neighbor among the other points.
// Requires 1 <= k <= n-1. Queries run in parallel; each output slot is
// written independently, so results are identical for any thread count.
// Throws degenerate_sample_error when a duplicate pair yields a zero distance.
NeighborDistances leave_one_out_distances(const SampleSet& data, int k,
                                          KnnBackend backend = KnnBackend::automatic);

// Single-threaded reference for leave_one_out_distances: same searcher, same
// per-index queries, plain loop. Kept for equivalence tests and benchmarks;
// output is bitwise identical to the parallel kernel.
NeighborDistances leave_one_out_distances_serial(const SampleSet& data, int k,
                                                 KnnBackend backend = KnnBackend::automatic);

// Distance from each query point to its k-th nearest neighbor in `data`
// (no exclusion). Queries and data must share dimension and norm order.
// Throws degenerate_sample_error on any zero distance.
NeighborDistances cross_distances(const SampleSet& queries, const SampleSet& data, int k,
                                  KnnBackend backend = KnnBackend::automatic);

}  // namespace fixedk
