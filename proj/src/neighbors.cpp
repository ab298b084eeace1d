#include "fixedk/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fixedk/errors.hpp"

namespace fixedk {

namespace {

// Bounded max-heap over the k best distances seen so far.
class KBest {
  public:
    explicit KBest(int k) : k_(static_cast<std::size_t>(k)) { heap_.reserve(k_); }

    void offer(double d) {
        if (heap_.size() < k_) {
            heap_.push_back(d);
            std::push_heap(heap_.begin(), heap_.end());
        } else if (d < heap_.front()) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.back() = d;
            std::push_heap(heap_.begin(), heap_.end());
        }
    }

    // Current pruning radius: +inf until k candidates are in.
    double bound() const {
        return heap_.size() < k_ ? std::numeric_limits<double>::infinity() : heap_.front();
    }

    double kth() const { return heap_.front(); }

  private:
    std::size_t k_;
    std::vector<double> heap_;
};

void check_query_arguments(std::span<const double> query, const SampleSet& data, int k,
                           std::optional<std::size_t> exclude_index) {
    if (query.size() != static_cast<std::size_t>(data.dimension())) {
        throw dimension_error("knn query dimension " + std::to_string(query.size()) +
                              " does not match sample dimension " +
                              std::to_string(data.dimension()));
    }
    std::size_t usable = data.size();
    if (exclude_index && *exclude_index < data.size()) {
        --usable;
    }
    if (k < 1 || static_cast<std::size_t>(k) > usable) {
        throw cardinality_error("knn order k = " + std::to_string(k) +
                                " must lie in [1, " + std::to_string(usable) +
                                "] for this query");
    }
}

void check_positive(const NeighborDistances& result, const char* op) {
    for (double v : result.values) {
        if (v == 0.0) {
            throw degenerate_sample_error(std::string(op) +
                                          ": duplicate points give a zero k-NN distance");
        }
    }
}

}  // namespace

double knn_distance(std::span<const double> query, const SampleSet& data, int k,
                    std::optional<std::size_t> exclude_index) {
    check_query_arguments(query, data, k, exclude_index);
    KBest best(k);
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (exclude_index && *exclude_index == i) {
            continue;
        }
        best.offer(norm_distance(query, data.point(i), data.metric()));
    }
    return best.kth();
}

bool KdTree::supports(const MetricConfig& metric) {
    return metric.order == 1.0 || metric.order == 2.0 || metric.is_sup_norm();
}

KdTree::KdTree(const SampleSet& data, int leaf_size) : data_(data) {
    perm_.resize(data_.size());
    for (std::size_t i = 0; i < perm_.size(); ++i) {
        perm_[i] = i;
    }
    nodes_.reserve(2 * data_.size() / static_cast<std::size_t>(leaf_size) + 2);
    build(0, data_.size(), leaf_size);
}

int KdTree::build(std::size_t begin, std::size_t end, int leaf_size) {
    const int d = data_.dimension();
    const int node_index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    box_lo_.resize(box_lo_.size() + d, std::numeric_limits<double>::infinity());
    box_hi_.resize(box_hi_.size() + d, -std::numeric_limits<double>::infinity());

    double* lo = box_lo_.data() + static_cast<std::size_t>(node_index) * d;
    double* hi = box_hi_.data() + static_cast<std::size_t>(node_index) * d;
    for (std::size_t i = begin; i < end; ++i) {
        const auto p = data_.point(perm_[i]);
        for (int j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], p[j]);
            hi[j] = std::max(hi[j], p[j]);
        }
    }

    if (end - begin <= static_cast<std::size_t>(leaf_size)) {
        nodes_[node_index].begin = begin;
        nodes_[node_index].end = end;
        return node_index;
    }

    int split_dim = 0;
    double widest = -1.0;
    for (int j = 0; j < d; ++j) {
        const double extent = hi[j] - lo[j];
        if (extent > widest) {
            widest = extent;
            split_dim = j;
        }
    }
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                     [&](std::size_t a, std::size_t b) {
                         return data_.point(a)[split_dim] < data_.point(b)[split_dim];
                     });
    const double split_value = data_.point(perm_[mid])[split_dim];

    const int left = build(begin, mid, leaf_size);
    const int right = build(mid, end, leaf_size);
    // `nodes_` may have reallocated during recursion; index again.
    nodes_[node_index].left = left;
    nodes_[node_index].right = right;
    nodes_[node_index].split_dim = split_dim;
    nodes_[node_index].split_value = split_value;
    return node_index;
}

double KdTree::box_distance(int node, std::span<const double> query) const {
    const int d = data_.dimension();
    const double* lo = box_lo_.data() + static_cast<std::size_t>(node) * d;
    const double* hi = box_hi_.data() + static_cast<std::size_t>(node) * d;
    const MetricConfig& m = data_.metric();
    if (m.is_sup_norm()) {
        double worst = 0.0;
        for (int j = 0; j < d; ++j) {
            const double excess = std::max({0.0, lo[j] - query[j], query[j] - hi[j]});
            worst = std::max(worst, excess);
        }
        return worst;
    }
    if (m.order == 1.0) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            s += std::max({0.0, lo[j] - query[j], query[j] - hi[j]});
        }
        return s;
    }
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
        const double excess = std::max({0.0, lo[j] - query[j], query[j] - hi[j]});
        s += excess * excess;
    }
    return std::sqrt(s);
}

double KdTree::knn_distance(std::span<const double> query, int k,
                            std::optional<std::size_t> exclude_index) const {
    check_query_arguments(query, data_, k, exclude_index);
    KBest best(k);
    // Explicit DFS stack, nearer child first.
    std::vector<int> stack;
    stack.reserve(64);
    stack.push_back(0);
    while (!stack.empty()) {
        const int ni = stack.back();
        stack.pop_back();
        if (box_distance(ni, query) > best.bound()) {
            continue;
        }
        const Node& node = nodes_[ni];
        if (node.left < 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = perm_[i];
                if (exclude_index && *exclude_index == idx) {
                    continue;
                }
                best.offer(norm_distance(query, data_.point(idx), data_.metric()));
            }
            continue;
        }
        const bool left_first = query[node.split_dim] <= node.split_value;
        stack.push_back(left_first ? node.right : node.left);  // far child, popped last
        stack.push_back(left_first ? node.left : node.right);
    }
    return best.kth();
}

KnnSearcher::KnnSearcher(const SampleSet& data, KnnBackend backend)
    : data_(data), backend_(backend) {
    if (backend_ == KnnBackend::automatic || backend_ == KnnBackend::kd_tree) {
        // Box pruning is exact only for r in {1, 2, inf}; other orders fall
        // back to the full scan.
        backend_ = KdTree::supports(data_.metric()) ? KnnBackend::kd_tree
                                                    : KnnBackend::brute_force;
    }
    if (backend_ == KnnBackend::kd_tree) {
        tree_.emplace(data_);
    }
}

double KnnSearcher::query(std::span<const double> q, int k,
                          std::optional<std::size_t> exclude_index) const {
    if (tree_) {
        return tree_->knn_distance(q, k, exclude_index);
    }
    return fixedk::knn_distance(q, data_, k, exclude_index);
}

NeighborDistances leave_one_out_distances(const SampleSet& data, int k, KnnBackend backend) {
    if (k < 1 || static_cast<std::size_t>(k) + 1 > data.size()) {
        throw cardinality_error("leave_one_out_distances: k = " + std::to_string(k) +
                                " requires at least k + 1 = " + std::to_string(k + 1) +
                                " points, have " + std::to_string(data.size()));
    }
    KnnSearcher searcher(data, backend);
    NeighborDistances out;
    out.values.resize(data.size());
    out.k = k;
    out.self_excluded = true;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out.values[i] = searcher.query(data.point(i), k, static_cast<std::size_t>(i));
    }
    check_positive(out, "leave_one_out_distances");
    return out;
}

NeighborDistances leave_one_out_distances_serial(const SampleSet& data, int k,
                                                 KnnBackend backend) {
    if (k < 1 || static_cast<std::size_t>(k) + 1 > data.size()) {
        throw cardinality_error("leave_one_out_distances: k = " + std::to_string(k) +
                                " requires at least k + 1 = " + std::to_string(k + 1) +
                                " points, have " + std::to_string(data.size()));
    }
    KnnSearcher searcher(data, backend);
    NeighborDistances out;
    out.values.resize(data.size());
    out.k = k;
    out.self_excluded = true;
    for (std::size_t i = 0; i < data.size(); ++i) {
        out.values[i] = searcher.query(data.point(i), k, i);
    }
    check_positive(out, "leave_one_out_distances");
    return out;
}

NeighborDistances cross_distances(const SampleSet& queries, const SampleSet& data, int k,
                                  KnnBackend backend) {
    if (queries.dimension() != data.dimension() ||
        queries.metric().order != data.metric().order) {
        throw dimension_error("cross_distances: query and data sets must share dimension and "
                              "norm order");
    }
    if (k < 1 || static_cast<std::size_t>(k) > data.size()) {
        throw cardinality_error("cross_distances: k = " + std::to_string(k) +
                                " must lie in [1, " + std::to_string(data.size()) + "]");
    }
    KnnSearcher searcher(data, backend);
    NeighborDistances out;
    out.values.resize(queries.size());
    out.k = k;
    out.self_excluded = false;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out.values[i] = searcher.query(queries.point(i), k);
    }
    check_positive(out, "cross_distances");
    return out;
}

}  // namespace fixedk
