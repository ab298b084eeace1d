// Timing comparison for the leave-one-out k-NN kernel: serial loop vs the
// OpenMP-parallel loop, brute-force scan vs kd-tree, across sample sizes and
// dimensions. Also verifies that every variant returns identical distances.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fixedk/distributions.hpp"
#include "fixedk/neighbors.hpp"
#include "fixedk/sample_set.hpp"

namespace {

using namespace fixedk;

double seconds_for(const std::function<NeighborDistances()>& fn, NeighborDistances& out) {
    const auto start = std::chrono::steady_clock::now();
    out = fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

}  // namespace

int main() {
#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
#else
    const int max_threads = 1;
#endif
    std::printf("leave-one-out k-NN kernel timings (seconds); %d thread(s) available\n",
                max_threads);
    std::printf("%8s %4s %3s | %12s %12s %12s | %10s\n", "n", "dim", "k", "brute-serial",
                "brute-omp", "kdtree-omp", "max|diff|");

    double worst_diff = 0.0;
    for (const std::size_t n : {std::size_t{2048}, std::size_t{16384}}) {
        for (const int dim : {2, 4}) {
            DistributionSpec uniform;
            uniform.components.assign(static_cast<std::size_t>(dim), BetaComponent{1, 1});
            const SampleSet data =
                sample(uniform, n, 0x5eed + n + static_cast<std::size_t>(dim));
            for (const int k : {1, 3}) {
                NeighborDistances serial, brute, tree;
                const double t_serial = seconds_for(
                    [&] {
                        return leave_one_out_distances_serial(data, k,
                                                              KnnBackend::brute_force);
                    },
                    serial);
                const double t_brute = seconds_for(
                    [&] { return leave_one_out_distances(data, k, KnnBackend::brute_force); },
                    brute);
                const double t_tree = seconds_for(
                    [&] { return leave_one_out_distances(data, k, KnnBackend::kd_tree); },
                    tree);
                const double diff = std::max(max_abs_diff(serial.values, brute.values),
                                             max_abs_diff(serial.values, tree.values));
                worst_diff = std::max(worst_diff, diff);
                std::printf("%8zu %4d %3d | %12.4f %12.4f %12.4f | %10.3g\n", n, dim, k,
                            t_serial, t_brute, t_tree, diff);
            }
        }
    }
    std::printf("max |difference| across all variants: %.3g\n", worst_diff);
    return worst_diff == 0.0 ? 0 : 1;
}
