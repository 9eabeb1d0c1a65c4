#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tsdg/common.hpp"
#include "tsdg/vectors.hpp"

namespace tsdg {

/// Fixed-width neighbor lists: every node has exactly k entries sorted
/// ascending by (dist, id), no self-loops, no duplicates.
struct KnnGraph {
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    std::vector<IdDist> flat;  // n * k

    std::span<const IdDist> row(std::uint32_t i) const {
        return {flat.data() + static_cast<std::size_t>(i) * k, k};
    }
    std::span<IdDist> row(std::uint32_t i) {
        return {flat.data() + static_cast<std::size_t>(i) * k, k};
    }

    bool operator==(const KnnGraph&) const = default;
};

/// Exact k-NN by exhaustive scan, parallel over nodes. k is clamped to
/// n-1 with a warning. Output is independent of the worker count.
KnnGraph brute_force_knn(const VectorSet& set, std::uint32_t k, Metric metric);

/// NN-descent (local-join refinement of random lists). Deterministic under
/// the seed regardless of thread count; with the same seed, running a+1
/// iterations extends the run with a iterations, so list quality is
/// non-decreasing in the iteration count.
KnnGraph nn_descent(const VectorSet& set, std::uint32_t k, Metric metric,
                    std::uint32_t iterations, double sample_rate,
                    std::uint64_t rng_seed);

/// Fraction of exact k-NN edges present in `graph`, measured on
/// `sample_nodes` nodes drawn with `seed` (all nodes if sample_nodes >= n).
double knn_graph_quality(const KnnGraph& graph, const VectorSet& set, Metric metric,
                         std::uint32_t sample_nodes, std::uint64_t seed);

/// Binary format: magic "KNNG", version u32-LE, n u64-LE, k u32-LE,
/// then per node: k x (neighbor u32-LE, distance f32-LE).
void save_knng(const KnnGraph& graph, const std::string& path);
KnnGraph load_knng(const std::string& path);

}  // namespace tsdg
