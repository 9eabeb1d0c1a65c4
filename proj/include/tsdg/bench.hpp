#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsdg/bestfirst_search.hpp"
#include "tsdg/common.hpp"
#include "tsdg/diversify.hpp"
#include "tsdg/greedy_search.hpp"
#include "tsdg/vectors.hpp"

namespace tsdg {

/// Exact neighbor ids per query, ascending by (dist, id).
struct GroundTruth {
    std::uint32_t k = 0;
    std::vector<std::vector<NodeId>> ids;

    bool operator==(const GroundTruth&) const = default;
};

/// Exhaustive scan, parallel over queries. K_gt must be <= n.
GroundTruth ground_truth(const VectorSet& base, const VectorSet& queries,
                         std::uint32_t k_gt, Metric metric);

/// Recall@k: sum over queries of |results[0..k) ^ truth[0..k)| / (n * k).
/// Result lists shorter than k count their missing tail as misses; truth
/// depth below k is an error.
double recall_at_k(const std::vector<std::vector<NodeId>>& results,
                   const GroundTruth& truth, std::uint32_t k);

/// Gaussian mixture: cluster centers uniform in [0,1]^d, points assigned a
/// uniformly random cluster and offset by N(0, spread^2) per component.
/// Bit-identical under the same seed.
VectorSet make_synthetic(std::uint32_t n, std::uint32_t d, std::uint32_t clusters,
                         float spread, std::uint64_t seed);

/// Draws n + n_queries points from one mixture and splits them, so queries
/// follow the same distribution as the base set.
std::pair<VectorSet, VectorSet> make_synthetic_split(std::uint32_t n,
                                                     std::uint32_t n_queries,
                                                     std::uint32_t d,
                                                     std::uint32_t clusters, float spread,
                                                     std::uint64_t seed);

struct BenchRow {
    std::string dataset;
    std::string algorithm;
    std::uint32_t batch_size = 0;
    std::string params;  // echoed flags, ';'-separated
    std::uint32_t k = 0;
    double recall = 0.0;
    double qps = 0.0;
    double mean_hops = 0.0;
    double mean_distance_evals = 0.0;
};

struct BenchConfig;  // parsed from JSON; defined in bench.cpp

/// Runs every parameter point in the config, writes one CSV row per point
/// (header: dataset,algorithm,batch_size,params,k,recall,qps,mean_hops,
/// mean_distance_evals) and returns the rows. All columns except timing are
/// deterministic under the config's seeds.
std::vector<BenchRow> run_bench_file(const std::string& config_path,
                                     const std::string& csv_out);

void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path);

}  // namespace tsdg
