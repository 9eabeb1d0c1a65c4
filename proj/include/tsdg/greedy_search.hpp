#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tsdg/common.hpp"
#include "tsdg/diversify.hpp"
#include "tsdg/rank_list.hpp"
#include "tsdg/vectors.hpp"

namespace tsdg {

struct GreedyParams {
    std::uint32_t t0 = 16;          // independent searches per query
    std::uint32_t hop_limit = 16;   // T
    std::uint32_t lambda_cut = 10;  // visit edges with lambda < lambda_cut
    std::uint64_t seed = 0;
};

struct SearchStats {
    std::uint64_t hops = 0;
    std::uint64_t distance_evals = 0;
    std::uint64_t queue_evictions = 0;  // segmented expansion-queue overflows

    SearchStats& operator+=(const SearchStats& o) {
        hops += o.hops;
        distance_evals += o.distance_evals;
        queue_evictions += o.queue_evictions;
        return *this;
    }
};

/// Best of 32 uniformly random nodes (with replacement), ties by smaller id.
NodeId select_start(const TsdgGraph& graph, const VectorSet& set,
                    std::span<const float> query, Rng64& rng,
                    SearchStats* stats = nullptr);

/// One cheap greedy search: per hop, the expansion node's lambda-prefix
/// neighbor list streams through 32 lanes of per-lane minima, the best 16
/// of which are half-merged into the running 32-slot result. Stops when a
/// merge changes nothing or after hop_limit hops.
RankList greedy_search_once(const TsdgGraph& graph, const VectorSet& set,
                            std::span<const float> query, const GreedyParams& params,
                            Rng64 rng, SearchStats* stats = nullptr);

/// t0 independent searches with streams forked per search index, merged by
/// id-dedup and (dist, id) order, truncated to k. Throws if k > 32 * t0.
std::vector<NodeId> small_batch_search_one(const TsdgGraph& graph, const VectorSet& set,
                                           std::span<const float> query, std::uint32_t k,
                                           const GreedyParams& params,
                                           SearchStats* stats = nullptr);

/// Batch front end; queries run concurrently, each with private state.
std::vector<std::vector<NodeId>> small_batch_search(const TsdgGraph& graph,
                                                    const VectorSet& set,
                                                    const VectorSet& queries,
                                                    std::uint32_t k,
                                                    const GreedyParams& params,
                                                    SearchStats* stats = nullptr);

}  // namespace tsdg
