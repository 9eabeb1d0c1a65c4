#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tsdg/common.hpp"
#include "tsdg/diversify.hpp"
#include "tsdg/greedy_search.hpp"  // SearchStats
#include "tsdg/segmented.hpp"
#include "tsdg/vectors.hpp"

namespace tsdg {

struct BestFirstParams {
    std::uint32_t k = 10;
    std::uint32_t hop_limit = 1024;  // T; counts queue pops
    float delta = 0.0f;              // probe slack, same (squared) units as the metric
    std::uint32_t m_segments = 8;
    std::uint32_t lambda_cut = 5;
    std::uint64_t seed = 0;
    /// Swap the segmented C/V for unbounded exact models (the sequential
    /// CPU-style configuration). Default exercises the segmented design.
    bool unbounded = false;
};

/// Optional per-query instrumentation: which nodes were expanded and which
/// directed edges were streamed from them.
struct EdgeTrace {
    std::vector<NodeId> expanded;
    std::vector<std::pair<NodeId, NodeId>> examined;  // (expanded node, edge target)
};

/// Best-first search with bounded segmented expansion queue and visited
/// table (or unbounded models, see BestFirstParams::unbounded). Starts at
/// the best of 32 random seeds; a popped candidate further than the current
/// k-th result plus delta ends the search. Returns ids ascending by
/// (dist, id), at most k of them.
std::vector<NodeId> bestfirst_search(const TsdgGraph& graph, const VectorSet& set,
                                     std::span<const float> query,
                                     const BestFirstParams& params, Rng64 rng,
                                     SearchStats* stats = nullptr,
                                     EdgeTrace* trace = nullptr);

/// Batch front end; per-query streams are forked from params.seed by query
/// index, so results are independent of scheduling.
std::vector<std::vector<NodeId>> large_batch_search(const TsdgGraph& graph,
                                                    const VectorSet& set,
                                                    const VectorSet& queries,
                                                    const BestFirstParams& params,
                                                    SearchStats* stats = nullptr);

}  // namespace tsdg
