#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsdg/common.hpp"
#include "tsdg/knn_graph.hpp"
#include "tsdg/vectors.hpp"

namespace tsdg {

/// Directed edge under consideration during diversification.
struct CandidateEdge {
    NodeId target = kInvalidId;
    float dist = kInfDist;

    bool operator==(const CandidateEdge&) const = default;
};

/// Final edge: target, distance from the owner, and the occlusion factor
/// lambda (how many sibling candidates occlude this edge).
struct TsdgEdge {
    NodeId target = kInvalidId;
    std::uint16_t lambda = 0;
    float dist = kInfDist;

    bool operator==(const TsdgEdge&) const = default;
};

struct DiversifyParams {
    float alpha = 1.2f;          // first-stage relaxation factor, >= 1
    std::uint16_t lambda0 = 9;   // edges with lambda > lambda0 are dropped
    std::uint32_t max_degree = 0;  // 0 = uncapped
};

struct BuildStats {
    std::uint64_t input_edges = 0;
    std::uint64_t stage1_edges = 0;
    std::uint64_t augmented_edges = 0;  // after reverse-edge insertion
    std::uint64_t final_edges = 0;

    double stage1_retention() const {
        return input_edges ? static_cast<double>(stage1_edges) /
                                 static_cast<double>(input_edges)
                           : 0.0;
    }
};

/// Per-node adjacency sorted by (lambda, dist, target) ascending, so a
/// lambda cutoff selects a list prefix. One stored graph serves every
/// runtime degree.
struct TsdgGraph {
    std::uint32_t n = 0;
    Metric metric = Metric::L2;
    std::uint32_t k = 0;  // k of the source k-NN graph
    float alpha = 0.0f;
    std::uint16_t lambda0 = 0;
    std::vector<std::uint64_t> offsets;  // n + 1
    std::vector<TsdgEdge> edges;

    std::span<const TsdgEdge> neighbors(NodeId u) const {
        return {edges.data() + offsets[u],
                static_cast<std::size_t>(offsets[u + 1] - offsets[u])};
    }
    /// Edges with lambda < lambda_cut, always a prefix of neighbors(u).
    std::span<const TsdgEdge> neighbors_below(NodeId u, std::uint32_t lambda_cut) const;

    double average_degree() const {
        return n ? static_cast<double>(edges.size()) / n : 0.0;
    }

    bool operator==(const TsdgGraph&) const = default;
};

/// Occlusion test: edge <x0,xj> is occluded by <x0,xi> iff xi is strictly
/// closer to x0 than xj is, and strictly closer to xj than x0 is.
inline bool occludes(float d0i, float d0j, float dij) {
    return d0i < d0j && dij < d0j;
}

/// Relaxed form used by the first stage; alpha = 1 reduces to occludes.
inline bool occludes_relaxed(float d0i, float d0j, float dij, float alpha) {
    return alpha * d0i < d0j && alpha * dij < d0j;
}

/// First stage: greedy filter over an ascending-distance candidate list.
/// A candidate survives iff no already-kept edge relax-occludes it; the
/// closest candidate always survives. Throws if the input is unsorted.
std::vector<CandidateEdge> stage1_relaxed_gd(std::span<const CandidateEdge> candidates,
                                             const VectorSet& set, NodeId owner,
                                             float alpha, Metric metric);

/// Makes the stage-1 graph undirected: for every edge u->v, v's list gains
/// (u, dist) unless already present. Lists come back deduplicated and
/// sorted ascending by (dist, target).
std::vector<std::vector<CandidateEdge>> add_reverse_edges(
    std::vector<std::vector<CandidateEdge>> lists, const VectorSet& set, Metric metric);

/// Second stage: every candidate's lambda is the number of OTHER candidates
/// in the list that occlude it (pairwise, order-independent). Result sorted
/// by (lambda, dist, target); entries with lambda > lambda0 dropped; then
/// truncated to max_degree if nonzero.
std::vector<TsdgEdge> stage2_soft_gd(std::span<const CandidateEdge> candidates,
                                     const VectorSet& set, NodeId owner,
                                     std::uint16_t lambda0, std::uint32_t max_degree,
                                     Metric metric);

/// Full pipeline: stage 1 per node, reverse-edge augmentation, stage 2 per
/// node. Pure function of (set, knn, params); output is independent of the
/// worker count.
TsdgGraph build(const VectorSet& set, const KnnGraph& knn, const DiversifyParams& params,
                Metric metric, BuildStats* stats = nullptr);

/// Assembles a graph from explicit adjacency lists (testing and tooling).
/// Validates the per-node (lambda, dist, target) ordering and dedup.
TsdgGraph tsdg_from_adjacency(std::uint32_t n, Metric metric, std::uint32_t k,
                              float alpha, std::uint16_t lambda0,
                              const std::vector<std::vector<TsdgEdge>>& adjacency);

/// Binary format: magic "TSDG", version u32-LE, n u64-LE, metric u8,
/// k u32-LE, alpha f32-LE, lambda0 u16-LE, then per node: degree u32-LE,
/// degree x (target u32-LE, lambda u16-LE, dist f32-LE).
void save_tsdg(const TsdgGraph& graph, const std::string& path);
TsdgGraph load_tsdg(const std::string& path);

}  // namespace tsdg
