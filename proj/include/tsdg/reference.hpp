#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tsdg/common.hpp"
#include "tsdg/diversify.hpp"
#include "tsdg/knn_graph.hpp"
#include "tsdg/vectors.hpp"

// Serial reference implementations. These are deliberately simple,
// single-threaded and written independently of the main kernels: the test
// suites use them as oracles, and the kernel benchmark uses them as
// baselines. Keep them boring.
namespace tsdg::ref {

/// Double-accumulation distance, used to bound the float kernels' error.
/// The scan/count references below instead accumulate in float32 like the
/// main kernels do, so id-level comparisons are exact.
double slow_distance(const VectorSet& set, NodeId a, NodeId b, Metric metric);

/// Exact neighbors of one node by full materialization and sort.
std::vector<IdDist> exact_neighbors(const VectorSet& set, NodeId node, std::uint32_t k,
                                    Metric metric);

/// Serial exact k-NN graph.
KnnGraph exact_knn(const VectorSet& set, std::uint32_t k, Metric metric);

/// Serial exact top-k per query.
std::vector<std::vector<IdDist>> exact_topk(const VectorSet& base,
                                            const VectorSet& queries, std::uint32_t k,
                                            Metric metric);

/// Occlusion-factor recount: for each candidate, how many of the other
/// candidates occlude it (strict inequalities, pairwise over the list).
std::vector<std::uint32_t> lambda_counts(std::span<const CandidateEdge> candidates,
                                         const VectorSet& set, Metric metric);

/// Independent recall: average over queries of |result[0..k) ^ truth[0..k)| / k.
double recall(const std::vector<std::vector<NodeId>>& results,
              const std::vector<std::vector<NodeId>>& truth, std::uint32_t k);

/// Plain-vector model of the segmented expansion queue rules.
class QueueModel {
public:
    explicit QueueModel(std::uint32_t m_segments, std::uint32_t width = 32);

    void push(NodeId id, float dist);
    std::optional<IdDist> pop_min();
    bool contains(NodeId id) const;
    bool empty() const;
    std::uint64_t size() const;

private:
    std::uint32_t width_;
    std::vector<std::vector<IdDist>> segments_;  // each kept sorted ascending
};

/// Plain-vector model of the segmented visited-table rules.
class VisitedModel {
public:
    explicit VisitedModel(std::uint32_t m_segments, std::uint32_t width = 32);

    void add(NodeId id);
    bool contains(NodeId id) const;

private:
    std::uint32_t width_;
    std::vector<std::vector<NodeId>> segments_;  // insertion order, oldest first
};

}  // namespace tsdg::ref
