#include "tsdg/diversify.hpp"

#include <algorithm>
#include <unordered_set>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "tsdg/serialize.hpp"

namespace tsdg {

namespace {

bool candidate_order(const CandidateEdge& a, const CandidateEdge& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.target < b.target;
}

bool edge_order(const TsdgEdge& a, const TsdgEdge& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.target < b.target;
}

constexpr float kDistTolerance = 1e-5f;

bool dist_matches(float a, float b) {
    return std::fabs(a - b) <= kDistTolerance * std::max({1.0f, std::fabs(a), std::fabs(b)});
}

}  // namespace

std::span<const TsdgEdge> TsdgGraph::neighbors_below(NodeId u,
                                                     std::uint32_t lambda_cut) const {
    const auto all = neighbors(u);
    const auto end = std::partition_point(all.begin(), all.end(),
                                          [lambda_cut](const TsdgEdge& e) {
                                              return e.lambda < lambda_cut;
                                          });
    return all.first(static_cast<std::size_t>(end - all.begin()));
}

std::vector<CandidateEdge> stage1_relaxed_gd(std::span<const CandidateEdge> candidates,
                                             const VectorSet& set, NodeId /*owner*/,
                                             float alpha, Metric metric) {
    if (alpha < 1.0f) throw std::invalid_argument("stage1_relaxed_gd: alpha must be >= 1");
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        if (candidates[i].dist < candidates[i - 1].dist) {
            throw std::invalid_argument(
                "stage1_relaxed_gd: candidates must be sorted ascending by distance");
        }
    }
    const DistanceKernel kernel = kernel_for(metric);

    std::vector<CandidateEdge> kept;
    for (const auto& cand : candidates) {
        bool occluded = false;
        for (const auto& sel : kept) {
            const float dij = kernel(set.row(sel.target), set.row(cand.target), set.d);
            if (occludes_relaxed(sel.dist, cand.dist, dij, alpha)) {
                occluded = true;
                break;
            }
        }
        if (!occluded) kept.push_back(cand);
    }
    return kept;
}

std::vector<std::vector<CandidateEdge>> add_reverse_edges(
    std::vector<std::vector<CandidateEdge>> lists, const VectorSet& set, Metric metric) {
    const auto n = static_cast<NodeId>(lists.size());
    const DistanceKernel kernel = kernel_for(metric);

    // Count-then-fill: reserving the final size up front keeps the append
    // loop free of reallocation while rows grow.
    std::vector<std::uint32_t> reverse_count(n, 0);
    for (NodeId u = 0; u < n; ++u) {
        for (const auto& e : lists[u]) {
            if (e.target >= n) {
                throw std::out_of_range("add_reverse_edges: target out of range");
            }
            reverse_count[e.target]++;
        }
    }
    std::vector<std::size_t> forward_degree(n);
    for (NodeId u = 0; u < n; ++u) {
        forward_degree[u] = lists[u].size();
        lists[u].reserve(lists[u].size() + reverse_count[u]);
    }
    // Appended reverse entries must not spawn reverses themselves, hence
    // the snapshot of forward degrees above.
    for (NodeId u = 0; u < n; ++u) {
        for (std::size_t j = 0; j < forward_degree[u]; ++j) {
            const CandidateEdge e = lists[u][j];
            lists[e.target].push_back({u, e.dist});
        }
    }

#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t ui = 0; ui < static_cast<std::int64_t>(n); ++ui) {
        auto& list = lists[static_cast<std::size_t>(ui)];
        std::sort(list.begin(), list.end(),
                  [](const CandidateEdge& a, const CandidateEdge& b) {
                      if (a.target != b.target) return a.target < b.target;
                      return a.dist < b.dist;
                  });
        list.erase(std::unique(list.begin(), list.end(),
                               [](const CandidateEdge& a, const CandidateEdge& b) {
                                   return a.target == b.target;
                               }),
                   list.end());
        // Forward/reverse copies should agree on the distance; recompute
        // from the vectors if they drifted past tolerance.
        for (auto& e : list) {
            const float expect =
                kernel(set.row(static_cast<NodeId>(ui)), set.row(e.target), set.d);
            if (!dist_matches(e.dist, expect)) e.dist = expect;
        }
        std::sort(list.begin(), list.end(), candidate_order);
    }
    return lists;
}

std::vector<TsdgEdge> stage2_soft_gd(std::span<const CandidateEdge> candidates,
                                     const VectorSet& set, NodeId /*owner*/,
                                     std::uint16_t lambda0, std::uint32_t max_degree,
                                     Metric metric) {
    const DistanceKernel kernel = kernel_for(metric);
    const std::size_t m = candidates.size();

    std::vector<TsdgEdge> edges;
    edges.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        std::uint32_t count = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == j) continue;
            const float dij =
                kernel(set.row(candidates[i].target), set.row(candidates[j].target), set.d);
            if (occludes(candidates[i].dist, candidates[j].dist, dij)) ++count;
        }
        const auto lambda = static_cast<std::uint16_t>(std::min<std::uint32_t>(count, 65535));
        if (lambda > lambda0) continue;
        edges.push_back({candidates[j].target, lambda, candidates[j].dist});
    }
    std::sort(edges.begin(), edges.end(), edge_order);
    if (max_degree != 0 && edges.size() > max_degree) edges.resize(max_degree);
    return edges;
}

TsdgGraph build(const VectorSet& set, const KnnGraph& knn, const DiversifyParams& params,
                Metric metric, BuildStats* stats) {
    require_metric_ready(set, metric);
    if (knn.n != set.n) throw std::invalid_argument("build: graph/set size mismatch");
    if (params.alpha < 1.0f) throw std::invalid_argument("build: alpha must be >= 1");
    const NodeId n = set.n;

    std::vector<std::vector<CandidateEdge>> stage1(n);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t ui = 0; ui < static_cast<std::int64_t>(n); ++ui) {
        const auto u = static_cast<NodeId>(ui);
        std::vector<CandidateEdge> cands;
        cands.reserve(knn.k);
        for (const auto& e : knn.row(u)) cands.push_back({e.id, e.dist});
        stage1[u] = stage1_relaxed_gd(cands, set, u, params.alpha, metric);
    }

    std::uint64_t stage1_edges = 0;
    for (const auto& list : stage1) stage1_edges += list.size();

    auto augmented = add_reverse_edges(std::move(stage1), set, metric);
    std::uint64_t augmented_edges = 0;
    for (const auto& list : augmented) augmented_edges += list.size();

    std::vector<std::vector<TsdgEdge>> adjacency(n);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t ui = 0; ui < static_cast<std::int64_t>(n); ++ui) {
        const auto u = static_cast<NodeId>(ui);
        adjacency[u] =
            stage2_soft_gd(augmented[u], set, u, params.lambda0, params.max_degree, metric);
    }

    TsdgGraph g;
    g.n = n;
    g.metric = metric;
    g.k = knn.k;
    g.alpha = params.alpha;
    g.lambda0 = params.lambda0;
    g.offsets.resize(n + 1);
    std::uint64_t total = 0;
    for (NodeId u = 0; u < n; ++u) {
        g.offsets[u] = total;
        total += adjacency[u].size();
    }
    g.offsets[n] = total;
    g.edges.reserve(total);
    for (NodeId u = 0; u < n; ++u) {
        g.edges.insert(g.edges.end(), adjacency[u].begin(), adjacency[u].end());
    }

    if (stats) {
        stats->input_edges = static_cast<std::uint64_t>(knn.n) * knn.k;
        stats->stage1_edges = stage1_edges;
        stats->augmented_edges = augmented_edges;
        stats->final_edges = total;
    }
    return g;
}

TsdgGraph tsdg_from_adjacency(std::uint32_t n, Metric metric, std::uint32_t k,
                              float alpha, std::uint16_t lambda0,
                              const std::vector<std::vector<TsdgEdge>>& adjacency) {
    if (adjacency.size() != n) {
        throw std::invalid_argument("tsdg_from_adjacency: adjacency size mismatch");
    }
    TsdgGraph g;
    g.n = n;
    g.metric = metric;
    g.k = k;
    g.alpha = alpha;
    g.lambda0 = lambda0;
    g.offsets.resize(n + 1);
    std::uint64_t total = 0;
    for (NodeId u = 0; u < n; ++u) {
        g.offsets[u] = total;
        total += adjacency[u].size();
    }
    g.offsets[n] = total;
    g.edges.reserve(total);
    std::unordered_set<NodeId> seen;
    for (NodeId u = 0; u < n; ++u) {
        seen.clear();
        for (std::size_t j = 0; j < adjacency[u].size(); ++j) {
            const auto& e = adjacency[u][j];
            if (e.target == u || e.target >= n) {
                throw std::invalid_argument("tsdg_from_adjacency: bad edge target");
            }
            if (j > 0 && edge_order(e, adjacency[u][j - 1])) {
                throw std::invalid_argument(
                    "tsdg_from_adjacency: edges not sorted by (lambda, dist, target)");
            }
            if (!seen.insert(e.target).second) {
                throw std::invalid_argument("tsdg_from_adjacency: duplicate target");
            }
            g.edges.push_back(e);
        }
    }
    return g;
}

void save_tsdg(const TsdgGraph& graph, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    detail::LeWriter w(path, out);
    w.magic("TSDG");
    w.u32(1);  // version
    w.u64(graph.n);
    w.u8(static_cast<std::uint8_t>(graph.metric));
    w.u32(graph.k);
    w.f32(graph.alpha);
    w.u16(graph.lambda0);
    for (NodeId u = 0; u < graph.n; ++u) {
        const auto nbrs = graph.neighbors(u);
        w.u32(static_cast<std::uint32_t>(nbrs.size()));
        for (const auto& e : nbrs) {
            w.u32(e.target);
            w.u16(e.lambda);
            w.f32(e.dist);
        }
    }
}

TsdgGraph load_tsdg(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open for reading");
    detail::LeReader r(path, in);
    r.expect_magic("TSDG", "TSDG");
    const std::uint32_t version = r.u32();
    if (version != 1) {
        throw std::runtime_error(path + ": unsupported TSDG version " +
                                 std::to_string(version));
    }
    TsdgGraph g;
    g.n = static_cast<std::uint32_t>(r.u64());
    g.metric = static_cast<Metric>(r.u8());
    g.k = r.u32();
    g.alpha = r.f32();
    g.lambda0 = r.u16();
    g.offsets.resize(static_cast<std::size_t>(g.n) + 1);
    std::uint64_t total = 0;
    for (NodeId u = 0; u < g.n; ++u) {
        g.offsets[u] = total;
        const std::uint32_t degree = r.u32();
        for (std::uint32_t j = 0; j < degree; ++j) {
            TsdgEdge e;
            e.target = r.u32();
            e.lambda = r.u16();
            e.dist = r.f32();
            g.edges.push_back(e);
        }
        total += degree;
    }
    g.offsets[g.n] = total;
    return g;
}

}  // namespace tsdg
