#include "tsdg/greedy_search.hpp"

#include <algorithm>
#include <stdexcept>

namespace tsdg {

namespace {
constexpr std::uint32_t kStartDraws = 32;
}

NodeId select_start(const TsdgGraph& graph, const VectorSet& set,
                    std::span<const float> query, Rng64& rng, SearchStats* stats) {
    if (graph.n == 0) throw std::invalid_argument("select_start: empty graph");
    const DistanceKernel kernel = kernel_for(graph.metric);

    IdDist best;
    for (std::uint32_t i = 0; i < kStartDraws; ++i) {
        const NodeId v = rng.below(graph.n);
        const IdDist cand{v, kernel(query.data(), set.row(v), set.d)};
        if (closer(cand, best)) best = cand;
    }
    if (stats) stats->distance_evals += kStartDraws;
    return best.id;
}

RankList greedy_search_once(const TsdgGraph& graph, const VectorSet& set,
                            std::span<const float> query, const GreedyParams& params,
                            Rng64 rng, SearchStats* stats) {
    if (params.lambda_cut < 1) {
        throw std::invalid_argument("greedy_search_once: lambda_cut must be >= 1");
    }
    if (params.hop_limit < 1) {
        throw std::invalid_argument("greedy_search_once: hop limit must be >= 1");
    }
    const DistanceKernel kernel = kernel_for(graph.metric);

    NodeId u = select_start(graph, set, query, rng, stats);
    RankList r_ij;
    RankList r_temp;
    std::array<LaneEntry, kLaneWidth> batch;

    bool improved = true;
    std::uint32_t t = 0;
    while (improved && t < params.hop_limit) {
        ++t;
        r_temp.reset();

        const auto nbrs = graph.neighbors_below(u, params.lambda_cut);
        for (std::size_t base = 0; base < nbrs.size(); base += kLaneWidth) {
            const auto width =
                static_cast<std::uint32_t>(std::min<std::size_t>(kLaneWidth, nbrs.size() - base));
            for (std::uint32_t lane = 0; lane < width; ++lane) {
                const NodeId v = nbrs[base + lane].target;
                batch[lane] = {lane, v, kernel(query.data(), set.row(v), set.d)};
            }
            lane_update(r_temp, std::span<const LaneEntry>(batch.data(), width));
        }
        if (stats) stats->distance_evals += nbrs.size();

        const bool updated = merge_halves(r_ij, r_temp);

        IdDist next;
        for (const auto& e : r_temp.slot) {
            if (closer(e, next)) next = e;
        }
        if (next.id != kInvalidId) u = next.id;
        improved = updated;
    }
    if (stats) stats->hops += t;
    return r_ij;
}

std::vector<NodeId> small_batch_search_one(const TsdgGraph& graph, const VectorSet& set,
                                           std::span<const float> query, std::uint32_t k,
                                           const GreedyParams& params,
                                           SearchStats* stats) {
    if (k < 1) throw std::invalid_argument("small_batch_search: k must be >= 1");
    if (params.t0 < 1) throw std::invalid_argument("small_batch_search: t0 must be >= 1");
    if (k > kLaneWidth * params.t0) {
        throw std::invalid_argument("small_batch_search: k exceeds 32 * t0");
    }
    const Rng64 base(params.seed);

    std::vector<IdDist> pool;
    pool.reserve(static_cast<std::size_t>(params.t0) * kLaneWidth);
    for (std::uint32_t s = 0; s < params.t0; ++s) {
        const RankList r = greedy_search_once(graph, set, query, params, base.fork(s), stats);
        for (const auto& e : r.slot) {
            if (e.id != kInvalidId) pool.push_back(e);
        }
    }

    std::sort(pool.begin(), pool.end(), closer);
    pool.erase(std::unique(pool.begin(), pool.end(),
                           [](const IdDist& a, const IdDist& b) { return a.id == b.id; }),
               pool.end());
    // Equal ids carry equal distances, so sorting by (dist, id) first makes
    // unique() keep the smallest-distance copy.
    std::vector<NodeId> out;
    out.reserve(std::min<std::size_t>(k, pool.size()));
    for (std::size_t i = 0; i < pool.size() && i < k; ++i) out.push_back(pool[i].id);
    return out;
}

std::vector<std::vector<NodeId>> small_batch_search(const TsdgGraph& graph,
                                                    const VectorSet& set,
                                                    const VectorSet& queries,
                                                    std::uint32_t k,
                                                    const GreedyParams& params,
                                                    SearchStats* stats) {
    if (queries.d != set.d) throw std::invalid_argument("small_batch_search: dim mismatch");
    require_metric_ready(queries, graph.metric);

    std::vector<std::vector<NodeId>> results(queries.n);
    std::vector<SearchStats> per_query(queries.n);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t qi = 0; qi < static_cast<std::int64_t>(queries.n); ++qi) {
        const auto q = static_cast<std::uint32_t>(qi);
        results[q] = small_batch_search_one(graph, set, queries.vec(q), k, params,
                                            &per_query[q]);
    }
    if (stats) {
        for (const auto& s : per_query) *stats += s;
    }
    return results;
}

}  // namespace tsdg
