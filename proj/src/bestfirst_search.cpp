#include "tsdg/bestfirst_search.hpp"

#include <stdexcept>
#include <unordered_set>

#include <set>

namespace tsdg {

namespace {

// Unbounded stand-ins for the segmented structures; same interface, exact
// behavior of a conventional priority queue / visited set.
class UnboundedQueue {
public:
    explicit UnboundedQueue(std::uint32_t) {}

    void push(NodeId id, float dist) {
        entries_.insert({dist, id});
        present_.insert(id);
    }
    std::optional<IdDist> pop_min() {
        if (entries_.empty()) return std::nullopt;
        const auto it = entries_.begin();
        const IdDist e{it->second, it->first};
        entries_.erase(it);
        present_.erase(e.id);
        return e;
    }
    bool contains(NodeId id) const { return present_.count(id) != 0; }
    bool empty() const { return entries_.empty(); }
    std::uint64_t evictions() const { return 0; }

private:
    std::set<std::pair<float, NodeId>> entries_;
    std::unordered_set<NodeId> present_;
};

class UnboundedVisited {
public:
    explicit UnboundedVisited(std::uint32_t) {}
    void add(NodeId id) { ids_.insert(id); }
    bool contains(NodeId id) const { return ids_.count(id) != 0; }

private:
    std::unordered_set<NodeId> ids_;
};

template <class Queue, class Visited>
std::vector<NodeId> search_impl(const TsdgGraph& graph, const VectorSet& set,
                                std::span<const float> query,
                                const BestFirstParams& params, Rng64& rng,
                                SearchStats* stats, EdgeTrace* trace) {
    const DistanceKernel kernel = kernel_for(graph.metric);
    std::uint64_t evals = 0;

    IdDist start;
    for (std::uint32_t i = 0; i < 32; ++i) {
        const NodeId v = rng.below(graph.n);
        const IdDist cand{v, kernel(query.data(), set.row(v), set.d)};
        if (closer(cand, start)) start = cand;
    }
    evals += 32;

    TopK results(params.k);
    Queue queue(params.m_segments);
    Visited visited(params.m_segments);

    results.push(start.id, start.dist);
    queue.push(start.id, start.dist);

    std::uint32_t t = 0;
    while (!queue.empty() && t < params.hop_limit) {
        ++t;
        const auto popped = queue.pop_min();
        if (!popped) break;
        const NodeId u = popped->id;

        if (popped->dist > results.furthest().dist + params.delta) break;

        visited.add(u);
        if (trace) trace->expanded.push_back(u);

        for (const auto& edge : graph.neighbors_below(u, params.lambda_cut)) {
            const NodeId e = edge.target;
            if (trace) trace->examined.emplace_back(u, e);
            if (visited.contains(e) || queue.contains(e)) continue;

            const float dist = kernel(query.data(), set.row(e), set.d);
            ++evals;
            if (dist < results.furthest().dist || results.size() < params.k) {
                results.push(e, dist);
                queue.push(e, dist);
                if (results.size() > params.k) results.pop_furthest();
            }
        }
    }

    if (stats) {
        stats->hops += t;
        stats->distance_evals += evals;
        stats->queue_evictions += queue.evictions();
    }
    std::vector<NodeId> out;
    out.reserve(results.size());
    for (const auto& e : results.sorted_ascending()) out.push_back(e.id);
    return out;
}

}  // namespace

std::vector<NodeId> bestfirst_search(const TsdgGraph& graph, const VectorSet& set,
                                     std::span<const float> query,
                                     const BestFirstParams& params, Rng64 rng,
                                     SearchStats* stats, EdgeTrace* trace) {
    if (graph.n == 0) throw std::invalid_argument("bestfirst_search: empty graph");
    if (params.k < 1 || params.hop_limit < 1 || params.m_segments < 1 ||
        params.lambda_cut < 1 || params.delta < 0.0f) {
        throw std::invalid_argument("bestfirst_search: invalid parameters");
    }
    if (params.unbounded) {
        return search_impl<UnboundedQueue, UnboundedVisited>(graph, set, query, params,
                                                             rng, stats, trace);
    }
    return search_impl<SegmentedQueue, SegmentedVisited>(graph, set, query, params, rng,
                                                         stats, trace);
}

std::vector<std::vector<NodeId>> large_batch_search(const TsdgGraph& graph,
                                                    const VectorSet& set,
                                                    const VectorSet& queries,
                                                    const BestFirstParams& params,
                                                    SearchStats* stats) {
    if (queries.d != set.d) throw std::invalid_argument("large_batch_search: dim mismatch");
    require_metric_ready(queries, graph.metric);
    const Rng64 base(params.seed);

    std::vector<std::vector<NodeId>> results(queries.n);
    std::vector<SearchStats> per_query(queries.n);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t qi = 0; qi < static_cast<std::int64_t>(queries.n); ++qi) {
        const auto q = static_cast<std::uint32_t>(qi);
        results[q] = bestfirst_search(graph, set, queries.vec(q), params, base.fork(q),
                                      &per_query[q]);
    }
    if (stats) {
        for (const auto& s : per_query) *stats += s;
    }
    return results;
}

}  // namespace tsdg
