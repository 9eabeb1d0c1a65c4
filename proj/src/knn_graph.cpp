#include "tsdg/knn_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "tsdg/serialize.hpp"

namespace tsdg {

namespace {

std::uint32_t clamp_k(std::uint32_t k, std::uint32_t n, const char* who) {
    if (n < 2) throw std::invalid_argument(std::string(who) + ": need at least 2 vectors");
    if (k < 1) throw std::invalid_argument(std::string(who) + ": k must be >= 1");
    if (k > n - 1) {
        std::cerr << who << ": k=" << k << " clamped to n-1=" << (n - 1) << "\n";
        return n - 1;
    }
    return k;
}

// Bounded running top-k by (dist, id) with distinct ids. The final content
// is the k minimum of everything offered, independent of offer order.
class BoundedPool {
public:
    explicit BoundedPool(std::uint32_t capacity) : cap_(capacity) {}

    bool offer(IdDist e) {
        for (const auto& have : entries_) {
            if (have.id == e.id) return false;
        }
        if (entries_.size() < cap_) {
            entries_.insert(std::upper_bound(entries_.begin(), entries_.end(), e,
                                             [](const IdDist& a, const IdDist& b) {
                                                 return closer(a, b);
                                             }),
                            e);
            return true;
        }
        if (!closer(e, entries_.back())) return false;
        entries_.pop_back();
        entries_.insert(std::upper_bound(entries_.begin(), entries_.end(), e,
                                         [](const IdDist& a, const IdDist& b) {
                                             return closer(a, b);
                                         }),
                        e);
        return true;
    }

    const std::vector<IdDist>& entries() const { return entries_; }

private:
    std::uint32_t cap_;
    std::vector<IdDist> entries_;  // sorted ascending by (dist, id)
};

}  // namespace

KnnGraph brute_force_knn(const VectorSet& set, std::uint32_t k, Metric metric) {
    require_metric_ready(set, metric);
    const std::uint32_t k_eff = clamp_k(k, set.n, "brute_force_knn");
    const DistanceKernel kernel = kernel_for(metric);

    KnnGraph g;
    g.n = set.n;
    g.k = k_eff;
    g.flat.resize(static_cast<std::size_t>(set.n) * k_eff);

#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(set.n); ++i) {
        BoundedPool pool(k_eff);
        const float* a = set.row(static_cast<std::uint32_t>(i));
        for (std::uint32_t j = 0; j < set.n; ++j) {
            if (j == static_cast<std::uint32_t>(i)) continue;
            pool.offer({j, kernel(a, set.row(j), set.d)});
        }
        auto out = g.row(static_cast<std::uint32_t>(i));
        std::copy(pool.entries().begin(), pool.entries().end(), out.begin());
    }
    return g;
}

namespace {

struct PoolEntry {
    IdDist nbr;
    bool is_new = true;
};

// Per-node neighbor pool for nn_descent. Same k-min semantics as
// BoundedPool, plus the "new" flag used by the local join sampling.
class DescentPool {
public:
    explicit DescentPool(std::uint32_t capacity) : cap_(capacity) {}

    bool offer(IdDist e) {
        for (const auto& have : entries_) {
            if (have.nbr.id == e.id) return false;
        }
        const PoolEntry pe{e, true};
        if (entries_.size() >= cap_) {
            if (!closer(e, entries_.back().nbr)) return false;
            entries_.pop_back();
        }
        entries_.insert(std::upper_bound(entries_.begin(), entries_.end(), pe,
                                         [](const PoolEntry& a, const PoolEntry& b) {
                                             return closer(a.nbr, b.nbr);
                                         }),
                        pe);
        return true;
    }

    std::vector<PoolEntry>& entries() { return entries_; }
    const std::vector<PoolEntry>& entries() const { return entries_; }

private:
    std::uint32_t cap_;
    std::vector<PoolEntry> entries_;
};

// Deterministic partial sample of `ids`: keeps `want` elements chosen by a
// seeded partial Fisher-Yates; output order follows the draw.
std::vector<NodeId> sample_ids(std::vector<NodeId> ids, std::size_t want, Rng64 rng) {
    if (ids.size() <= want) return ids;
    for (std::size_t i = 0; i < want; ++i) {
        const std::size_t j =
            i + rng.below(static_cast<std::uint32_t>(ids.size() - i));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(want);
    return ids;
}

}  // namespace

KnnGraph nn_descent(const VectorSet& set, std::uint32_t k, Metric metric,
                    std::uint32_t iterations, double sample_rate,
                    std::uint64_t rng_seed) {
    require_metric_ready(set, metric);
    if (sample_rate <= 0.0 || sample_rate > 1.0) {
        throw std::invalid_argument("nn_descent: sample_rate must be in (0, 1]");
    }
    const std::uint32_t k_eff = clamp_k(k, set.n, "nn_descent");
    const std::uint32_t n = set.n;
    const DistanceKernel kernel = kernel_for(metric);
    const Rng64 base(rng_seed);

    std::vector<DescentPool> pools(n, DescentPool(k_eff));

    // Random initial lists: k_eff distinct non-self neighbors per node.
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        const auto u = static_cast<NodeId>(i);
        Rng64 rng = base.fork(0).fork(u);
        std::uint32_t placed = 0;
        while (placed < k_eff) {
            const NodeId v = rng.below(n);
            if (v == u) continue;
            if (pools[u].offer({v, kernel(set.row(u), set.row(v), set.d)})) ++placed;
        }
    }

    const auto max_sample = static_cast<std::size_t>(
        std::max(1.0, std::round(sample_rate * static_cast<double>(k_eff))));

    auto locks = std::make_unique<std::mutex[]>(n);
    std::vector<std::vector<NodeId>> fwd_new(n), fwd_old(n), rev_new(n), rev_old(n);

    for (std::uint32_t it = 0; it < iterations; ++it) {
        // Sampling pass: pick the new/old join lists per node and flip the
        // sampled "new" flags. Serial scatter keeps reverse lists in node
        // order; determinism does not depend on thread count.
        for (NodeId u = 0; u < n; ++u) {
            std::vector<NodeId> flagged, unflagged;
            for (const auto& e : pools[u].entries()) {
                (e.is_new ? flagged : unflagged).push_back(e.nbr.id);
            }
            fwd_new[u] = sample_ids(std::move(flagged), max_sample,
                                    base.fork(1).fork(it).fork(u));
            fwd_old[u] = sample_ids(std::move(unflagged), max_sample,
                                    base.fork(2).fork(it).fork(u));
            for (auto& e : pools[u].entries()) {
                if (!e.is_new) continue;
                if (std::find(fwd_new[u].begin(), fwd_new[u].end(), e.nbr.id) !=
                    fwd_new[u].end()) {
                    e.is_new = false;
                }
            }
            rev_new[u].clear();
            rev_old[u].clear();
        }
        for (NodeId u = 0; u < n; ++u) {
            for (NodeId v : fwd_new[u]) rev_new[v].push_back(u);
            for (NodeId v : fwd_old[u]) rev_old[v].push_back(u);
        }

        // Local join: distances between the sampled lists, offered to both
        // endpoints. Pool updates commute, so the outcome is independent of
        // scheduling.
#pragma omp parallel for schedule(dynamic, 32)
        for (std::int64_t ui = 0; ui < static_cast<std::int64_t>(n); ++ui) {
            const auto u = static_cast<NodeId>(ui);
            std::vector<NodeId> join_new = fwd_new[u];
            auto rnew = sample_ids(rev_new[u], max_sample, base.fork(3).fork(it).fork(u));
            join_new.insert(join_new.end(), rnew.begin(), rnew.end());
            std::sort(join_new.begin(), join_new.end());
            join_new.erase(std::unique(join_new.begin(), join_new.end()), join_new.end());

            std::vector<NodeId> join_old = fwd_old[u];
            auto rold = sample_ids(rev_old[u], max_sample, base.fork(4).fork(it).fork(u));
            join_old.insert(join_old.end(), rold.begin(), rold.end());
            std::sort(join_old.begin(), join_old.end());
            join_old.erase(std::unique(join_old.begin(), join_old.end()), join_old.end());

            auto propose = [&](NodeId a, NodeId b) {
                if (a == b) return;
                const float dist = kernel(set.row(a), set.row(b), set.d);
                {
                    std::lock_guard<std::mutex> g(locks[a]);
                    pools[a].offer({b, dist});
                }
                {
                    std::lock_guard<std::mutex> g(locks[b]);
                    pools[b].offer({a, dist});
                }
            };
            for (std::size_t x = 0; x < join_new.size(); ++x) {
                for (std::size_t y = x + 1; y < join_new.size(); ++y) {
                    propose(join_new[x], join_new[y]);
                }
                for (NodeId b : join_old) propose(join_new[x], b);
            }
        }
    }

    KnnGraph g;
    g.n = n;
    g.k = k_eff;
    g.flat.resize(static_cast<std::size_t>(n) * k_eff);
    for (NodeId u = 0; u < n; ++u) {
        auto out = g.row(u);
        const auto& entries = pools[u].entries();
        for (std::uint32_t j = 0; j < k_eff; ++j) out[j] = entries[j].nbr;
    }
    return g;
}

double knn_graph_quality(const KnnGraph& graph, const VectorSet& set, Metric metric,
                         std::uint32_t sample_nodes, std::uint64_t seed) {
    const DistanceKernel kernel = kernel_for(metric);
    std::vector<NodeId> nodes;
    if (sample_nodes >= set.n) {
        nodes.resize(set.n);
        for (NodeId i = 0; i < set.n; ++i) nodes[i] = i;
    } else {
        Rng64 rng(seed);
        std::vector<bool> taken(set.n, false);
        while (nodes.size() < sample_nodes) {
            const NodeId v = rng.below(set.n);
            if (taken[v]) continue;
            taken[v] = true;
            nodes.push_back(v);
        }
    }

    std::uint64_t hits = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : hits)
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(nodes.size()); ++idx) {
        const NodeId u = nodes[static_cast<std::size_t>(idx)];
        BoundedPool exact(graph.k);
        for (NodeId v = 0; v < set.n; ++v) {
            if (v == u) continue;
            exact.offer({v, kernel(set.row(u), set.row(v), set.d)});
        }
        for (const auto& truth : exact.entries()) {
            for (const auto& have : graph.row(u)) {
                if (have.id == truth.id) {
                    ++hits;
                    break;
                }
            }
        }
    }
    return static_cast<double>(hits) /
           (static_cast<double>(nodes.size()) * static_cast<double>(graph.k));
}

void save_knng(const KnnGraph& graph, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    detail::LeWriter w(path, out);
    w.magic("KNNG");
    w.u32(1);  // version
    w.u64(graph.n);
    w.u32(graph.k);
    for (const auto& e : graph.flat) {
        w.u32(e.id);
        w.f32(e.dist);
    }
}

KnnGraph load_knng(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open for reading");
    detail::LeReader r(path, in);
    r.expect_magic("KNNG", "KNNG");
    const std::uint32_t version = r.u32();
    if (version != 1) {
        throw std::runtime_error(path + ": unsupported KNNG version " +
                                 std::to_string(version));
    }
    KnnGraph g;
    const std::uint64_t n = r.u64();
    g.n = static_cast<std::uint32_t>(n);
    g.k = r.u32();
    g.flat.resize(static_cast<std::size_t>(g.n) * g.k);
    for (auto& e : g.flat) {
        e.id = r.u32();
        e.dist = r.f32();
    }
    return g;
}

}  // namespace tsdg
