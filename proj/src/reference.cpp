#include "tsdg/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsdg::ref {

namespace {

double accumulate(const float* a, const float* b, std::uint32_t d, Metric metric) {
    switch (metric) {
        case Metric::L2: {
            double acc = 0.0;
            for (std::uint32_t i = 0; i < d; ++i) {
                const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
                acc += diff * diff;
            }
            return acc;
        }
        case Metric::Cosine: {
            double ab = 0.0;
            for (std::uint32_t i = 0; i < d; ++i) {
                ab += static_cast<double>(a[i]) * static_cast<double>(b[i]);
            }
            return 1.0 - ab;  // unit-normalized inputs
        }
        case Metric::InnerProduct: {
            double ab = 0.0;
            for (std::uint32_t i = 0; i < d; ++i) {
                ab += static_cast<double>(a[i]) * static_cast<double>(b[i]);
            }
            return -ab;
        }
    }
    throw std::invalid_argument("invalid metric");
}

float flat_distance(const float* a, const float* b, std::uint32_t d, Metric metric) {
    switch (metric) {
        case Metric::L2: {
            float acc = 0.0f;
            for (std::uint32_t i = 0; i < d; ++i) {
                const float diff = a[i] - b[i];
                acc += diff * diff;
            }
            return acc;
        }
        case Metric::Cosine: {
            float ab = 0.0f;
            for (std::uint32_t i = 0; i < d; ++i) ab += a[i] * b[i];
            return 1.0f - ab;
        }
        case Metric::InnerProduct: {
            float ab = 0.0f;
            for (std::uint32_t i = 0; i < d; ++i) ab += a[i] * b[i];
            return -ab;
        }
    }
    throw std::invalid_argument("invalid metric");
}

}  // namespace

double slow_distance(const VectorSet& set, NodeId a, NodeId b, Metric metric) {
    return accumulate(set.row(a), set.row(b), set.d, metric);
}

std::vector<IdDist> exact_neighbors(const VectorSet& set, NodeId node, std::uint32_t k,
                                    Metric metric) {
    std::vector<IdDist> all;
    all.reserve(set.n - 1);
    for (NodeId v = 0; v < set.n; ++v) {
        if (v == node) continue;
        all.push_back({v, flat_distance(set.row(node), set.row(v), set.d, metric)});
    }
    std::stable_sort(all.begin(), all.end(), closer);
    if (all.size() > k) all.resize(k);
    return all;
}

KnnGraph exact_knn(const VectorSet& set, std::uint32_t k, Metric metric) {
    if (set.n < 2) throw std::invalid_argument("exact_knn: need at least 2 vectors");
    const std::uint32_t k_eff = std::min(k, set.n - 1);
    KnnGraph g;
    g.n = set.n;
    g.k = k_eff;
    g.flat.resize(static_cast<std::size_t>(set.n) * k_eff);
    for (NodeId u = 0; u < set.n; ++u) {
        const auto nbrs = exact_neighbors(set, u, k_eff, metric);
        std::copy(nbrs.begin(), nbrs.end(), g.row(u).begin());
    }
    return g;
}

std::vector<std::vector<IdDist>> exact_topk(const VectorSet& base,
                                            const VectorSet& queries, std::uint32_t k,
                                            Metric metric) {
    std::vector<std::vector<IdDist>> out(queries.n);
    for (std::uint32_t q = 0; q < queries.n; ++q) {
        std::vector<IdDist> all;
        all.reserve(base.n);
        for (NodeId v = 0; v < base.n; ++v) {
            all.push_back({v, flat_distance(queries.row(q), base.row(v), base.d, metric)});
        }
        std::stable_sort(all.begin(), all.end(), closer);
        if (all.size() > k) all.resize(k);
        out[q] = std::move(all);
    }
    return out;
}

std::vector<std::uint32_t> lambda_counts(std::span<const CandidateEdge> candidates,
                                         const VectorSet& set, Metric metric) {
    const std::size_t m = candidates.size();
    std::vector<std::uint32_t> counts(m, 0);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            if (i == j) continue;
            const float d0i = candidates[i].dist;
            const float d0j = candidates[j].dist;
            const float dij = flat_distance(set.row(candidates[i].target),
                                            set.row(candidates[j].target), set.d, metric);
            if (d0i < d0j && dij < d0j) counts[j]++;
        }
    }
    return counts;
}

double recall(const std::vector<std::vector<NodeId>>& results,
              const std::vector<std::vector<NodeId>>& truth, std::uint32_t k) {
    if (results.size() != truth.size()) {
        throw std::invalid_argument("recall: query count mismatch");
    }
    std::uint64_t hits = 0;
    for (std::size_t q = 0; q < results.size(); ++q) {
        for (std::size_t i = 0; i < results[q].size() && i < k; ++i) {
            for (std::size_t j = 0; j < truth[q].size() && j < k; ++j) {
                if (results[q][i] == truth[q][j]) {
                    ++hits;
                    break;
                }
            }
        }
    }
    return static_cast<double>(hits) / (static_cast<double>(results.size()) * k);
}

QueueModel::QueueModel(std::uint32_t m_segments, std::uint32_t width)
    : width_(width), segments_(m_segments) {}

void QueueModel::push(NodeId id, float dist) {
    auto& seg = segments_[id % segments_.size()];
    const IdDist e{id, dist};
    seg.insert(std::upper_bound(seg.begin(), seg.end(), e, closer), e);
    if (seg.size() > width_) seg.pop_back();
}

std::optional<IdDist> QueueModel::pop_min() {
    std::size_t best = segments_.size();
    for (std::size_t s = 0; s < segments_.size(); ++s) {
        if (segments_[s].empty()) continue;
        if (best == segments_.size() || closer(segments_[s].front(), segments_[best].front())) {
            best = s;
        }
    }
    if (best == segments_.size()) return std::nullopt;
    const IdDist e = segments_[best].front();
    segments_[best].erase(segments_[best].begin());
    return e;
}

bool QueueModel::contains(NodeId id) const {
    for (const auto& e : segments_[id % segments_.size()]) {
        if (e.id == id) return true;
    }
    return false;
}

bool QueueModel::empty() const { return size() == 0; }

std::uint64_t QueueModel::size() const {
    std::uint64_t total = 0;
    for (const auto& seg : segments_) total += seg.size();
    return total;
}

VisitedModel::VisitedModel(std::uint32_t m_segments, std::uint32_t width)
    : width_(width), segments_(m_segments) {}

void VisitedModel::add(NodeId id) {
    auto& seg = segments_[id % segments_.size()];
    if (std::find(seg.begin(), seg.end(), id) != seg.end()) return;
    if (seg.size() == width_) seg.erase(seg.begin());
    seg.push_back(id);
}

bool VisitedModel::contains(NodeId id) const {
    const auto& seg = segments_[id % segments_.size()];
    return std::find(seg.begin(), seg.end(), id) != seg.end();
}

}  // namespace tsdg::ref
