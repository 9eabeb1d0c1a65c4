#include "tsdg/segmented.hpp"

#include <algorithm>
#include <stdexcept>

namespace tsdg {

SegmentedQueue::SegmentedQueue(std::uint32_t m_segments) {
    if (m_segments < 1) throw std::invalid_argument("SegmentedQueue: need >= 1 segment");
    segments_.resize(m_segments);
}

void SegmentedQueue::push(NodeId id, float dist) {
    Segment& seg = segments_[id % segments_.size()];
    const IdDist e{id, dist};

    if (seg.size == kSegmentWidth) {
        // Full: the most distant of (segment, incoming) is discarded.
        if (!closer(e, seg.slot[seg.size - 1])) {
            ++evictions_;
            return;
        }
        seg.size--;
        size_--;
        ++evictions_;
    }
    const auto begin = seg.slot.begin();
    const auto end = begin + seg.size;
    const auto pos = std::upper_bound(begin, end, e, closer);
    for (auto it = end; it != pos; --it) *it = *(it - 1);
    *pos = e;
    seg.size++;
    size_++;
}

std::optional<IdDist> SegmentedQueue::pop_min() {
    std::size_t best_idx = segments_.size();
    IdDist best;
    for (std::size_t s = 0; s < segments_.size(); ++s) {
        const Segment& seg = segments_[s];
        if (seg.size != 0 && closer(seg.slot[0], best)) {
            best = seg.slot[0];
            best_idx = s;
        }
    }
    if (best_idx == segments_.size()) return std::nullopt;

    Segment& seg = segments_[best_idx];
    for (std::uint32_t i = 1; i < seg.size; ++i) seg.slot[i - 1] = seg.slot[i];
    seg.size--;
    size_--;
    return best;
}

bool SegmentedQueue::contains(NodeId id) const {
    const Segment& seg = segments_[id % segments_.size()];
    for (std::uint32_t i = 0; i < seg.size; ++i) {
        if (seg.slot[i].id == id) return true;
    }
    return false;
}

SegmentedVisited::SegmentedVisited(std::uint32_t m_segments) {
    if (m_segments < 1) throw std::invalid_argument("SegmentedVisited: need >= 1 segment");
    segments_.resize(m_segments);
}

void SegmentedVisited::add(NodeId id) {
    Segment& seg = segments_[id % segments_.size()];
    for (std::uint32_t i = 0; i < seg.size; ++i) {
        if (seg.slot[i] == id) return;
    }
    if (seg.size < kSegmentWidth) {
        seg.slot[seg.size++] = id;
        return;
    }
    seg.slot[seg.oldest] = id;
    seg.oldest = (seg.oldest + 1) % kSegmentWidth;
}

bool SegmentedVisited::contains(NodeId id) const {
    const Segment& seg = segments_[id % segments_.size()];
    for (std::uint32_t i = 0; i < seg.size; ++i) {
        if (seg.slot[i] == id) return true;
    }
    return false;
}

TopK::TopK(std::uint32_t k) : k_(k) {
    if (k < 1) throw std::invalid_argument("TopK: k must be >= 1");
    entries_.reserve(k + 1);
}

bool TopK::push(NodeId id, float dist) {
    for (const auto& e : entries_) {
        if (e.id == id) return false;
    }
    const IdDist e{id, dist};
    entries_.insert(std::upper_bound(entries_.begin(), entries_.end(), e, closer), e);
    return true;
}

void TopK::pop_furthest() {
    if (entries_.empty()) throw std::logic_error("TopK: pop on empty pool");
    entries_.pop_back();
}

IdDist TopK::furthest() const {
    if (entries_.empty()) return IdDist{};
    return entries_.back();
}

}  // namespace tsdg
