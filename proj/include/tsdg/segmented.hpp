#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tsdg/common.hpp"

namespace tsdg {

inline constexpr std::uint32_t kSegmentWidth = 32;

/// Expansion queue: m segments of 32 slots; id e lives in segment e % m,
/// each segment sorted ascending by (dist, id). Pushing into a full segment
/// discards the segment's most distant element, possibly the incoming one.
/// This lossiness is part of the contract.
class SegmentedQueue {
public:
    explicit SegmentedQueue(std::uint32_t m_segments);

    /// Precondition: !contains(id).
    void push(NodeId id, float dist);
    /// Global minimum across segment heads; empty queue yields nullopt.
    std::optional<IdDist> pop_min();
    bool contains(NodeId id) const;

    bool empty() const { return size_ == 0; }
    std::uint64_t size() const { return size_; }
    std::uint64_t evictions() const { return evictions_; }

private:
    struct Segment {
        std::array<IdDist, kSegmentWidth> slot;
        std::uint32_t size = 0;
    };
    std::vector<Segment> segments_;
    std::uint64_t size_ = 0;
    std::uint64_t evictions_ = 0;
};

/// Visited table: m segments of 32 slots; id e lives in segment e % m as an
/// unsorted FIFO ring. A full segment overwrites its oldest entry; adding a
/// present id is a no-op and does not refresh its age.
class SegmentedVisited {
public:
    explicit SegmentedVisited(std::uint32_t m_segments);

    void add(NodeId id);
    bool contains(NodeId id) const;

private:
    struct Segment {
        std::array<NodeId, kSegmentWidth> slot;
        std::uint32_t size = 0;
        std::uint32_t oldest = 0;  // ring cursor once full
    };
    std::vector<Segment> segments_;
};

/// Bounded result pool: at most k (id, dist) entries, distinct ids, with
/// access to the furthest element.
class TopK {
public:
    explicit TopK(std::uint32_t k);

    /// No-op if the id is already held. Does NOT enforce the bound; callers
    /// pop the furthest element when size() exceeds k.
    bool push(NodeId id, float dist);
    void pop_furthest();
    IdDist furthest() const;

    std::uint32_t size() const { return static_cast<std::uint32_t>(entries_.size()); }
    std::uint32_t capacity() const { return k_; }
    /// Entries ascending by (dist, id).
    const std::vector<IdDist>& sorted_ascending() const { return entries_; }

private:
    std::uint32_t k_;
    std::vector<IdDist> entries_;  // sorted ascending
};

}  // namespace tsdg
