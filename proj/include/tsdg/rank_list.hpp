#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "tsdg/common.hpp"

namespace tsdg {

inline constexpr std::uint32_t kLaneWidth = 32;

/// Fixed 32-slot (id, dist) array. Sentinel slots are (kInvalidId, +inf).
/// Holds both per-hop lane scratch (unsorted) and per-search results
/// (sorted ascending after every merge).
struct RankList {
    std::array<IdDist, kLaneWidth> slot;

    RankList() { reset(); }
    void reset() { slot.fill(IdDist{}); }

    bool contains(NodeId id) const {
        for (const auto& e : slot) {
            if (e.id == id) return true;
        }
        return false;
    }

    bool operator==(const RankList&) const = default;
};

/// One candidate at a fixed lane position within a 32-wide group.
struct LaneEntry {
    std::uint32_t lane = 0;  // 0..31
    NodeId id = kInvalidId;
    float dist = kInfDist;
};

/// Per-lane running minimum: each batch element only competes with the slot
/// at its own lane. Lanes absent from the batch are untouched, so the
/// scratch is NOT the global top-32 of everything streamed through it.
void lane_update(RankList& r_temp, std::span<const LaneEntry> batch);

/// Half merge: the 16 smallest entries of r_temp (by (dist, id)) merge into
/// r_ij, which keeps the 32 closest distinct-id entries and stays sorted.
/// Sentinels never displace finite entries, and an id already present keeps
/// a single slot. Returns whether the multiset of r_ij entries changed;
/// false means no newcomer improved the pool, the search's stop signal.
bool merge_halves(RankList& r_ij, const RankList& r_temp);

}  // namespace tsdg
