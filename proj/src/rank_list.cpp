#include "tsdg/rank_list.hpp"

#include <algorithm>
#include <stdexcept>

namespace tsdg {

void lane_update(RankList& r_temp, std::span<const LaneEntry> batch) {
    if (batch.size() > kLaneWidth) {
        throw std::invalid_argument("lane_update: batch wider than 32 lanes");
    }
    for (const auto& e : batch) {
        if (e.lane >= kLaneWidth) throw std::invalid_argument("lane_update: lane out of range");
        if (e.dist < r_temp.slot[e.lane].dist) {
            r_temp.slot[e.lane] = {e.id, e.dist};
        }
    }
}

bool merge_halves(RankList& r_ij, const RankList& r_temp) {
    constexpr std::uint32_t kHalf = kLaneWidth / 2;

    std::array<IdDist, kLaneWidth> incoming = r_temp.slot;
    std::sort(incoming.begin(), incoming.end(), closer);

    const RankList before = r_ij;  // sorted ascending per contract

    // Pool the current entries with the 16 best finite newcomers (id-dedup
    // keeps the closer copy), then retain the 32 closest. Sentinels never
    // displace finite entries this way, and a merge that brings nothing new
    // leaves the list untouched, which is the convergence signal.
    std::vector<IdDist> pool(before.slot.begin(), before.slot.end());
    for (std::uint32_t i = 0; i < kHalf; ++i) {
        const IdDist& e = incoming[i];
        if (e.id == kInvalidId) break;  // sorted, only sentinels remain
        const auto it = std::find_if(pool.begin(), pool.end(),
                                     [&](const IdDist& p) { return p.id == e.id; });
        if (it == pool.end()) {
            pool.push_back(e);
        } else if (closer(e, *it)) {
            *it = e;
        }
    }
    std::sort(pool.begin(), pool.end(), closer);
    std::copy_n(pool.begin(), kLaneWidth, r_ij.slot.begin());

    // "Updated" compares multisets, so a pure reordering does not count.
    return before.slot != r_ij.slot;
}

}  // namespace tsdg
