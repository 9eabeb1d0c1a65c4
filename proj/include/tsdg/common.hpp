#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace tsdg {

using NodeId = std::uint32_t;

inline constexpr NodeId kInvalidId = std::numeric_limits<NodeId>::max();
inline constexpr float kInfDist = std::numeric_limits<float>::infinity();

/// An (id, distance) pair. The global tie rule is (dist, id) ascending.
struct IdDist {
    NodeId id = kInvalidId;
    float dist = kInfDist;

    bool operator==(const IdDist&) const = default;
};

inline bool closer(const IdDist& a, const IdDist& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.id < b.id;
}

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// splitmix64 generator. Hand-rolled so that streams are reproducible
/// across standard libraries and across thread counts.
class Rng64 {
public:
    explicit Rng64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform integer in [0, n). n must be >= 1.
    std::uint32_t below(std::uint32_t n) {
        return static_cast<std::uint32_t>(next() % n);
    }

    /// Uniform double in [0, 1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Derives an independent stream; fork(i) depends only on the current
    /// state and i, so per-index streams do not shift when other indices
    /// are added or removed.
    Rng64 fork(std::uint64_t index) const {
        return Rng64(mix64(state_ ^ (0xD1B54A32D192ED03ULL * (index + 1))));
    }

private:
    std::uint64_t state_;
};

}  // namespace tsdg
