#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tsdg/common.hpp"

namespace tsdg {

/// Dissimilarity measures. All three are min-oriented: smaller means closer.
///   L2           -> squared Euclidean distance
///   Cosine       -> 1 - cos(a, b)
///   InnerProduct -> -(a . b)
enum class Metric : std::uint8_t { L2 = 0, Cosine = 1, InnerProduct = 2 };

const char* metric_name(Metric m);
Metric metric_from_name(const std::string& name);

/// Dense row-contiguous float32 vectors. Immutable after load; safe for
/// unrestricted concurrent reads.
struct VectorSet {
    std::uint32_t n = 0;
    std::uint32_t d = 0;
    std::vector<float> data;  // n * d

    const float* row(std::uint32_t i) const {
        return data.data() + static_cast<std::size_t>(i) * d;
    }
    std::span<const float> vec(std::uint32_t i) const { return {row(i), d}; }

    bool operator==(const VectorSet&) const = default;
};

inline float l2_sqr(const float* a, const float* b, std::uint32_t d) {
    float acc = 0.0f;
    for (std::uint32_t i = 0; i < d; ++i) {
        const float diff = a[i] - b[i];
        acc += diff * diff;
    }
    return acc;
}

inline float dot(const float* a, const float* b, std::uint32_t d) {
    float acc = 0.0f;
    for (std::uint32_t i = 0; i < d; ++i) acc += a[i] * b[i];
    return acc;
}

using DistanceKernel = float (*)(const float*, const float*, std::uint32_t);

/// Raw kernel per metric. The Cosine kernel assumes unit-normalized inputs
/// (see normalized_copy); L2 is the squared distance.
DistanceKernel kernel_for(Metric metric);

/// General-input distance. Validates dimensions; Cosine normalizes on the
/// fly and rejects zero-norm vectors.
float distance(std::span<const float> a, std::span<const float> b, Metric metric);

/// Unit-normalizes every row. Throws if any row has zero norm; this is the
/// index-build-time rejection point for Cosine pipelines.
VectorSet normalized_copy(const VectorSet& set);

/// Throws unless metric != Cosine or every row is unit-normalized within
/// tolerance. Build and search entry points call this.
void require_metric_ready(const VectorSet& set, Metric metric);

/// Rejects NaN/Inf components; loaders call this, naming the byte offset.
void require_finite(const VectorSet& set, const std::string& context);

}  // namespace tsdg
