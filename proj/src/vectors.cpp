#include "tsdg/vectors.hpp"

#include <cmath>
#include <stdexcept>

namespace tsdg {

namespace {

float cosine_unit_kernel(const float* a, const float* b, std::uint32_t d) {
    return 1.0f - dot(a, b, d);
}

float neg_ip_kernel(const float* a, const float* b, std::uint32_t d) {
    return -dot(a, b, d);
}

}  // namespace

const char* metric_name(Metric m) {
    switch (m) {
        case Metric::L2: return "l2";
        case Metric::Cosine: return "cos";
        case Metric::InnerProduct: return "ip";
    }
    return "?";
}

Metric metric_from_name(const std::string& name) {
    if (name == "l2") return Metric::L2;
    if (name == "cos" || name == "cosine") return Metric::Cosine;
    if (name == "ip" || name == "innerproduct") return Metric::InnerProduct;
    throw std::invalid_argument("unknown metric '" + name + "' (expected l2, cos, or ip)");
}

DistanceKernel kernel_for(Metric metric) {
    switch (metric) {
        case Metric::L2: return &l2_sqr;
        case Metric::Cosine: return &cosine_unit_kernel;
        case Metric::InnerProduct: return &neg_ip_kernel;
    }
    throw std::invalid_argument("invalid metric");
}

float distance(std::span<const float> a, std::span<const float> b, Metric metric) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("distance: dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
    const auto d = static_cast<std::uint32_t>(a.size());
    switch (metric) {
        case Metric::L2:
            return l2_sqr(a.data(), b.data(), d);
        case Metric::Cosine: {
            const float na = std::sqrt(dot(a.data(), a.data(), d));
            const float nb = std::sqrt(dot(b.data(), b.data(), d));
            if (na == 0.0f || nb == 0.0f) {
                throw std::domain_error("distance: zero-norm vector under Cosine");
            }
            return 1.0f - dot(a.data(), b.data(), d) / (na * nb);
        }
        case Metric::InnerProduct:
            return -dot(a.data(), b.data(), d);
    }
    throw std::invalid_argument("invalid metric");
}

VectorSet normalized_copy(const VectorSet& set) {
    VectorSet out = set;
    for (std::uint32_t i = 0; i < set.n; ++i) {
        float* r = out.data.data() + static_cast<std::size_t>(i) * set.d;
        const float norm = std::sqrt(dot(r, r, set.d));
        if (norm == 0.0f) {
            throw std::domain_error("normalized_copy: zero-norm vector at row " +
                                    std::to_string(i));
        }
        for (std::uint32_t j = 0; j < set.d; ++j) r[j] /= norm;
    }
    return out;
}

void require_metric_ready(const VectorSet& set, Metric metric) {
    if (metric != Metric::Cosine) return;
    for (std::uint32_t i = 0; i < set.n; ++i) {
        const float* r = set.row(i);
        const float sq = dot(r, r, set.d);
        if (std::fabs(sq - 1.0f) > 1e-4f) {
            throw std::invalid_argument(
                "Cosine requires unit-normalized vectors (row " + std::to_string(i) +
                " has squared norm " + std::to_string(sq) +
                "); pass the set through normalized_copy first");
        }
    }
}

void require_finite(const VectorSet& set, const std::string& context) {
    for (std::size_t i = 0; i < set.data.size(); ++i) {
        if (!std::isfinite(set.data[i])) {
            throw std::runtime_error(context + ": non-finite component at element " +
                                     std::to_string(i));
        }
    }
}

}  // namespace tsdg
