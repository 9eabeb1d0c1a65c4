#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "tsdg/knn_graph.hpp"
#include "tsdg/reference.hpp"

using namespace tsdg;

namespace {

VectorSet from_values(std::uint32_t d, std::vector<float> values) {
    VectorSet set;
    set.d = d;
    set.n = static_cast<std::uint32_t>(values.size()) / d;
    set.data = std::move(values);
    return set;
}

VectorSet random_set(std::uint32_t n, std::uint32_t d, std::uint64_t seed) {
    VectorSet set;
    set.n = n;
    set.d = d;
    set.data.resize(static_cast<std::size_t>(n) * d);
    Rng64 rng(seed);
    for (auto& v : set.data) v = static_cast<float>(rng.unit());
    return set;
}

// Structural contract shared by both builders.
void check_knn_invariants(const KnnGraph& g, const VectorSet& set, Metric metric) {
    REQUIRE(g.n == set.n);
    REQUIRE(g.k == std::min(g.k, set.n - 1));
    const auto kernel = kernel_for(metric);
    for (NodeId u = 0; u < g.n; ++u) {
        const auto row = g.row(u);
        for (std::size_t j = 0; j < row.size(); ++j) {
            CHECK(row[j].id != u);
            CHECK(row[j].id < g.n);
            if (j > 0) CHECK(closer(row[j - 1], row[j]));
            const float expect = kernel(set.row(u), set.row(row[j].id), set.d);
            CHECK(row[j].dist == doctest::Approx(expect).epsilon(1e-5));
        }
    }
}

double overlap_with_exact(const KnnGraph& g, const VectorSet& set, Metric metric) {
    std::uint64_t hits = 0;
    for (NodeId u = 0; u < g.n; ++u) {
        const auto truth = ref::exact_neighbors(set, u, g.k, metric);
        for (const auto& t : truth) {
            for (const auto& e : g.row(u)) {
                if (e.id == t.id) {
                    ++hits;
                    break;
                }
            }
        }
    }
    return static_cast<double>(hits) / (static_cast<double>(g.n) * g.k);
}

}  // namespace

TEST_SUITE("knngraph") {

TEST_CASE("brute force: three collinear points, k=1") {
    const auto set = from_values(1, {0.0f, 1.0f, 3.0f});
    const auto g = brute_force_knn(set, 1, Metric::L2);
    CHECK(g.row(0)[0].id == 1);
    CHECK(g.row(1)[0].id == 0);
    CHECK(g.row(2)[0].id == 1);
}

TEST_CASE("brute force: k clamps to n-1") {
    const auto set = from_values(1, {0.0f, 2.0f});
    const auto g = brute_force_knn(set, 5, Metric::L2);
    CHECK(g.k == 1);
    CHECK(g.row(0)[0].id == 1);
    CHECK(g.row(1)[0].id == 0);

    const auto single = from_values(1, {0.0f});
    CHECK_THROWS_AS(brute_force_knn(single, 1, Metric::L2), std::invalid_argument);
}

TEST_CASE("brute force matches the exhaustive-scan reference exactly") {
    const auto set = random_set(100, 8, 17);
    const auto g = brute_force_knn(set, 10, Metric::L2);
    const auto expect = ref::exact_knn(set, 10, Metric::L2);
    check_knn_invariants(g, set, Metric::L2);
    for (NodeId u = 0; u < g.n; ++u) {
        for (std::uint32_t j = 0; j < g.k; ++j) {
            CHECK(g.row(u)[j].id == expect.row(u)[j].id);
        }
    }
}

TEST_CASE("brute force is invariant under row permutation up to relabeling") {
    const auto set = random_set(60, 6, 23);
    const auto g = brute_force_knn(set, 5, Metric::L2);

    // Reverse the rows; node i becomes node n-1-i.
    VectorSet permuted;
    permuted.n = set.n;
    permuted.d = set.d;
    permuted.data.resize(set.data.size());
    for (NodeId i = 0; i < set.n; ++i) {
        std::copy_n(set.row(set.n - 1 - i), set.d,
                    permuted.data.begin() + static_cast<std::size_t>(i) * set.d);
    }
    const auto h = brute_force_knn(permuted, 5, Metric::L2);
    for (NodeId u = 0; u < set.n; ++u) {
        const auto a = g.row(u);
        const auto b = h.row(set.n - 1 - u);
        for (std::uint32_t j = 0; j < g.k; ++j) {
            CHECK(a[j].id == set.n - 1 - b[j].id);
            CHECK(a[j].dist == b[j].dist);
        }
    }
}

TEST_CASE("nn_descent: quality floor on a small set") {
    const auto set = random_set(300, 12, 31);
    const auto g = nn_descent(set, 20, Metric::L2, 10, 1.0, 7);
    check_knn_invariants(g, set, Metric::L2);
    CHECK(overlap_with_exact(g, set, Metric::L2) >= 0.90);
}

TEST_CASE("nn_descent: zero iterations still satisfies structure") {
    const auto set = random_set(50, 4, 37);
    const auto g = nn_descent(set, 8, Metric::L2, 0, 1.0, 7);
    check_knn_invariants(g, set, Metric::L2);
    for (NodeId u = 0; u < g.n; ++u) {
        CHECK(g.row(u).size() == 8);
    }
}

TEST_CASE("nn_descent: deterministic under the seed") {
    const auto set = random_set(120, 8, 41);
    const auto a = nn_descent(set, 10, Metric::L2, 1, 0.7, 99);
    const auto b = nn_descent(set, 10, Metric::L2, 1, 0.7, 99);
    CHECK(a == b);
    const auto c = nn_descent(set, 10, Metric::L2, 1, 0.7, 100);
    CHECK(a != c);
}

TEST_CASE("nn_descent: quality non-decreasing in iterations") {
    const auto set = random_set(1000, 10, 43);
    double prev = -1.0;
    for (std::uint32_t iters : {1u, 2u, 4u, 8u}) {
        const auto g = nn_descent(set, 10, Metric::L2, iters, 1.0, 5);
        const double q = overlap_with_exact(g, set, Metric::L2);
        CHECK(q >= prev);
        prev = q;
    }
    CHECK(prev >= 0.90);  // 8 iterations at full sampling should be close to exact
}

TEST_CASE("nn_descent: rejects bad sample rates") {
    const auto set = random_set(20, 4, 47);
    CHECK_THROWS_AS(nn_descent(set, 4, Metric::L2, 1, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(nn_descent(set, 4, Metric::L2, 1, 1.5, 1), std::invalid_argument);
}

TEST_CASE("knng file round trip") {
    const auto set = random_set(40, 6, 53);
    const auto g = brute_force_knn(set, 7, Metric::L2);
    const auto path =
        (std::filesystem::temp_directory_path() / "tsdg_unit.knng").string();
    save_knng(g, path);
    CHECK(load_knng(path) == g);
    std::remove(path.c_str());
}

}  // TEST_SUITE
