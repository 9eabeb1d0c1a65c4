#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "tsdg/bench.hpp"
#include "tsdg/diversify.hpp"
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

std::vector<CandidateEdge> candidates_for(const VectorSet& set, NodeId owner,
                                          Metric metric) {
    std::vector<CandidateEdge> cands;
    const auto kernel = kernel_for(metric);
    for (NodeId v = 0; v < set.n; ++v) {
        if (v == owner) continue;
        cands.push_back({v, kernel(set.row(owner), set.row(v), set.d)});
    }
    std::sort(cands.begin(), cands.end(), [](const CandidateEdge& a, const CandidateEdge& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        return a.target < b.target;
    });
    return cands;
}

std::set<NodeId> edge_targets(const TsdgGraph& g, NodeId u) {
    std::set<NodeId> out;
    for (const auto& e : g.neighbors(u)) out.insert(e.target);
    return out;
}

}  // namespace

TEST_SUITE("diversify") {

TEST_CASE("occludes: pinned truth table") {
    CHECK(occludes(1.0f, 1.5f, 0.5f));
    CHECK_FALSE(occludes(1.0f, 1.0f, 0.5f));  // strict inequality on equal distances
    CHECK_FALSE(occludes(3.0f, 1.5f, 0.5f));  // occluder farther than occludee
}

TEST_CASE("occludes_relaxed: pinned truth table") {
    CHECK(occludes_relaxed(1.0f, 1.5f, 0.5f, 1.0f));
    CHECK_FALSE(occludes_relaxed(1.0f, 1.5f, 0.5f, 1.6f));  // 1.6 * 1.0 > 1.5
    CHECK(occludes_relaxed(0.1f, 1.5f, 0.2f, 1.2f));
}

TEST_CASE("stage 1: occluded candidate drops, relaxation retains it") {
    // Owner 0 with points at 1 and 1.5; squared distances 1.0, 2.25, 0.25.
    const auto set = from_values(1, {0.0f, 1.0f, 1.5f});
    const auto cands = candidates_for(set, 0, Metric::L2);
    REQUIRE(cands.size() == 2);

    const auto strict = stage1_relaxed_gd(cands, set, 0, 1.0f, Metric::L2);
    REQUIRE(strict.size() == 1);
    CHECK(strict[0].target == 1);

    // In squared units the relaxation must exceed d02/d01 = 2.25 to void the
    // first inequality; 2.6 keeps the farther point.
    const auto relaxed = stage1_relaxed_gd(cands, set, 0, 2.6f, Metric::L2);
    REQUIRE(relaxed.size() == 2);
    CHECK(relaxed[0].target == 1);
    CHECK(relaxed[1].target == 2);
}

TEST_CASE("stage 1: single candidate always kept; unsorted input rejected") {
    const auto set = from_values(1, {0.0f, 1.0f, 1.5f});
    const std::vector<CandidateEdge> one{{1, 1.0f}};
    CHECK(stage1_relaxed_gd(one, set, 0, 1.0f, Metric::L2).size() == 1);

    const std::vector<CandidateEdge> unsorted{{2, 2.25f}, {1, 1.0f}};
    CHECK_THROWS_AS(stage1_relaxed_gd(unsorted, set, 0, 1.0f, Metric::L2),
                    std::invalid_argument);
}

TEST_CASE("stage 1 postcondition: no kept edge relax-occludes a farther kept edge") {
    const auto set = make_synthetic(400, 8, 5, 0.2f, 77);
    const auto kernel = kernel_for(Metric::L2);
    for (NodeId owner : {0u, 13u, 111u, 399u}) {
        const auto cands = candidates_for(set, owner, Metric::L2);
        const float alpha = 1.3f;
        const auto kept = stage1_relaxed_gd(cands, set, owner, alpha, Metric::L2);
        CHECK(!kept.empty());
        CHECK(kept.front().dist == cands.front().dist);  // closest survives
        for (std::size_t i = 0; i < kept.size(); ++i) {
            for (std::size_t j = i + 1; j < kept.size(); ++j) {
                const float dij =
                    kernel(set.row(kept[i].target), set.row(kept[j].target), set.d);
                CHECK_FALSE(occludes_relaxed(kept[i].dist, kept[j].dist, dij, alpha));
            }
        }
    }
}

TEST_CASE("reverse edges: chain and dedup") {
    const auto set = from_values(1, {0.0f, 1.0f, 2.0f});
    std::vector<std::vector<CandidateEdge>> lists(3);
    lists[0] = {{1, 1.0f}};
    lists[1] = {{2, 1.0f}};

    const auto merged = add_reverse_edges(lists, set, Metric::L2);
    REQUIRE(merged[0].size() == 1);
    CHECK(merged[0][0].target == 1);
    REQUIRE(merged[1].size() == 2);
    CHECK(merged[1][0].target == 0);
    CHECK(merged[1][1].target == 2);
    REQUIRE(merged[2].size() == 1);
    CHECK(merged[2][0].target == 1);
    CHECK(merged[2][0].dist == 1.0f);  // same distance as the forward copy

    // u->v and v->u both present: no duplicates introduced.
    std::vector<std::vector<CandidateEdge>> both(2);
    both[0] = {{1, 4.0f}};
    both[1] = {{0, 4.0f}};
    const auto set2 = from_values(1, {0.0f, 2.0f});
    const auto merged2 = add_reverse_edges(both, set2, Metric::L2);
    CHECK(merged2[0].size() == 1);
    CHECK(merged2[1].size() == 1);
}

TEST_CASE("stage 2: pinned occlusion factors") {
    // Owner 0, candidates at 1, 1.5, 3 (squared dists 1, 2.25, 9):
    // lambda = 0, 1, 2.
    const auto set = from_values(1, {0.0f, 1.0f, 1.5f, 3.0f});
    const auto cands = candidates_for(set, 0, Metric::L2);

    const auto all = stage2_soft_gd(cands, set, 0, 9, 0, Metric::L2);
    REQUIRE(all.size() == 3);
    CHECK(all[0].target == 1);
    CHECK(all[0].lambda == 0);
    CHECK(all[1].target == 2);
    CHECK(all[1].lambda == 1);
    CHECK(all[2].target == 3);
    CHECK(all[2].lambda == 2);

    const auto pruned = stage2_soft_gd(cands, set, 0, 1, 0, Metric::L2);
    REQUIRE(pruned.size() == 2);
    CHECK(pruned[0].target == 1);
    CHECK(pruned[1].target == 2);

    // Single candidate: nothing can occlude it.
    const std::vector<CandidateEdge> one{{1, 1.0f}};
    const auto single = stage2_soft_gd(one, set, 0, 0, 0, Metric::L2);
    REQUIRE(single.size() == 1);
    CHECK(single[0].lambda == 0);
}

TEST_CASE("stage 2: equal distances tie to lambda 0 both ways") {
    const auto set = from_values(2, {0.0f, 0.0f, 1.0f, 0.0f, 0.0f, 1.0f});
    const auto cands = candidates_for(set, 0, Metric::L2);
    const auto edges = stage2_soft_gd(cands, set, 0, 9, 0, Metric::L2);
    REQUIRE(edges.size() == 2);
    CHECK(edges[0].lambda == 0);
    CHECK(edges[1].lambda == 0);
}

TEST_CASE("stage 2 lambda equals the independent pairwise recount") {
    const auto set = make_synthetic(300, 6, 4, 0.15f, 13);
    for (NodeId owner : {2u, 57u, 123u, 299u}) {
        auto cands = candidates_for(set, owner, Metric::L2);
        cands.resize(40);
        const auto edges = stage2_soft_gd(cands, set, owner, 65535, 0, Metric::L2);
        REQUIRE(edges.size() == cands.size());
        const auto expect = ref::lambda_counts(cands, set, Metric::L2);
        for (const auto& e : edges) {
            // find the candidate index for this target
            std::size_t idx = 0;
            while (cands[idx].target != e.target) ++idx;
            CHECK(e.lambda == expect[idx]);
        }
    }
}

TEST_CASE("stage 2: max_degree caps after sorting") {
    const auto set = from_values(1, {0.0f, 1.0f, 1.5f, 3.0f});
    const auto cands = candidates_for(set, 0, Metric::L2);
    const auto capped = stage2_soft_gd(cands, set, 0, 9, 2, Metric::L2);
    REQUIRE(capped.size() == 2);
    CHECK(capped[0].target == 1);
    CHECK(capped[1].target == 2);
}

TEST_CASE("build: lambda0=0 with alpha=1 leaves only unoccluded edges") {
    const auto set = make_synthetic(500, 8, 4, 0.2f, 3);
    const auto knn = brute_force_knn(set, 20, Metric::L2);
    const auto g = build(set, knn, {1.0f, 0, 0}, Metric::L2);
    for (const auto& e : g.edges) CHECK(e.lambda == 0);
}

TEST_CASE("build: three collinear points connect through the middle") {
    const auto set = from_values(1, {0.0f, 1.0f, 3.0f});
    const auto knn = brute_force_knn(set, 2, Metric::L2);
    const auto g = build(set, knn, {1.0f, 9, 0}, Metric::L2);
    CHECK(edge_targets(g, 0) == std::set<NodeId>{1});
    CHECK(edge_targets(g, 1) == std::set<NodeId>{0, 2});
    CHECK(edge_targets(g, 2) == std::set<NodeId>{1});
}

TEST_CASE("build: adjacency sorted by (lambda, dist, target); cutoff is a prefix") {
    const auto set = make_synthetic(400, 8, 6, 0.25f, 9);
    const auto knn = brute_force_knn(set, 30, Metric::L2);
    const auto g = build(set, knn, {1.2f, 9, 0}, Metric::L2);
    for (NodeId u = 0; u < g.n; ++u) {
        const auto nbrs = g.neighbors(u);
        for (std::size_t j = 1; j < nbrs.size(); ++j) {
            const auto& a = nbrs[j - 1];
            const auto& b = nbrs[j];
            const bool ordered = a.lambda < b.lambda ||
                                 (a.lambda == b.lambda && a.dist < b.dist) ||
                                 (a.lambda == b.lambda && a.dist == b.dist &&
                                  a.target < b.target);
            CHECK(ordered);
        }
        for (std::uint32_t cut : {1u, 3u, 10u}) {
            const auto prefix = g.neighbors_below(u, cut);
            for (const auto& e : prefix) CHECK(e.lambda < cut);
            if (prefix.size() < nbrs.size()) CHECK(nbrs[prefix.size()].lambda >= cut);
        }
    }
}

TEST_CASE("build: edge set shrinks monotonically with lambda0") {
    const auto set = make_synthetic(400, 8, 6, 0.25f, 11);
    const auto knn = brute_force_knn(set, 30, Metric::L2);
    const auto loose = build(set, knn, {1.2f, 9, 0}, Metric::L2);
    const auto tight = build(set, knn, {1.2f, 3, 0}, Metric::L2);
    for (NodeId u = 0; u < set.n; ++u) {
        const auto big = edge_targets(loose, u);
        for (NodeId t : edge_targets(tight, u)) CHECK(big.count(t) == 1);
    }
    CHECK(tight.edges.size() <= loose.edges.size());
}

TEST_CASE("build: pure function of inputs") {
    const auto set = make_synthetic(300, 8, 4, 0.2f, 15);
    const auto knn = brute_force_knn(set, 20, Metric::L2);
    BuildStats s1, s2;
    const auto a = build(set, knn, {1.2f, 9, 0}, Metric::L2, &s1);
    const auto b = build(set, knn, {1.2f, 9, 0}, Metric::L2, &s2);
    CHECK(a == b);
    CHECK(s1.stage1_edges == s2.stage1_edges);
    CHECK(s1.input_edges == static_cast<std::uint64_t>(set.n) * knn.k);
}

TEST_CASE("tsdg file round trip and format errors") {
    const auto set = make_synthetic(200, 6, 4, 0.2f, 19);
    const auto knn = brute_force_knn(set, 15, Metric::L2);
    const auto g = build(set, knn, {1.2f, 9, 0}, Metric::L2);

    const auto dir = std::filesystem::temp_directory_path();
    const auto path = (dir / "tsdg_unit.tsdg").string();
    save_tsdg(g, path);
    const auto loaded = load_tsdg(path);
    CHECK(loaded == g);

    // Truncation names the byte offset.
    {
        std::ifstream in(path, std::ios::binary);
        std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
        bytes.resize(bytes.size() / 2);
        const auto cut = (dir / "tsdg_cut.tsdg").string();
        std::ofstream out(cut, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        CHECK_THROWS_WITH_AS(load_tsdg(cut), doctest::Contains("byte offset"),
                             std::runtime_error);
        std::remove(cut.c_str());
    }
    // Wrong magic.
    {
        const auto bad = (dir / "tsdg_bad.tsdg").string();
        std::ofstream out(bad, std::ios::binary);
        out << "NOPEnope";
        out.close();
        CHECK_THROWS_WITH_AS(load_tsdg(bad), doctest::Contains("not a TSDG"),
                             std::runtime_error);
        std::remove(bad.c_str());
    }
    std::remove(path.c_str());
}

}  // TEST_SUITE
