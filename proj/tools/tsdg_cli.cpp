// Command-line front end: dataset generation, graph construction, ground
// truth, search, and the benchmark runner.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "tsdg/bench.hpp"
#include "tsdg/bestfirst_search.hpp"
#include "tsdg/diversify.hpp"
#include "tsdg/greedy_search.hpp"
#include "tsdg/io.hpp"
#include "tsdg/knn_graph.hpp"

using namespace tsdg;

namespace {

void set_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

VectorSet load_for_metric(const std::string& path, Metric metric) {
    VectorSet set = load_vectors(path);
    if (metric == Metric::Cosine) set = normalized_copy(set);
    return set;
}

std::vector<std::vector<std::int32_t>> to_ivecs_rows(
    const std::vector<std::vector<NodeId>>& lists) {
    std::vector<std::vector<std::int32_t>> rows(lists.size());
    for (std::size_t i = 0; i < lists.size(); ++i) {
        rows[i].assign(lists[i].begin(), lists[i].end());
    }
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TSDG: diversified-graph approximate nearest-neighbor search"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = all)");

    // gen ---------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate a synthetic fvecs dataset");
    std::uint32_t gen_n = 10000, gen_d = 32, gen_clusters = 50;
    float gen_spread = 0.25f;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    gen->add_option("--n", gen_n, "vector count");
    gen->add_option("--d", gen_d, "dimension");
    gen->add_option("--clusters", gen_clusters, "mixture components");
    gen->add_option("--spread", gen_spread, "per-cluster stddev");
    gen->add_option("--seed", gen_seed, "rng seed");
    gen->add_option("--out", gen_out, "output fvecs path")->required();

    // knn ---------------------------------------------------------------
    auto* knn_cmd = app.add_subcommand("knn", "build a k-NN graph");
    std::string knn_data, knn_metric = "l2", knn_method = "brute", knn_out;
    std::uint32_t knn_k = 100, knn_iterations = 10;
    double knn_sample_rate = 1.0;
    std::uint64_t knn_seed = 7;
    knn_cmd->add_option("--data", knn_data, "fvecs/bvecs dataset")->required();
    knn_cmd->add_option("--k", knn_k, "neighbors per node");
    knn_cmd->add_option("--metric", knn_metric, "l2 | cos | ip");
    knn_cmd->add_option("--method", knn_method, "brute | nndescent");
    knn_cmd->add_option("--iterations", knn_iterations, "nndescent iterations");
    knn_cmd->add_option("--sample-rate", knn_sample_rate, "nndescent sample rate");
    knn_cmd->add_option("--seed", knn_seed, "nndescent seed");
    knn_cmd->add_option("--out", knn_out, "output knng path")->required();

    // diversify ----------------------------------------------------------
    auto* div = app.add_subcommand("diversify", "two-stage diversification of a k-NN graph");
    std::string div_data, div_knn, div_metric = "l2", div_out;
    float div_alpha = 1.2f;
    std::uint32_t div_lambda0 = 9, div_max_degree = 0;
    div->add_option("--data", div_data, "fvecs/bvecs dataset")->required();
    div->add_option("--knn", div_knn, "input knng path")->required();
    div->add_option("--alpha", div_alpha, "stage-1 relaxation (>= 1)");
    div->add_option("--lambda0", div_lambda0, "occlusion-factor threshold");
    div->add_option("--max-degree", div_max_degree, "optional per-node cap (0 = none)");
    div->add_option("--metric", div_metric, "l2 | cos | ip");
    div->add_option("--out", div_out, "output tsdg path")->required();

    // gt ------------------------------------------------------------------
    auto* gt_cmd = app.add_subcommand("gt", "exhaustive ground truth");
    std::string gt_data, gt_queries, gt_metric = "l2", gt_out;
    std::uint32_t gt_k = 100;
    gt_cmd->add_option("--data", gt_data, "fvecs/bvecs dataset")->required();
    gt_cmd->add_option("--queries", gt_queries, "fvecs/bvecs queries")->required();
    gt_cmd->add_option("--k", gt_k, "neighbors per query");
    gt_cmd->add_option("--metric", gt_metric, "l2 | cos | ip");
    gt_cmd->add_option("--out", gt_out, "output ivecs path")->required();

    // search ---------------------------------------------------------------
    auto* search = app.add_subcommand("search", "query a stored graph");
    std::string search_graph, search_data, search_queries, search_mode = "greedy",
                search_out;
    std::uint32_t search_k = 10, search_t0 = 16, search_T = 0, search_cut = 0,
                  search_m = 8;
    float search_delta = 0.0f;
    std::uint64_t search_seed = 7;
    bool search_unbounded = false;
    search->add_option("--graph", search_graph, "tsdg path")->required();
    search->add_option("--data", search_data, "fvecs/bvecs dataset")->required();
    search->add_option("--queries", search_queries, "fvecs/bvecs queries")->required();
    search->add_option("--mode", search_mode, "greedy | bestfirst");
    search->add_option("--k", search_k, "results per query");
    search->add_option("--t0", search_t0, "greedy: independent searches");
    search->add_option("--T", search_T, "hop limit (0 = mode default)");
    search->add_option("--lambda-cut", search_cut, "visit edges with lambda below this");
    search->add_option("--delta", search_delta, "bestfirst: probe slack");
    search->add_option("--m-segments", search_m, "bestfirst: queue/visited segments");
    search->add_option("--seed", search_seed, "rng seed");
    search->add_flag("--unbounded", search_unbounded,
                     "bestfirst: unbounded queue/visited models");
    search->add_option("--out", search_out, "output ivecs path")->required();

    // bench ------------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "run a benchmark config");
    std::string bench_config, bench_out;
    bench->add_option("--config", bench_config, "JSON config path")->required();
    bench->add_option("--out", bench_out, "output csv path")->required();

    CLI11_PARSE(app, argc, argv);
    set_threads(threads);

    try {
        if (gen->parsed()) {
            write_fvecs(make_synthetic(gen_n, gen_d, gen_clusters, gen_spread, gen_seed),
                        gen_out);
            std::cout << "wrote " << gen_n << "x" << gen_d << " vectors to " << gen_out
                      << "\n";
        } else if (knn_cmd->parsed()) {
            const Metric metric = metric_from_name(knn_metric);
            const auto set = load_for_metric(knn_data, metric);
            KnnGraph graph;
            if (knn_method == "brute") {
                graph = brute_force_knn(set, knn_k, metric);
            } else if (knn_method == "nndescent") {
                graph = nn_descent(set, knn_k, metric, knn_iterations, knn_sample_rate,
                                   knn_seed);
                const double quality =
                    knn_graph_quality(graph, set, metric, std::min(set.n, 500u), 1);
                std::cout << "nn-descent list quality vs exact scan: " << quality << "\n";
            } else {
                throw std::invalid_argument("unknown method '" + knn_method + "'");
            }
            save_knng(graph, knn_out);
            std::cout << "wrote k=" << graph.k << " graph over " << graph.n
                      << " nodes to " << knn_out << "\n";
        } else if (div->parsed()) {
            const Metric metric = metric_from_name(div_metric);
            const auto set = load_for_metric(div_data, metric);
            const auto knn = load_knng(div_knn);
            DiversifyParams params;
            params.alpha = div_alpha;
            params.lambda0 = static_cast<std::uint16_t>(div_lambda0);
            params.max_degree = div_max_degree;
            BuildStats stats;
            const auto graph = build(set, knn, params, metric, &stats);
            save_tsdg(graph, div_out);
            std::cout << "stage-1 retention: " << stats.stage1_retention() * 100.0
                      << "%, final average degree: " << graph.average_degree() << ", wrote "
                      << div_out << "\n";
        } else if (gt_cmd->parsed()) {
            const Metric metric = metric_from_name(gt_metric);
            const auto set = load_for_metric(gt_data, metric);
            const auto queries = load_for_metric(gt_queries, metric);
            const auto gt = ground_truth(set, queries, gt_k, metric);
            write_ivecs(to_ivecs_rows(gt.ids), gt_out);
            std::cout << "wrote top-" << gt.k << " ground truth for " << queries.n
                      << " queries to " << gt_out << "\n";
        } else if (search->parsed()) {
            const auto graph = load_tsdg(search_graph);
            const auto set = load_for_metric(search_data, graph.metric);
            const auto queries = load_for_metric(search_queries, graph.metric);
            std::vector<std::vector<NodeId>> results;
            SearchStats stats;
            if (search_mode == "greedy") {
                GreedyParams params;
                params.t0 = search_t0;
                params.hop_limit = search_T ? search_T : 16;
                params.lambda_cut = search_cut ? search_cut : 10;
                params.seed = search_seed;
                results = small_batch_search(graph, set, queries, search_k, params, &stats);
            } else if (search_mode == "bestfirst") {
                BestFirstParams params;
                params.k = search_k;
                params.hop_limit = search_T ? search_T : 1024;
                params.delta = search_delta;
                params.m_segments = search_m;
                params.lambda_cut = search_cut ? search_cut : 5;
                params.seed = search_seed;
                params.unbounded = search_unbounded;
                results = large_batch_search(graph, set, queries, params, &stats);
            } else {
                throw std::invalid_argument("unknown mode '" + search_mode + "'");
            }
            write_ivecs(to_ivecs_rows(results), search_out);
            std::cout << "searched " << queries.n << " queries (mean hops "
                      << static_cast<double>(stats.hops) / queries.n
                      << ", mean distance evals "
                      << static_cast<double>(stats.distance_evals) / queries.n
                      << "), wrote " << search_out << "\n";
        } else if (bench->parsed()) {
            const auto rows = run_bench_file(bench_config, bench_out);
            std::cout << "wrote " << rows.size() << " rows to " << bench_out << "\n";
            for (const auto& row : rows) {
                std::cout << "  " << row.algorithm << " bs=" << row.batch_size << " ["
                          << row.params << "] recall=" << row.recall << " qps=" << row.qps
                          << "\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
