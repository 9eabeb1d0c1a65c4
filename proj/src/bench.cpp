#include "tsdg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tsdg/io.hpp"
#include "tsdg/knn_graph.hpp"

namespace tsdg {

namespace {

// Reuses the brute-force selection pool shape: running k-min by (dist, id).
std::vector<IdDist> topk_scan(const VectorSet& base, std::span<const float> q,
                              std::uint32_t k, DistanceKernel kernel) {
    std::vector<IdDist> kept;
    kept.reserve(k + 1);
    for (NodeId v = 0; v < base.n; ++v) {
        const IdDist e{v, kernel(q.data(), base.row(v), base.d)};
        if (kept.size() == k && !closer(e, kept.back())) continue;
        kept.insert(std::upper_bound(kept.begin(), kept.end(), e, closer), e);
        if (kept.size() > k) kept.pop_back();
    }
    return kept;
}

}  // namespace

GroundTruth ground_truth(const VectorSet& base, const VectorSet& queries,
                         std::uint32_t k_gt, Metric metric) {
    if (k_gt < 1 || k_gt > base.n) {
        throw std::invalid_argument("ground_truth: need 1 <= K_gt <= n");
    }
    if (queries.d != base.d) throw std::invalid_argument("ground_truth: dim mismatch");
    require_metric_ready(base, metric);
    require_metric_ready(queries, metric);
    const DistanceKernel kernel = kernel_for(metric);

    GroundTruth gt;
    gt.k = k_gt;
    gt.ids.resize(queries.n);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t qi = 0; qi < static_cast<std::int64_t>(queries.n); ++qi) {
        const auto q = static_cast<std::uint32_t>(qi);
        const auto kept = topk_scan(base, queries.vec(q), k_gt, kernel);
        auto& out = gt.ids[q];
        out.reserve(kept.size());
        for (const auto& e : kept) out.push_back(e.id);
    }
    return gt;
}

double recall_at_k(const std::vector<std::vector<NodeId>>& results,
                   const GroundTruth& truth, std::uint32_t k) {
    if (k < 1) throw std::invalid_argument("recall_at_k: k must be >= 1");
    if (k > truth.k) throw std::invalid_argument("recall_at_k: k exceeds ground-truth depth");
    if (results.size() != truth.ids.size()) {
        throw std::invalid_argument("recall_at_k: query count mismatch");
    }

    std::uint64_t hits = 0;
    std::vector<NodeId> want;
    for (std::size_t q = 0; q < results.size(); ++q) {
        want.assign(truth.ids[q].begin(), truth.ids[q].begin() + k);
        std::sort(want.begin(), want.end());
        for (std::size_t i = 0; i < results[q].size() && i < k; ++i) {
            if (std::binary_search(want.begin(), want.end(), results[q][i])) ++hits;
        }
    }
    return static_cast<double>(hits) /
           (static_cast<double>(results.size()) * static_cast<double>(k));
}

VectorSet make_synthetic(std::uint32_t n, std::uint32_t d, std::uint32_t clusters,
                         float spread, std::uint64_t seed) {
    if (clusters < 1) throw std::invalid_argument("make_synthetic: clusters must be >= 1");
    if (d < 1) throw std::invalid_argument("make_synthetic: d must be >= 1");
    const Rng64 base(seed);

    Rng64 center_rng = base.fork(0);
    std::vector<float> centers(static_cast<std::size_t>(clusters) * d);
    for (auto& c : centers) c = static_cast<float>(center_rng.unit());

    VectorSet set;
    set.n = n;
    set.d = d;
    set.data.resize(static_cast<std::size_t>(n) * d);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        Rng64 rng = base.fork(1).fork(static_cast<std::uint64_t>(i));
        const std::uint32_t c = rng.below(clusters);
        const float* center = centers.data() + static_cast<std::size_t>(c) * d;
        float* row = set.data.data() + static_cast<std::size_t>(i) * d;
        constexpr double kTau = 6.283185307179586;
        for (std::uint32_t j = 0; j < d; j += 2) {
            const double u1 = std::max(rng.unit(), 1e-300);
            const double u2 = rng.unit();
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double z0 = r * std::cos(kTau * u2);
            const double z1 = r * std::sin(kTau * u2);
            row[j] = center[j] + spread * static_cast<float>(z0);
            if (j + 1 < d) row[j + 1] = center[j + 1] + spread * static_cast<float>(z1);
        }
    }
    return set;
}

std::pair<VectorSet, VectorSet> make_synthetic_split(std::uint32_t n,
                                                     std::uint32_t n_queries,
                                                     std::uint32_t d,
                                                     std::uint32_t clusters, float spread,
                                                     std::uint64_t seed) {
    const VectorSet all = make_synthetic(n + n_queries, d, clusters, spread, seed);
    VectorSet base;
    base.n = n;
    base.d = d;
    base.data.assign(all.data.begin(), all.data.begin() + static_cast<std::size_t>(n) * d);
    VectorSet queries;
    queries.n = n_queries;
    queries.d = d;
    queries.data.assign(all.data.begin() + static_cast<std::size_t>(n) * d, all.data.end());
    return {std::move(base), std::move(queries)};
}

// ---------------------------------------------------------------------------
// Bench runner
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct RunPoint {
    std::string algorithm;  // greedy | bestfirst
    std::uint32_t batch_size = 0;
    std::uint32_t k = 10;
    GreedyParams greedy;
    BestFirstParams bestfirst;
    std::string params_echo;
};

VectorSet slice(const VectorSet& set, std::uint32_t begin, std::uint32_t end) {
    VectorSet out;
    out.n = end - begin;
    out.d = set.d;
    out.data.assign(set.data.begin() + static_cast<std::size_t>(begin) * set.d,
                    set.data.begin() + static_cast<std::size_t>(end) * set.d);
    return out;
}

std::vector<double> as_sweep(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return {fallback};
    if (j[key].is_array()) {
        std::vector<double> values;
        for (const auto& v : j[key]) values.push_back(v.get<double>());
        if (values.empty()) throw std::runtime_error(std::string("empty sweep for ") + key);
        return values;
    }
    return {j[key].get<double>()};
}

std::string format_double(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

}  // namespace

void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "dataset,algorithm,batch_size,params,k,recall,qps,mean_hops,mean_distance_evals\n";
    for (const auto& r : rows) {
        out << r.dataset << ',' << r.algorithm << ',' << r.batch_size << ',' << r.params
            << ',' << r.k << ',' << r.recall << ',' << r.qps << ',' << r.mean_hops << ','
            << r.mean_distance_evals << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<BenchRow> run_bench_file(const std::string& config_path,
                                     const std::string& csv_out) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error(config_path + ": cannot open config");
    json cfg = json::parse(in);

    // Dataset: synthetic or files.
    const json& dcfg = cfg.at("dataset");
    const Metric metric = metric_from_name(dcfg.value("metric", "l2"));
    std::string dataset_name = dcfg.value("name", "dataset");
    VectorSet base;
    VectorSet queries;
    if (dcfg.contains("synthetic")) {
        const json& s = dcfg["synthetic"];
        std::tie(base, queries) = make_synthetic_split(
            s.at("n").get<std::uint32_t>(), s.value("queries", 100U),
            s.at("d").get<std::uint32_t>(), s.at("clusters").get<std::uint32_t>(),
            s.at("spread").get<float>(), s.value("seed", 1ULL));
    } else {
        base = load_vectors(dcfg.at("data").get<std::string>());
        queries = load_vectors(dcfg.at("queries").get<std::string>());
    }
    if (metric == Metric::Cosine) {
        base = normalized_copy(base);
        queries = normalized_copy(queries);
    }

    // Ground truth: loaded or computed.
    const auto gt_k = dcfg.value("gt_k", 100U);
    GroundTruth gt;
    if (dcfg.contains("gt")) {
        gt.k = gt_k;
        for (const auto& row : load_ivecs(dcfg["gt"].get<std::string>())) {
            if (row.size() < gt_k) {
                throw std::runtime_error("bench: ground-truth record shorter than gt_k");
            }
            gt.ids.emplace_back(row.begin(), row.end());
        }
        if (gt.ids.size() != queries.n) {
            throw std::runtime_error("bench: ground-truth record count does not match queries");
        }
    } else {
        gt = ground_truth(base, queries, std::min(gt_k, base.n), metric);
    }

    // Graph: loaded or built.
    const json& gcfg = cfg.at("graph");
    TsdgGraph graph;
    if (gcfg.contains("tsdg")) {
        graph = load_tsdg(gcfg["tsdg"].get<std::string>());
        if (graph.metric != metric) {
            throw std::runtime_error("bench: graph metric does not match dataset metric");
        }
    } else {
        const auto knn_k = gcfg.value("knn_k", 100U);
        KnnGraph knn;
        if (gcfg.value("method", "brute") == "nndescent") {
            knn = nn_descent(base, knn_k, metric, gcfg.value("iterations", 10U),
                             gcfg.value("sample_rate", 1.0), gcfg.value("knn_seed", 7ULL));
        } else {
            knn = brute_force_knn(base, knn_k, metric);
        }
        DiversifyParams params;
        params.alpha = gcfg.value("alpha", 1.2f);
        params.lambda0 = gcfg.value("lambda0", std::uint16_t{9});
        params.max_degree = gcfg.value("max_degree", 0U);
        graph = build(base, knn, params, metric);
    }

    const std::uint32_t small_batch_threshold =
        cfg.contains("routing") ? cfg["routing"].value("small_batch_threshold", 256U) : 256U;

    // Expand run entries (sweeps allowed on t0, T, lambda_cut, delta).
    std::vector<RunPoint> points;
    for (const auto& rcfg : cfg.at("runs")) {
        std::string algorithm = rcfg.value("algorithm", "auto");
        const auto batch_size = rcfg.value("batch_size", queries.n);
        if (algorithm == "auto") {
            algorithm = batch_size <= small_batch_threshold ? "greedy" : "bestfirst";
        }
        const auto k = rcfg.value("k", 10U);
        const auto seed = rcfg.value("seed", 7ULL);
        const bool greedy = algorithm == "greedy";

        const auto t0_sweep = greedy ? as_sweep(rcfg, "t0", 16) : std::vector<double>{0};
        const auto hop_sweep = as_sweep(rcfg, "T", greedy ? 16 : 1024);
        const auto cut_sweep = as_sweep(rcfg, "lambda_cut", greedy ? 10 : 5);
        const auto delta_sweep =
            greedy ? std::vector<double>{0} : as_sweep(rcfg, "delta", 0.0);

        for (double t0 : t0_sweep) {
            for (double hops : hop_sweep) {
                for (double cut : cut_sweep) {
                    for (double delta : delta_sweep) {
                        RunPoint p;
                        p.algorithm = algorithm;
                        p.batch_size = std::max(1U, std::min(batch_size, queries.n));
                        p.k = k;
                        std::ostringstream echo;
                        if (greedy) {
                            p.greedy.t0 = static_cast<std::uint32_t>(t0);
                            p.greedy.hop_limit = static_cast<std::uint32_t>(hops);
                            p.greedy.lambda_cut = static_cast<std::uint32_t>(cut);
                            p.greedy.seed = seed;
                            echo << "t0=" << p.greedy.t0 << ";T=" << p.greedy.hop_limit
                                 << ";lambda_cut=" << p.greedy.lambda_cut << ";seed=" << seed;
                        } else {
                            p.bestfirst.k = k;
                            p.bestfirst.hop_limit = static_cast<std::uint32_t>(hops);
                            p.bestfirst.delta = static_cast<float>(delta);
                            p.bestfirst.m_segments = rcfg.value("m_segments", 8U);
                            p.bestfirst.lambda_cut = static_cast<std::uint32_t>(cut);
                            p.bestfirst.seed = seed;
                            p.bestfirst.unbounded = rcfg.value("unbounded", false);
                            echo << "T=" << p.bestfirst.hop_limit
                                 << ";delta=" << format_double(delta)
                                 << ";m_segments=" << p.bestfirst.m_segments
                                 << ";lambda_cut=" << p.bestfirst.lambda_cut
                                 << ";seed=" << seed
                                 << ";unbounded=" << (p.bestfirst.unbounded ? 1 : 0);
                        }
                        echo << ";metric=" << metric_name(metric);
                        p.params_echo = echo.str();
                        points.push_back(std::move(p));
                    }
                }
            }
        }
    }

    std::vector<BenchRow> rows;
    for (const auto& p : points) {
        auto run_all = [&]() {
            std::vector<std::vector<NodeId>> results(queries.n);
            SearchStats stats;
            for (std::uint32_t begin = 0; begin < queries.n; begin += p.batch_size) {
                const auto end = std::min(queries.n, begin + p.batch_size);
                const VectorSet chunk = slice(queries, begin, end);
                std::vector<std::vector<NodeId>> part;
                if (p.algorithm == "greedy") {
                    part = small_batch_search(graph, base, chunk, p.k, p.greedy, &stats);
                } else {
                    BestFirstParams bp = p.bestfirst;
                    bp.seed = mix64(p.bestfirst.seed + begin);
                    part = large_batch_search(graph, base, chunk, bp, &stats);
                }
                for (std::uint32_t q = begin; q < end; ++q) {
                    results[q] = std::move(part[q - begin]);
                }
            }
            return std::pair{std::move(results), stats};
        };

        run_all();  // warm-up
        const auto started = Clock::now();
        auto [results, stats] = run_all();
        const double seconds = std::chrono::duration<double>(Clock::now() - started).count();

        BenchRow row;
        row.dataset = dataset_name;
        row.algorithm = p.algorithm;
        row.batch_size = p.batch_size;
        row.params = p.params_echo;
        row.k = p.k;
        row.recall = recall_at_k(results, gt, std::min(p.k, gt.k));
        row.qps = seconds > 0 ? static_cast<double>(queries.n) / seconds : 0.0;
        row.mean_hops = static_cast<double>(stats.hops) / queries.n;
        row.mean_distance_evals = static_cast<double>(stats.distance_evals) / queries.n;
        rows.push_back(std::move(row));
    }

    if (!csv_out.empty()) write_bench_csv(rows, csv_out);
    return rows;
}

}  // namespace tsdg
