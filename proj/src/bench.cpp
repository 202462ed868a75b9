#include "hoc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <random>
#include <thread>

#include <json.hpp>

#include "hoc/errors.hpp"
#include "hoc/oracle.hpp"
#include "hoc/persist.hpp"

namespace hoc {

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

bool known_method(const std::string& m) {
    return m == "hoc" || m == "hoc-notag" || m == "scan";
}

std::vector<STObject> run_method(const std::string& method, const HocTree& tree,
                                 std::span<const STObject> objects, const RangeQuery& q,
                                 QueryStats* stats) {
    if (method == "hoc")
        return range_search(tree, q, stats, SearchOptions{.use_mbr_check = true});
    if (method == "hoc-notag")
        return range_search(tree, q, stats, SearchOptions{.use_mbr_check = false});
    return scan_range(objects, q);
}

std::vector<std::uint64_t> ids_of(const std::vector<STObject>& objects) {
    std::vector<std::uint64_t> ids;
    ids.reserve(objects.size());
    for (const auto& o : objects)
        ids.push_back(o.id);
    return ids;
}

} // namespace

std::vector<RangeQuery> make_query_boxes(const IndexConfig& cfg, double spatial_extent,
                                         double temporal_extent, int count,
                                         std::uint64_t seed) {
    cfg.validate();
    if (count < 0)
        throw domain_error("query count must be >= 0");
    if (!(spatial_extent >= 0) || spatial_extent > cfg.x_hi - cfg.x_lo ||
        spatial_extent > cfg.y_hi - cfg.y_lo)
        throw domain_error("spatial extent does not fit in the domain");
    if (!(temporal_extent >= 0) || temporal_extent > cfg.t_hi - cfg.t_lo)
        throw domain_error("temporal extent does not fit in the domain");

    std::mt19937_64 rng(seed);
    auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto origin = [&](double lo, double hi, double extent) {
        return lo + u01() * ((hi - lo) - extent);
    };

    std::vector<RangeQuery> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double x0 = origin(cfg.x_lo, cfg.x_hi, spatial_extent);
        const double y0 = origin(cfg.y_lo, cfg.y_hi, spatial_extent);
        const double t0 = origin(cfg.t_lo, cfg.t_hi, temporal_extent);
        out.push_back({x0, x0 + spatial_extent, y0, y0 + spatial_extent, t0,
                       t0 + temporal_extent});
    }
    return out;
}

BenchReport run_bench(const HocTree& tree, std::span<const STObject> objects,
                      const BenchParams& params, std::string dataset) {
    if (params.queries < 1)
        throw domain_error("bench needs at least one query");
    if (params.reps < 1)
        throw domain_error("bench needs at least one repetition");
    if (params.methods.empty())
        throw domain_error("bench needs at least one method");
    for (const auto& m : params.methods)
        if (!known_method(m))
            throw domain_error("unknown bench method '" + m + "'");

    const IndexConfig& cfg = tree.config();
    const auto queries = make_query_boxes(cfg, params.spatial_extent,
                                          params.temporal_extent, params.queries,
                                          params.seed);

    BenchReport report;
    report.dataset = std::move(dataset);
    report.params = params;
    report.object_count = tree.object_count();
    report.timing_mode = params.parallel ? "parallel-batch" : "sequential";

    // Correctness gate: identical result id-sets across methods, and stats
    // aggregation, before any timing runs.
    std::vector<MethodTiming> timings;
    for (const auto& m : params.methods) {
        MethodTiming t;
        t.method = m;
        t.has_tree_stats = m != "scan";
        timings.push_back(std::move(t));
    }
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        std::vector<std::uint64_t> reference;
        for (std::size_t mi = 0; mi < params.methods.size(); ++mi) {
            QueryStats stats;
            const auto ids = ids_of(
                run_method(params.methods[mi], tree, objects, queries[qi], &stats));
            if (timings[mi].has_tree_stats)
                timings[mi].stats += stats;
            if (mi == 0) {
                reference = ids;
            } else if (ids != reference) {
                const auto& q = queries[qi];
                throw verification_error(
                    "method '" + params.methods[mi] + "' returned " +
                    std::to_string(ids.size()) + " ids but '" + params.methods[0] +
                    "' returned " + std::to_string(reference.size()) + " for query " +
                    std::to_string(qi) + " [" + std::to_string(q.x_min) + "," +
                    std::to_string(q.x_max) + "]x[" + std::to_string(q.y_min) + "," +
                    std::to_string(q.y_max) + "]x[" + std::to_string(q.t_start) + "," +
                    std::to_string(q.t_end) + "]");
            }
        }
    }

    // Timing runs.
    for (std::size_t mi = 0; mi < params.methods.size(); ++mi) {
        const auto& method = params.methods[mi];
        std::vector<double> pooled;
        pooled.reserve(queries.size() * static_cast<std::size_t>(params.reps));

        for (int rep = 0; rep < params.reps; ++rep) {
            std::vector<double> per_query(queries.size(), 0.0);
            if (!params.parallel) {
                for (std::size_t qi = 0; qi < queries.size(); ++qi) {
                    const auto t0 = clock_type::now();
                    volatile std::size_t sink =
                        run_method(method, tree, objects, queries[qi], nullptr).size();
                    (void)sink;
                    per_query[qi] = ms_since(t0);
                }
            } else {
                const std::size_t workers = std::min<std::size_t>(
                    std::max(1u, std::thread::hardware_concurrency()), queries.size());
                std::vector<std::future<void>> futures;
                futures.reserve(workers);
                for (std::size_t w = 0; w < workers; ++w) {
                    futures.push_back(std::async(std::launch::async, [&, w] {
                        for (std::size_t qi = w; qi < queries.size(); qi += workers) {
                            const auto t0 = clock_type::now();
                            volatile std::size_t sink =
                                run_method(method, tree, objects, queries[qi], nullptr)
                                    .size();
                            (void)sink;
                            per_query[qi] = ms_since(t0);
                        }
                    }));
                }
                for (auto& f : futures)
                    f.get();
            }
            double rep_sum = 0;
            for (const double ms : per_query)
                rep_sum += ms;
            timings[mi].rep_mean_ms.push_back(rep_sum /
                                              static_cast<double>(queries.size()));
            pooled.insert(pooled.end(), per_query.begin(), per_query.end());
        }

        double total = 0;
        for (const double ms : pooled)
            total += ms;
        timings[mi].mean_ms = total / static_cast<double>(pooled.size());
        std::sort(pooled.begin(), pooled.end());
        timings[mi].median_ms = pooled[pooled.size() / 2];
    }
    report.methods = std::move(timings);

    {
        const auto t0 = clock_type::now();
        const HocTree rebuilt = HocTree::build(objects, cfg);
        report.build_ms = ms_since(t0);
        (void)rebuilt;
    }
    report.index_bytes_with_tags = serialize(tree, true).size();
    report.index_bytes_without_tags = serialize(tree, false).size();
    return report;
}

std::string to_json_lines(const BenchReport& report) {
    using nlohmann::json;

    std::string out;
    json meta{{"type", "bench_meta"},
              {"dataset", report.dataset},
              {"object_count", report.object_count},
              {"queries", report.params.queries},
              {"reps", report.params.reps},
              {"spatial_extent", report.params.spatial_extent},
              {"temporal_extent", report.params.temporal_extent},
              {"seed", report.params.seed},
              {"timing_mode", report.timing_mode},
              {"build_ms", report.build_ms},
              {"index_bytes_with_tags", report.index_bytes_with_tags},
              {"index_bytes_without_tags", report.index_bytes_without_tags},
              {"methods", report.params.methods}};
    out += meta.dump();
    out += '\n';

    for (const auto& m : report.methods) {
        json line{{"type", "method"},
                  {"method", m.method},
                  {"mean_ms", m.mean_ms},
                  {"median_ms", m.median_ms},
                  {"rep_mean_ms", m.rep_mean_ms}};
        if (m.has_tree_stats) {
            line["stats"] = {{"nodes_visited", m.stats.nodes_visited},
                             {"leaves_full", m.stats.leaves_full},
                             {"leaves_partial", m.stats.leaves_partial},
                             {"leaves_pruned_by_mbr", m.stats.leaves_pruned_by_mbr},
                             {"candidates_refined", m.stats.candidates_refined},
                             {"results", m.stats.results}};
        }
        out += line.dump();
        out += '\n';
    }
    return out;
}

} // namespace hoc
