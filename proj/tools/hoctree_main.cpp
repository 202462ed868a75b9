#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hoc/bench.hpp"
#include "hoc/errors.hpp"
#include "hoc/index.hpp"
#include "hoc/ingest.hpp"
#include "hoc/oracle.hpp"
#include "hoc/persist.hpp"
#include "hoc/query.hpp"

namespace {

// Flag-level misuse that CLI11 cannot see (e.g. inverted query bounds).
class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void add_domain_flags(CLI::App* cmd, hoc::IndexConfig& cfg) {
    cmd->add_option("--x-lo", cfg.x_lo, "domain lower bound, x")->capture_default_str();
    cmd->add_option("--x-hi", cfg.x_hi, "domain upper bound, x")->capture_default_str();
    cmd->add_option("--y-lo", cfg.y_lo, "domain lower bound, y")->capture_default_str();
    cmd->add_option("--y-hi", cfg.y_hi, "domain upper bound, y")->capture_default_str();
    cmd->add_option("--t-lo", cfg.t_lo, "domain lower bound, t")->capture_default_str();
    cmd->add_option("--t-hi", cfg.t_hi, "domain upper bound, t")->capture_default_str();
}

std::string stats_line(const hoc::QueryStats& s) {
    return "results=" + std::to_string(s.results) +
           " nodes_visited=" + std::to_string(s.nodes_visited) +
           " leaves_full=" + std::to_string(s.leaves_full) +
           " leaves_partial=" + std::to_string(s.leaves_partial) +
           " leaves_pruned_by_mbr=" + std::to_string(s.leaves_pruned_by_mbr) +
           " candidates_refined=" + std::to_string(s.candidates_refined);
}

nlohmann::json stats_json(const hoc::QueryStats& s) {
    return {{"results", s.results},
            {"nodes_visited", s.nodes_visited},
            {"leaves_full", s.leaves_full},
            {"leaves_partial", s.leaves_partial},
            {"leaves_pruned_by_mbr", s.leaves_pruned_by_mbr},
            {"candidates_refined", s.candidates_refined}};
}

struct GenOptions {
    std::size_t n = 0;
    std::string kind = "uniform";
    std::size_t clusters = 10;
    double sigma = 200.0;
    std::uint64_t seed = 1;
    std::string out;
    hoc::IndexConfig cfg;
    bool clusters_given = false;
    bool sigma_given = false;
};

void run_gen(const GenOptions& o) {
    std::vector<hoc::STObject> objects;
    if (o.kind == "uniform") {
        objects = hoc::gen_uniform(o.n, o.seed, o.cfg);
    } else {
        if (!o.clusters_given)
            std::cerr << "gen: --clusters not set, using default " << o.clusters << "\n";
        if (!o.sigma_given)
            std::cerr << "gen: --sigma not set, using default " << o.sigma << "\n";
        objects = hoc::gen_clustered(o.n, o.clusters, o.sigma, o.seed, o.cfg);
    }
    hoc::write_csv(o.out, objects);
    std::cerr << "gen: wrote " << objects.size() << " records to " << o.out << "\n";
}

struct BuildOptions {
    std::string in;
    std::string out;
    hoc::IndexConfig cfg;
};

void run_build(const BuildOptions& o) {
    const auto records = hoc::load_csv(o.in);
    std::vector<hoc::STObject> objects;
    if (!records.empty()) {
        std::vector<std::string> warnings;
        objects = hoc::scale_to_domain(records, o.cfg, &warnings);
        for (const auto& w : warnings)
            std::cerr << "build: " << w << "\n";
    }

    const auto t0 = std::chrono::steady_clock::now();
    const hoc::HocTree tree = hoc::HocTree::build(objects, o.cfg);
    const double build_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();

    const std::size_t bytes = hoc::save(tree, o.out);
    const nlohmann::json summary{{"object_count", tree.object_count()},
                                 {"leaf_count", tree.leaf_count()},
                                 {"non_empty_leaf_count", tree.non_empty_leaf_count()},
                                 {"build_ms", build_ms},
                                 {"file_bytes", bytes},
                                 {"L", o.cfg.max_depth},
                                 {"psi", o.cfg.split_threshold}};
    std::cout << summary.dump() << "\n";
}

struct QueryOptions {
    std::string index;
    hoc::RangeQuery q;
    std::string format = "ids";
    bool verify = false;
    std::string csv;
};

void run_query(const QueryOptions& o) {
    if (o.q.x_min > o.q.x_max || o.q.y_min > o.q.y_max || o.q.t_start > o.q.t_end)
        throw usage_error("inverted query bounds");

    const hoc::HocTree tree = hoc::load(o.index);
    hoc::QueryStats stats;
    const auto results = hoc::range_search(tree, o.q, &stats);

    if (o.verify) {
        const auto records = hoc::load_csv(o.csv);
        std::vector<hoc::STObject> objects;
        if (!records.empty())
            objects = hoc::scale_to_domain(records, tree.config());
        const auto expected = hoc::scan_range(objects, o.q);
        if (results != expected)
            throw hoc::verification_error(
                "indexed search returned " + std::to_string(results.size()) +
                " objects, linear scan returned " + std::to_string(expected.size()));
        std::cerr << "verify: ok (" << expected.size() << " objects)\n";
    }

    if (o.format == "json") {
        nlohmann::json ids = nlohmann::json::array();
        for (const auto& r : results)
            ids.push_back(r.id);
        const nlohmann::json out{{"count", results.size()},
                                 {"ids", std::move(ids)},
                                 {"stats", stats_json(stats)}};
        std::cout << out.dump() << "\n";
    } else {
        for (const auto& r : results)
            std::cout << r.id << "\n";
        std::cerr << stats_line(stats) << "\n";
    }
}

struct BenchOptions {
    std::string index;
    std::string csv;
    hoc::BenchParams params;
};

void run_bench_cmd(const BenchOptions& o) {
    const hoc::HocTree tree = hoc::load(o.index);
    const auto records = hoc::load_csv(o.csv);
    std::vector<hoc::STObject> objects;
    if (!records.empty())
        objects = hoc::scale_to_domain(records, tree.config());
    if (objects.size() != tree.object_count())
        throw hoc::domain_error("CSV holds " + std::to_string(objects.size()) +
                                " records but the index holds " +
                                std::to_string(tree.object_count()) +
                                "; bench needs the dataset the index was built from");

    const auto report = hoc::run_bench(tree, objects, o.params, o.csv);
    std::cout << hoc::to_json_lines(report);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"HOC-Tree spatio-temporal range search toolkit"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* cmd_gen = app.add_subcommand("gen", "generate a synthetic dataset CSV");
    cmd_gen->add_option("--n", gen.n, "number of points")->required();
    cmd_gen->add_option("--kind", gen.kind, "uniform|clustered")
        ->check(CLI::IsMember({"uniform", "clustered"}))
        ->capture_default_str();
    auto* clusters_opt =
        cmd_gen->add_option("--clusters", gen.clusters, "cluster count (clustered)")
            ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20))
            ->capture_default_str();
    auto* sigma_opt =
        cmd_gen->add_option("--sigma", gen.sigma, "cluster spread, domain units")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    cmd_gen->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
    cmd_gen->add_option("--out", gen.out, "output CSV path")->required();
    add_domain_flags(cmd_gen, gen.cfg);

    BuildOptions build;
    auto* cmd_build = app.add_subcommand("build", "build an index file from CSV");
    cmd_build->add_option("--in", build.in, "input CSV path")->required();
    cmd_build->add_option("--out", build.out, "output index path")->required();
    cmd_build->add_option("--L", build.cfg.max_depth, "deepest level")
        ->check(CLI::Range(1, 16))
        ->capture_default_str();
    cmd_build->add_option("--psi", build.cfg.split_threshold, "leaf split threshold")
        ->check(CLI::Range(std::uint32_t{1}, std::uint32_t{1} << 30))
        ->capture_default_str();
    add_domain_flags(cmd_build, build.cfg);

    QueryOptions query;
    auto* cmd_query = app.add_subcommand("query", "run one range query on an index");
    cmd_query->add_option("--index", query.index, "index file path")->required();
    cmd_query->add_option("--x-min", query.q.x_min)->required();
    cmd_query->add_option("--x-max", query.q.x_max)->required();
    cmd_query->add_option("--y-min", query.q.y_min)->required();
    cmd_query->add_option("--y-max", query.q.y_max)->required();
    cmd_query->add_option("--t-start", query.q.t_start)->required();
    cmd_query->add_option("--t-end", query.q.t_end)->required();
    cmd_query->add_option("--format", query.format, "ids|json")
        ->check(CLI::IsMember({"ids", "json"}))
        ->capture_default_str();
    auto* csv_opt = cmd_query->add_option("--csv", query.csv,
                                          "dataset CSV (required with --verify)");
    cmd_query
        ->add_flag("--verify", query.verify,
                   "compare against a linear scan of the CSV; mismatch exits 3")
        ->needs(csv_opt);

    BenchOptions bench;
    auto* cmd_bench = app.add_subcommand("bench", "benchmark methods on an index");
    cmd_bench->add_option("--index", bench.index, "index file path")->required();
    cmd_bench->add_option("--csv", bench.csv, "dataset CSV the index was built from")
        ->required();
    cmd_bench
        ->add_option("--spatial-extent", bench.params.spatial_extent,
                     "query box side, spatial axes")
        ->capture_default_str();
    cmd_bench
        ->add_option("--temporal-extent", bench.params.temporal_extent,
                     "query box side, time axis")
        ->capture_default_str();
    cmd_bench->add_option("--queries", bench.params.queries, "query boxes per rep")
        ->check(CLI::Range(1, 1 << 24))
        ->capture_default_str();
    cmd_bench->add_option("--reps", bench.params.reps, "timing repetitions")
        ->check(CLI::Range(1, 1 << 16))
        ->capture_default_str();
    cmd_bench
        ->add_option("--methods", bench.params.methods,
                     "comma-separated: hoc, hoc-notag, scan")
        ->delimiter(',')
        ->capture_default_str();
    cmd_bench->add_option("--seed", bench.params.seed, "query placement seed")
        ->capture_default_str();
    cmd_bench->add_flag("--parallel", bench.params.parallel,
                        "run queries concurrently (timing mode is reported)");

    try {
        app.parse(argc, argv);

        if (*cmd_gen) {
            gen.clusters_given = clusters_opt->count() > 0;
            gen.sigma_given = sigma_opt->count() > 0;
            run_gen(gen);
        } else if (*cmd_build) {
            run_build(build);
        } else if (*cmd_query) {
            run_query(query);
        } else if (*cmd_bench) {
            run_bench_cmd(bench);
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const hoc::verification_error& e) {
        std::cerr << "verification mismatch: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
