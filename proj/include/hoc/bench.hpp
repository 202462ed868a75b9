#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hoc/index.hpp"
#include "hoc/query.hpp"

namespace hoc {

struct BenchParams {
    double spatial_extent = 600;
    double temporal_extent = 600;
    int queries = 50;
    int reps = 5;
    std::uint64_t seed = 1;
    std::vector<std::string> methods = {"hoc", "hoc-notag", "scan"};
    bool parallel = false;
};

struct MethodTiming {
    std::string method;
    double mean_ms = 0;
    double median_ms = 0;
    std::vector<double> rep_mean_ms;
    QueryStats stats;          ///< summed over the query set (indexed methods only)
    bool has_tree_stats = false;
};

struct BenchReport {
    std::string dataset;
    BenchParams params;
    std::size_t object_count = 0;
    double build_ms = 0;
    std::uint64_t index_bytes_with_tags = 0;
    std::uint64_t index_bytes_without_tags = 0;
    std::string timing_mode; ///< "sequential" or "parallel-batch"
    std::vector<MethodTiming> methods;
};

/// Seeded random query boxes with the given extents, uniformly placed so the
/// box fits inside the domain. The same boxes are used for every method.
std::vector<RangeQuery> make_query_boxes(const IndexConfig& cfg, double spatial_extent,
                                         double temporal_extent, int count,
                                         std::uint64_t seed);

/// Runs every method over the same query set and times it. Result-set
/// equality across methods is asserted before any timing is reported;
/// disagreement raises verification_error.
BenchReport run_bench(const HocTree& tree, std::span<const STObject> objects,
                      const BenchParams& params, std::string dataset);

/// Line-oriented JSON rendering: one JSON object per line, a meta line first
/// and then one line per method.
std::string to_json_lines(const BenchReport& report);

} // namespace hoc
