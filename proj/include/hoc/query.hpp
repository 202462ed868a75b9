#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hoc/geometry.hpp"
#include "hoc/index.hpp"

namespace hoc {

/// Counters instrumenting one range search.
struct QueryStats {
    std::uint64_t nodes_visited = 0;      ///< tree nodes touched during discovery
    std::uint64_t leaves_full = 0;        ///< distinct leaves fully inside q
    std::uint64_t leaves_partial = 0;     ///< distinct partial leaves whose entries were scanned
    std::uint64_t leaves_pruned_by_mbr = 0; ///< distinct partial leaves skipped by their tag
    std::uint64_t candidates_refined = 0; ///< entries run through the per-point test
    std::uint64_t results = 0;

    QueryStats& operator+=(const QueryStats& o);
};

/// Leaves overlapping a query, split into fully covered (no refinement
/// needed) and partially covered (entries must be refined).
struct CoveringNodes {
    std::vector<const Node*> full;
    std::vector<const Node*> partial;
};

struct SearchOptions {
    /// Skip partial leaves whose MbrSign misses the query's spatial rectangle.
    bool use_mbr_check = true;
    /// Process Hilbert regions concurrently. Output is identical either way.
    bool parallel = false;
    /// Curve order used to decompose the query's spatial footprint.
    /// 0 picks the tree's deepest occupied level (capped); any value in
    /// [1, max_depth] is honored and changes only the work done, not the
    /// result.
    int decomposition_order = 0;
};

/// All indexed objects inside q's closed 3D box, sorted by id. Queries may
/// extend beyond the domain; they are clipped first.
std::vector<STObject> range_search(const HocTree& tree, const RangeQuery& q,
                                   QueryStats* stats = nullptr,
                                   const SearchOptions& options = {});

/// Non-empty leaves whose cube intersects q's box and whose spatial cells
/// intersect `region`, classified full/partial.
CoveringNodes get_overlapping_cubes(const HocTree& tree, const HilbertRange& region,
                                    const RangeQuery& q, QueryStats* stats = nullptr);

/// Splits candidate leaves into fully and partially covered with respect to
/// q's closed box, using each cube's closed geometric bounds.
CoveringNodes identify(const IndexConfig& cfg, std::span<const Node* const> candidates,
                       const RangeQuery& q);

/// True iff the tag rectangle intersects q's spatial rectangle (closed
/// intervals). Leaves failing this are skipped entirely.
bool mbr_check(const MbrSign& tag, const RangeQuery& q);

/// Entries of `candidates` inside q's closed box, input order preserved.
std::vector<STObject> prune(std::span<const STObject> candidates, const RangeQuery& q);

/// Gathers results from classified leaves: full-leaf entries wholesale plus
/// prune() of partial-leaf entries. Assumes `coverage.partial` already passed
/// mbr_check. Result is sorted by id.
std::pair<std::vector<STObject>, QueryStats> collect(const HocTree& tree,
                                                     const CoveringNodes& coverage,
                                                     const RangeQuery& q);

} // namespace hoc
