#include "hoc/query.hpp"

#include <algorithm>
#include <future>
#include <thread>

#include "hoc/curves.hpp"
#include "hoc/errors.hpp"

namespace hoc {

QueryStats& QueryStats::operator+=(const QueryStats& o) {
    nodes_visited += o.nodes_visited;
    leaves_full += o.leaves_full;
    leaves_partial += o.leaves_partial;
    leaves_pruned_by_mbr += o.leaves_pruned_by_mbr;
    candidates_refined += o.candidates_refined;
    results += o.results;
    return *this;
}

namespace {

constexpr int kDecompositionCap = 12;

// Finer decomposition only narrows the fringe of candidate leaves that the
// cube/box test rejects anyway, while the region count grows with the
// rectangle perimeter at the chosen order.
int default_decomposition_order(const HocTree& tree) {
    const int cap = std::min(tree.config().max_depth, kDecompositionCap);
    return std::clamp(tree.max_leaf_depth(), 1, cap);
}

bool mbr_intersects(const MbrSign& tag, double x_min, double x_max, double y_min,
                    double y_max) {
    return tag.x_min <= x_max && x_min <= tag.x_max && tag.y_min <= y_max &&
           y_min <= tag.y_max;
}

void discover(const IndexConfig& cfg, const Node& n, const HilbertRange& region,
              const Box3& box, std::vector<const Node*>& out, std::uint64_t& visited) {
    ++visited;
    const HilbertRange f = spatial_footprint(n, cfg.max_depth);
    if (f.hi < region.lo || f.lo > region.hi)
        return;
    if (!box.intersects(cell_box(cfg, n.cell)))
        return;
    if (n.leaf) {
        if (!n.entries.empty())
            out.push_back(&n);
        return;
    }
    for (const auto& c : n.children)
        if (c)
            discover(cfg, *c, region, box, out, visited);
}

// Leaves intersecting any region, with duplicates across regions removed.
// A leaf shallower than the decomposition order can span several disjoint
// regions; dedupe keys on (depth, label), which is unique per leaf.
std::vector<const Node*> discover_leaves(const HocTree& tree,
                                         std::span<const HilbertRange> regions,
                                         const Box3& box, bool parallel,
                                         std::uint64_t& visited) {
    const IndexConfig& cfg = tree.config();
    std::vector<const Node*> leaves;

    if (!parallel || regions.size() < 2) {
        for (const auto& r : regions)
            discover(cfg, tree.root(), r, box, leaves, visited);
    } else {
        const std::size_t workers =
            std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()),
                                  regions.size());
        struct Chunk {
            std::vector<const Node*> leaves;
            std::uint64_t visited = 0;
        };
        std::vector<std::future<Chunk>> futures;
        futures.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            futures.push_back(std::async(std::launch::async, [&, w] {
                Chunk chunk;
                for (std::size_t i = w; i < regions.size(); i += workers)
                    discover(cfg, tree.root(), regions[i], box, chunk.leaves,
                             chunk.visited);
                return chunk;
            }));
        }
        for (auto& fut : futures) {
            Chunk chunk = fut.get();
            visited += chunk.visited;
            leaves.insert(leaves.end(), chunk.leaves.begin(), chunk.leaves.end());
        }
    }

    std::sort(leaves.begin(), leaves.end(), [](const Node* a, const Node* b) {
        return std::pair(a->cell.depth, a->label) < std::pair(b->cell.depth, b->label);
    });
    leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());
    return leaves;
}

void sort_by_id(std::vector<STObject>& objects) {
    std::sort(objects.begin(), objects.end(),
              [](const STObject& a, const STObject& b) { return a.id < b.id; });
}

} // namespace

std::vector<STObject> range_search(const HocTree& tree, const RangeQuery& q,
                                   QueryStats* stats_out, const SearchOptions& options) {
    q.validate();
    QueryStats stats;
    std::vector<STObject> result;
    const IndexConfig& cfg = tree.config();
    const Box3 box = clip(q, cfg.domain_box());

    if (!box.empty()) {
        const int level = cfg.max_depth;
        int order = options.decomposition_order > 0 ? options.decomposition_order
                                                    : default_decomposition_order(tree);
        order = std::clamp(order, 1, level);

        const CellRect rect{quantize_axis(box.x_min, cfg.x_lo, cfg.x_hi, order),
                            quantize_axis(box.x_max, cfg.x_lo, cfg.x_hi, order),
                            quantize_axis(box.y_min, cfg.y_lo, cfg.y_hi, order),
                            quantize_axis(box.y_max, cfg.y_lo, cfg.y_hi, order)};
        auto regions = hilbert_covering_ranges(rect, order);

        // Widen each region from decomposition order to level-L granularity.
        const int shift = 2 * (level - order);
        for (auto& r : regions) {
            r.hi = ((r.hi + 1) << shift) - 1;
            r.lo <<= shift;
        }

        const auto leaves =
            discover_leaves(tree, regions, box, options.parallel, stats.nodes_visited);

        for (const Node* leaf : leaves) {
            if (box.contains(cell_box(cfg, leaf->cell))) {
                ++stats.leaves_full;
                result.insert(result.end(), leaf->entries.begin(), leaf->entries.end());
                continue;
            }
            if (options.use_mbr_check && leaf->mbr &&
                !mbr_intersects(*leaf->mbr, box.x_min, box.x_max, box.y_min, box.y_max)) {
                ++stats.leaves_pruned_by_mbr;
                continue;
            }
            ++stats.leaves_partial;
            for (const auto& e : leaf->entries) {
                ++stats.candidates_refined;
                if (box.contains(e.x, e.y, e.t))
                    result.push_back(e);
            }
        }
        sort_by_id(result);
    }

    stats.results = result.size();
    if (stats_out)
        *stats_out = stats;
    return result;
}

CoveringNodes get_overlapping_cubes(const HocTree& tree, const HilbertRange& region,
                                    const RangeQuery& q, QueryStats* stats) {
    q.validate();
    const IndexConfig& cfg = tree.config();
    const Box3 box = clip(q, cfg.domain_box());
    if (box.empty())
        return {};

    std::vector<const Node*> leaves;
    std::uint64_t visited = 0;
    discover(cfg, tree.root(), region, box, leaves, visited);
    if (stats)
        stats->nodes_visited += visited;
    return identify(cfg, leaves, q);
}

CoveringNodes identify(const IndexConfig& cfg, std::span<const Node* const> candidates,
                       const RangeQuery& q) {
    q.validate();
    const Box3 box = q.box();
    CoveringNodes out;
    for (const Node* n : candidates) {
        if (box.contains(cell_box(cfg, n->cell)))
            out.full.push_back(n);
        else
            out.partial.push_back(n);
    }
    return out;
}

bool mbr_check(const MbrSign& tag, const RangeQuery& q) {
    return mbr_intersects(tag, q.x_min, q.x_max, q.y_min, q.y_max);
}

std::vector<STObject> prune(std::span<const STObject> candidates, const RangeQuery& q) {
    q.validate();
    std::vector<STObject> out;
    for (const auto& e : candidates)
        if (q.contains(e.x, e.y, e.t))
            out.push_back(e);
    return out;
}

std::pair<std::vector<STObject>, QueryStats> collect(const HocTree& tree,
                                                     const CoveringNodes& coverage,
                                                     const RangeQuery& q) {
    q.validate();
    const Box3 box = clip(q, tree.config().domain_box());
    QueryStats stats;
    std::vector<STObject> out;

    for (const Node* leaf : coverage.full) {
        ++stats.leaves_full;
        out.insert(out.end(), leaf->entries.begin(), leaf->entries.end());
    }
    for (const Node* leaf : coverage.partial) {
        ++stats.leaves_partial;
        for (const auto& e : leaf->entries) {
            ++stats.candidates_refined;
            if (box.contains(e.x, e.y, e.t))
                out.push_back(e);
        }
    }
    sort_by_id(out);
    stats.results = out.size();
    return {std::move(out), stats};
}

} // namespace hoc
