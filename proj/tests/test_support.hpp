#pragma once

#include <doctest.h>

#include <vector>

#include "hoc/index.hpp"
#include "hoc/query.hpp"

namespace testutil {

inline std::vector<const hoc::Node*> collect_leaves(const hoc::HocTree& tree) {
    std::vector<const hoc::Node*> out;
    tree.for_each_leaf([&](const hoc::Node& n) { out.push_back(&n); });
    return out;
}

inline std::vector<std::uint64_t> ids_of(const std::vector<hoc::STObject>& objects) {
    std::vector<std::uint64_t> ids;
    ids.reserve(objects.size());
    for (const auto& o : objects)
        ids.push_back(o.id);
    return ids;
}

/// Checks every structural invariant of a built tree: octant cell arithmetic,
/// leaf capacity below the deepest level, entry containment, MBR soundness,
/// Morton label consistency, and count conservation.
inline void check_tree_invariants(const hoc::HocTree& tree) {
    using namespace hoc;
    const IndexConfig& cfg = tree.config();
    std::size_t total = 0;

    auto visit = [&](auto&& self, const Node& n) -> void {
        CHECK(n.cell.depth <= cfg.max_depth);
        CHECK(n.label == morton3_encode(n.cell).value);

        if (!n.leaf) {
            CHECK(n.entries.empty());
            bool any_child = false;
            for (int i = 0; i < 8; ++i) {
                const auto& c = n.children[i];
                if (!c)
                    continue;
                any_child = true;
                const auto u = static_cast<std::uint32_t>(i);
                CHECK(c->cell.depth == n.cell.depth + 1);
                CHECK(c->cell.cx == ((n.cell.cx << 1) | (u & 1u)));
                CHECK(c->cell.cy == ((n.cell.cy << 1) | ((u >> 1) & 1u)));
                CHECK(c->cell.ct == ((n.cell.ct << 1) | ((u >> 2) & 1u)));
                self(self, *c);
            }
            CHECK(any_child);
            return;
        }

        if (n.cell.depth < cfg.max_depth)
            CHECK(n.entries.size() <= cfg.split_threshold);
        CHECK(n.mbr.has_value() == !n.entries.empty());
        total += n.entries.size();

        const CellCoord decoded = morton3_decode({n.label, n.cell.depth});
        CHECK(decoded == n.cell);

        for (const auto& e : n.entries) {
            CHECK(quantize(e, cfg, n.cell.depth) == n.cell);
            CHECK(n.mbr->contains(e.x, e.y));
        }
    };
    visit(visit, tree.root());

    CHECK(total == tree.object_count());
}

} // namespace testutil
