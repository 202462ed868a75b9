#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "hoc/curves.hpp"
#include "hoc/geometry.hpp"

namespace hoc {

/// One indexed record: identifier plus its scaled (longitude, latitude,
/// timestamp) position.
struct STObject {
    std::uint64_t id = 0;
    double x = 0;
    double y = 0;
    double t = 0;

    friend bool operator==(const STObject&, const STObject&) = default;
};

/// Tree parameters. The defaults are the library's standard experimental
/// domain: space [0, 10000]^2, time [0, 5000], deepest level 16, split
/// threshold 200.
struct IndexConfig {
    double x_lo = 0.0, x_hi = 10000.0;
    double y_lo = 0.0, y_hi = 10000.0;
    double t_lo = 0.0, t_hi = 5000.0;
    int max_depth = 16;                ///< deepest subdivision level L, in [1, 16]
    std::uint32_t split_threshold = 200; ///< leaf capacity before an octant split

    void validate() const;
    Box3 domain_box() const { return {x_lo, x_hi, y_lo, y_hi, t_lo, t_hi}; }
    bool in_domain(const STObject& o) const { return domain_box().contains(o.x, o.y, o.t); }

    friend bool operator==(const IndexConfig&, const IndexConfig&) = default;
};

/// Per-leaf spatial bounding rectangle, stored in 16 bytes: four single
/// precision values with minima rounded toward -inf and maxima toward +inf,
/// so the stored rectangle always contains the exact double-precision MBR.
struct MbrSign {
    float x_min = 0;
    float y_min = 0;
    float x_max = 0;
    float y_max = 0;

    bool contains(double x, double y) const {
        return x_min <= x && x <= x_max && y_min <= y && y <= y_max;
    }

    void expand(double x, double y);
    static MbrSign of_point(double x, double y);

    friend bool operator==(const MbrSign&, const MbrSign&) = default;
};

static_assert(sizeof(MbrSign) == 16, "MbrSign must stay a 16-byte tag");

/// Conservative 32-bit rectangle containing every (x, y) of `entries`.
MbrSign compute_mbrsign(std::span<const STObject> entries);

/// Cell index of `v` on `axis = [lo, hi]` subdivided into 2^depth cells.
/// Cells are half-open [bound(k), bound(k+1)) except the last, which is
/// closed so the domain maximum stays inside the grid. The result is exactly
/// consistent with cell_bound: bound(k) <= v and v < bound(k+1) unless
/// k == 2^depth - 1.
std::uint32_t quantize_axis(double v, double lo, double hi, int depth);

/// Boundary i of the depth-level subdivision of [lo, hi], for i in
/// [0, 2^depth]. bound(0) == lo and bound(2^depth) == hi exactly, and
/// boundaries nest exactly across depths.
double cell_bound(double lo, double hi, std::uint32_t i, int depth);

/// Cell of `p` at the given subdivision level.
CellCoord quantize(const STObject& p, const IndexConfig& cfg, int depth);

/// Closed geometric bounds of a cell's cube.
Box3 cell_box(const IndexConfig& cfg, const CellCoord& c);

/// Octree node. Internal nodes hold up to eight children indexed by octant
/// (t_bit<<2 | y_bit<<1 | x_bit); absent slots are empty cubes. Leaves hold
/// entries, a Morton label, and an MbrSign when non-empty.
struct Node {
    CellCoord cell;
    std::uint64_t label = 0;        ///< morton3_encode(cell).value
    std::uint64_t hilbert_cell = 0; ///< hilbert_encode(cx, cy, depth); 0 at the root
    bool leaf = true;
    std::array<std::unique_ptr<Node>, 8> children{};
    std::vector<STObject> entries;
    std::optional<MbrSign> mbr;
};

/// Inclusive interval of level-L Hilbert indices covered by the node's
/// spatial cell.
HilbertRange spatial_footprint(const Node& n, int level);

/// The HOC-Tree: an octree over (x, y, t) with Morton-labeled leaves and
/// MbrSign pruning tags. Built or mutated under exclusive access; a finished
/// tree is immutable and safe for any number of concurrent readers.
class HocTree {
public:
    explicit HocTree(IndexConfig cfg);

    HocTree(HocTree&&) noexcept = default;
    HocTree& operator=(HocTree&&) noexcept = default;

    /// Builds a tree over `objects`; deterministic for a given input order.
    static HocTree build(std::span<const STObject> objects, const IndexConfig& cfg);

    /// Reassembles a deserialized tree. Recomputes the id set, verifies the
    /// object count and id uniqueness; structural validation is the caller's
    /// job.
    static HocTree adopt(IndexConfig cfg, std::unique_ptr<Node> root,
                         std::size_t expected_count);

    void insert(const STObject& o);

    const IndexConfig& config() const noexcept { return cfg_; }
    const Node& root() const noexcept { return *root_; }
    std::size_t object_count() const noexcept { return count_; }
    int max_leaf_depth() const noexcept { return max_leaf_depth_; }

    std::size_t leaf_count() const;
    std::size_t non_empty_leaf_count() const;

    template <typename F>
    void for_each_leaf(F&& f) const {
        walk_leaves(root_.get(), f);
    }

    /// Non-empty leaves whose spatial footprint at level max_depth intersects
    /// [r.lo, r.hi].
    std::vector<const Node*> leaves_in_hilbert_range(const HilbertRange& r) const;

private:
    template <typename F>
    static void walk_leaves(const Node* n, F& f) {
        if (n->leaf) {
            f(*n);
            return;
        }
        for (const auto& c : n->children)
            if (c) walk_leaves(c.get(), f);
    }

    void split(Node& n);
    Node* ensure_child(Node& parent, const CellCoord& deep);

    IndexConfig cfg_;
    std::unique_ptr<Node> root_;
    std::size_t count_ = 0;
    int max_leaf_depth_ = 0;
    std::unordered_set<std::uint64_t> ids_;
};

} // namespace hoc
