#include "hoc/index.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hoc/errors.hpp"

namespace hoc {

void IndexConfig::validate() const {
    const bool finite = std::isfinite(x_lo) && std::isfinite(x_hi) && std::isfinite(y_lo) &&
                        std::isfinite(y_hi) && std::isfinite(t_lo) && std::isfinite(t_hi);
    if (!finite)
        throw domain_error("index config bounds must be finite");
    if (!(x_lo < x_hi) || !(y_lo < y_hi) || !(t_lo < t_hi))
        throw domain_error("index config requires lo < hi on every axis");
    if (max_depth < 1 || max_depth > kMaxOrder)
        throw domain_error("max_depth " + std::to_string(max_depth) + " outside [1, " +
                           std::to_string(kMaxOrder) + "]");
    if (split_threshold < 1)
        throw domain_error("split_threshold must be >= 1");
}

namespace {

float round_down_f32(double v) {
    auto f = static_cast<float>(v);
    if (static_cast<double>(f) > v)
        f = std::nextafterf(f, -std::numeric_limits<float>::infinity());
    return f;
}

float round_up_f32(double v) {
    auto f = static_cast<float>(v);
    if (static_cast<double>(f) < v)
        f = std::nextafterf(f, std::numeric_limits<float>::infinity());
    return f;
}

} // namespace

void MbrSign::expand(double x, double y) {
    x_min = std::min(x_min, round_down_f32(x));
    y_min = std::min(y_min, round_down_f32(y));
    x_max = std::max(x_max, round_up_f32(x));
    y_max = std::max(y_max, round_up_f32(y));
}

MbrSign MbrSign::of_point(double x, double y) {
    return {round_down_f32(x), round_down_f32(y), round_up_f32(x), round_up_f32(y)};
}

MbrSign compute_mbrsign(std::span<const STObject> entries) {
    if (entries.empty())
        throw domain_error("compute_mbrsign requires at least one entry");
    MbrSign tag = MbrSign::of_point(entries[0].x, entries[0].y);
    for (const auto& e : entries.subspan(1))
        tag.expand(e.x, e.y);
    return tag;
}

double cell_bound(double lo, double hi, std::uint32_t i, int depth) {
    const std::uint32_t n = 1u << depth;
    if (i == 0)
        return lo;
    if (i >= n)
        return hi;
    return lo + (static_cast<double>(i) * (hi - lo)) / n;
}

std::uint32_t quantize_axis(double v, double lo, double hi, int depth) {
    const std::uint32_t n = 1u << depth;
    const double scaled = (v - lo) / (hi - lo) * n;
    std::uint32_t k;
    if (!(scaled > 0))
        k = 0;
    else if (scaled >= n - 1)
        k = n - 1;
    else
        k = static_cast<std::uint32_t>(scaled);
    // Rounding in `scaled` can miss the true cell by one near a boundary; pin
    // the result to the cell_bound partition so membership is exact.
    while (k > 0 && v < cell_bound(lo, hi, k, depth))
        --k;
    while (k + 1 < n && v >= cell_bound(lo, hi, k + 1, depth))
        ++k;
    return k;
}

CellCoord quantize(const STObject& p, const IndexConfig& cfg, int depth) {
    if (depth < 0 || depth > cfg.max_depth)
        throw domain_error("quantize depth " + std::to_string(depth) +
                           " outside [0, max_depth]");
    if (!cfg.in_domain(p))
        throw domain_error("object " + std::to_string(p.id) +
                           " outside the configured domain");
    return {quantize_axis(p.x, cfg.x_lo, cfg.x_hi, depth),
            quantize_axis(p.y, cfg.y_lo, cfg.y_hi, depth),
            quantize_axis(p.t, cfg.t_lo, cfg.t_hi, depth), depth};
}

Box3 cell_box(const IndexConfig& cfg, const CellCoord& c) {
    return {cell_bound(cfg.x_lo, cfg.x_hi, c.cx, c.depth),
            cell_bound(cfg.x_lo, cfg.x_hi, c.cx + 1, c.depth),
            cell_bound(cfg.y_lo, cfg.y_hi, c.cy, c.depth),
            cell_bound(cfg.y_lo, cfg.y_hi, c.cy + 1, c.depth),
            cell_bound(cfg.t_lo, cfg.t_hi, c.ct, c.depth),
            cell_bound(cfg.t_lo, cfg.t_hi, c.ct + 1, c.depth)};
}

HilbertRange spatial_footprint(const Node& n, int level) {
    if (n.cell.depth == 0)
        return {0, (std::uint64_t{1} << (2 * level)) - 1};
    const int shift = 2 * (level - n.cell.depth);
    const std::uint64_t lo = n.hilbert_cell << shift;
    return {lo, lo + ((std::uint64_t{1} << shift) - 1)};
}

namespace {

// Octant of the depth-`child_depth` cell on the path to `deep`.
inline int octant_bits(const CellCoord& deep, int child_depth, int max_depth) {
    const int s = max_depth - child_depth;
    return static_cast<int>((((deep.ct >> s) & 1u) << 2) | (((deep.cy >> s) & 1u) << 1) |
                            ((deep.cx >> s) & 1u));
}

inline CellCoord cell_at(const CellCoord& deep, int depth, int max_depth) {
    const int s = max_depth - depth;
    return {deep.cx >> s, deep.cy >> s, deep.ct >> s, depth};
}

} // namespace

HocTree::HocTree(IndexConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    root_ = std::make_unique<Node>();
    root_->cell = CellCoord{0, 0, 0, 0};
}

HocTree HocTree::build(std::span<const STObject> objects, const IndexConfig& cfg) {
    HocTree t(cfg);
    for (const auto& o : objects)
        t.insert(o);
    return t;
}

HocTree HocTree::adopt(IndexConfig cfg, std::unique_ptr<Node> root,
                       std::size_t expected_count) {
    HocTree t(cfg);
    if (!root)
        throw domain_error("adopt requires a root node");
    t.root_ = std::move(root);

    std::size_t n = 0;
    int deepest = 0;
    t.for_each_leaf([&](const Node& leaf) {
        deepest = std::max(deepest, leaf.cell.depth);
        for (const auto& e : leaf.entries) {
            if (!t.ids_.insert(e.id).second)
                throw duplicate_id_error(e.id);
            ++n;
        }
    });
    if (n != expected_count)
        throw domain_error("adopt: leaf entries total " + std::to_string(n) +
                           ", expected " + std::to_string(expected_count));
    t.count_ = n;
    t.max_leaf_depth_ = deepest;
    return t;
}

Node* HocTree::ensure_child(Node& parent, const CellCoord& deep) {
    const int d = parent.cell.depth + 1;
    auto& slot = parent.children[octant_bits(deep, d, cfg_.max_depth)];
    if (!slot) {
        slot = std::make_unique<Node>();
        slot->cell = cell_at(deep, d, cfg_.max_depth);
        slot->label = morton3_encode(slot->cell).value;
        slot->hilbert_cell = hilbert_encode(slot->cell.cx, slot->cell.cy, d);
        max_leaf_depth_ = std::max(max_leaf_depth_, d);
    }
    return slot.get();
}

void HocTree::insert(const STObject& o) {
    if (!cfg_.in_domain(o))
        throw domain_error("object " + std::to_string(o.id) +
                           " outside the configured domain");
    if (ids_.contains(o.id))
        throw duplicate_id_error(o.id);

    const CellCoord deep = quantize(o, cfg_, cfg_.max_depth);
    Node* n = root_.get();
    while (!n->leaf)
        n = ensure_child(*n, deep);

    n->entries.push_back(o);
    if (n->mbr)
        n->mbr->expand(o.x, o.y);
    else
        n->mbr = MbrSign::of_point(o.x, o.y);
    ids_.insert(o.id);
    ++count_;

    if (n->entries.size() > cfg_.split_threshold && n->cell.depth < cfg_.max_depth)
        split(*n);
}

void HocTree::split(Node& n) {
    auto entries = std::move(n.entries);
    n.entries.clear();
    n.entries.shrink_to_fit();
    n.mbr.reset();
    n.leaf = false;

    for (const auto& e : entries) {
        const CellCoord deep = quantize(e, cfg_, cfg_.max_depth);
        Node* child = ensure_child(n, deep);
        child->entries.push_back(e);
        if (child->mbr)
            child->mbr->expand(e.x, e.y);
        else
            child->mbr = MbrSign::of_point(e.x, e.y);
    }

    for (auto& c : n.children)
        if (c && c->entries.size() > cfg_.split_threshold &&
            c->cell.depth < cfg_.max_depth)
            split(*c);
}

std::size_t HocTree::leaf_count() const {
    std::size_t n = 0;
    for_each_leaf([&](const Node&) { ++n; });
    return n;
}

std::size_t HocTree::non_empty_leaf_count() const {
    std::size_t n = 0;
    for_each_leaf([&](const Node& leaf) {
        if (!leaf.entries.empty())
            ++n;
    });
    return n;
}

std::vector<const Node*> HocTree::leaves_in_hilbert_range(const HilbertRange& r) const {
    const std::uint64_t top = (std::uint64_t{1} << (2 * cfg_.max_depth)) - 1;
    if (r.lo > r.hi || r.hi > top)
        throw domain_error("hilbert range invalid at level " +
                           std::to_string(cfg_.max_depth));

    std::vector<const Node*> out;
    auto visit = [&](auto&& self, const Node& n) -> void {
        const HilbertRange f = spatial_footprint(n, cfg_.max_depth);
        if (f.hi < r.lo || f.lo > r.hi)
            return;
        if (n.leaf) {
            if (!n.entries.empty())
                out.push_back(&n);
            return;
        }
        for (const auto& c : n.children)
            if (c)
                self(self, *c);
    };
    visit(visit, *root_);
    return out;
}

} // namespace hoc
