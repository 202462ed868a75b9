#include "hoc/curves.hpp"

#include <algorithm>

#include "hoc/errors.hpp"

namespace hoc {

namespace {

void check_order(int order) {
    if (order < 1 || order > kMaxOrder)
        throw domain_error("curve order " + std::to_string(order) + " outside [1, " +
                           std::to_string(kMaxOrder) + "]");
}

// Rotate/reflect the quadrant frame so the remaining low bits are traversed
// in canonical orientation. Wraparound in the reflection is harmless: only
// bits below the current level are examined afterwards.
inline void rotate_quadrant(std::uint32_t side, std::uint32_t& x, std::uint32_t& y,
                            std::uint32_t rx, std::uint32_t ry) {
    if (ry == 0) {
        if (rx == 1) {
            x = side - 1 - x;
            y = side - 1 - y;
        }
        std::swap(x, y);
    }
}

} // namespace

std::uint64_t hilbert_encode(std::uint32_t cx, std::uint32_t cy, int order) {
    check_order(order);
    const std::uint32_t n = 1u << order;
    if (cx >= n || cy >= n)
        throw domain_error("cell (" + std::to_string(cx) + ", " + std::to_string(cy) +
                           ") outside order-" + std::to_string(order) + " grid");

    std::uint64_t h = 0;
    for (int k = order - 1; k >= 0; --k) {
        const std::uint32_t s = 1u << k;
        const std::uint32_t rx = (cx & s) ? 1u : 0u;
        const std::uint32_t ry = (cy & s) ? 1u : 0u;
        h += static_cast<std::uint64_t>(s) * s * ((3u * rx) ^ ry);
        rotate_quadrant(s, cx, cy, rx, ry);
    }
    return h;
}

std::pair<std::uint32_t, std::uint32_t> hilbert_decode(std::uint64_t h, int order) {
    check_order(order);
    if (h >> (2 * order))
        throw domain_error("hilbert value " + std::to_string(h) + " outside order-" +
                           std::to_string(order) + " curve");

    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint64_t t = h;
    for (int k = 0; k < order; ++k) {
        const std::uint32_t s = 1u << k;
        const std::uint32_t rx = 1u & static_cast<std::uint32_t>(t >> 1);
        const std::uint32_t ry = 1u & static_cast<std::uint32_t>(t ^ rx);
        rotate_quadrant(s, x, y, rx, ry);
        x += s * rx;
        y += s * ry;
        t >>= 2;
    }
    return {x, y};
}

namespace {

void check_rect(const CellRect& rect, int order) {
    check_order(order);
    const std::uint32_t n = 1u << order;
    if (rect.cx_lo > rect.cx_hi || rect.cy_lo > rect.cy_hi)
        throw domain_error("empty or inverted cell rectangle");
    if (rect.cx_hi >= n || rect.cy_hi >= n)
        throw domain_error("cell rectangle outside order-" + std::to_string(order) + " grid");
}

void cover_square(const CellRect& rect, int order, std::uint32_t x0, std::uint32_t y0,
                  int size_log, std::vector<HilbertRange>& out) {
    const std::uint32_t hi_x = x0 + (1u << size_log) - 1;
    const std::uint32_t hi_y = y0 + (1u << size_log) - 1;
    if (hi_x < rect.cx_lo || x0 > rect.cx_hi || hi_y < rect.cy_lo || y0 > rect.cy_hi)
        return;

    const bool contained = x0 >= rect.cx_lo && hi_x <= rect.cx_hi && y0 >= rect.cy_lo &&
                           hi_y <= rect.cy_hi;
    if (contained) {
        // An aligned 2^k square holds one contiguous block of 4^k indices whose
        // position is the square's Hilbert index on the coarsened grid.
        const std::uint64_t base =
            size_log == order
                ? 0
                : hilbert_encode(x0 >> size_log, y0 >> size_log, order - size_log)
                      << (2 * size_log);
        out.push_back({base, base + ((std::uint64_t{1} << (2 * size_log)) - 1)});
        return;
    }

    const int k = size_log - 1;
    const std::uint32_t half = 1u << k;
    cover_square(rect, order, x0, y0, k, out);
    cover_square(rect, order, x0 + half, y0, k, out);
    cover_square(rect, order, x0, y0 + half, k, out);
    cover_square(rect, order, x0 + half, y0 + half, k, out);
}

std::vector<HilbertRange> merge_sorted_ranges(std::vector<HilbertRange> ranges) {
    std::sort(ranges.begin(), ranges.end(),
              [](const HilbertRange& a, const HilbertRange& b) { return a.lo < b.lo; });
    std::vector<HilbertRange> out;
    for (const auto& r : ranges) {
        if (!out.empty() && r.lo <= out.back().hi + 1)
            out.back().hi = std::max(out.back().hi, r.hi);
        else
            out.push_back(r);
    }
    return out;
}

} // namespace

std::vector<std::uint64_t> get_hilbert_values(const CellRect& rect, int order) {
    check_rect(rect, order);
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(rect.cx_hi - rect.cx_lo + 1) *
                (rect.cy_hi - rect.cy_lo + 1));
    for (std::uint32_t cy = rect.cy_lo; cy <= rect.cy_hi; ++cy)
        for (std::uint32_t cx = rect.cx_lo; cx <= rect.cx_hi; ++cx)
            out.push_back(hilbert_encode(cx, cy, order));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<HilbertRange> coalesce_regions(std::vector<std::uint64_t> values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    std::vector<HilbertRange> out;
    for (std::uint64_t v : values) {
        if (!out.empty() && v == out.back().hi + 1)
            out.back().hi = v;
        else
            out.push_back({v, v});
    }
    return out;
}

std::vector<HilbertRange> hilbert_covering_ranges(const CellRect& rect, int order) {
    check_rect(rect, order);
    std::vector<HilbertRange> ranges;
    cover_square(rect, order, 0, 0, order, ranges);
    return merge_sorted_ranges(std::move(ranges));
}

MortonKey morton3_encode(const CellCoord& c) {
    if (c.depth < 0 || c.depth > kMaxOrder)
        throw domain_error("cell depth " + std::to_string(c.depth) + " outside [0, " +
                           std::to_string(kMaxOrder) + "]");
    const std::uint32_t n = 1u << c.depth;
    if (c.cx >= n || c.cy >= n || c.ct >= n)
        throw domain_error("cell coordinates do not fit in " + std::to_string(c.depth) +
                           " bits");

    std::uint64_t v = 0;
    for (int k = c.depth - 1; k >= 0; --k) {
        v = (v << 3) | (static_cast<std::uint64_t>((c.ct >> k) & 1u) << 2) |
            (static_cast<std::uint64_t>((c.cy >> k) & 1u) << 1) |
            (static_cast<std::uint64_t>((c.cx >> k) & 1u));
    }
    return {v, c.depth};
}

CellCoord morton3_decode(const MortonKey& k) {
    if (k.depth < 0 || k.depth > kMaxOrder)
        throw domain_error("morton depth " + std::to_string(k.depth) + " outside [0, " +
                           std::to_string(kMaxOrder) + "]");
    if (k.value >> (3 * k.depth))
        throw domain_error("morton value " + std::to_string(k.value) + " outside depth-" +
                           std::to_string(k.depth) + " range");

    CellCoord c{0, 0, 0, k.depth};
    for (int i = 0; i < k.depth; ++i) {
        const auto oct = static_cast<std::uint32_t>((k.value >> (3 * i)) & 7u);
        c.cx |= (oct & 1u) << i;
        c.cy |= ((oct >> 1) & 1u) << i;
        c.ct |= ((oct >> 2) & 1u) << i;
    }
    return c;
}

} // namespace hoc
