#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace hoc {

/// Largest supported curve order / subdivision depth. Hilbert values then fit
/// in 32 bits and Morton keys in 48 bits; both are stored in 64-bit integers.
inline constexpr int kMaxOrder = 16;

/// Discrete cell address in the level-`depth` subdivision of the domain cube.
/// Each coordinate fits in `depth` bits.
struct CellCoord {
    std::uint32_t cx = 0;
    std::uint32_t cy = 0;
    std::uint32_t ct = 0;
    int depth = 0;

    friend bool operator==(const CellCoord&, const CellCoord&) = default;
};

/// Morton (z-order) key: 3*depth interleaved bits, per level (t,y,x) with the
/// x bit in the least significant position, most significant level first.
struct MortonKey {
    std::uint64_t value = 0;
    int depth = 0;

    friend bool operator==(const MortonKey&, const MortonKey&) = default;
};

/// Inclusive run [lo, hi] of consecutive Hilbert indices.
struct HilbertRange {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;

    friend bool operator==(const HilbertRange&, const HilbertRange&) = default;
};

/// Axis-aligned rectangle of grid cells, inclusive on all four sides.
struct CellRect {
    std::uint32_t cx_lo = 0;
    std::uint32_t cx_hi = 0;
    std::uint32_t cy_lo = 0;
    std::uint32_t cy_hi = 0;
};

/// Position of cell (cx, cy) along the order-`order` Hilbert traversal.
/// Convention: traversal starts at (0,0); at order 1 the visit sequence is
/// (0,0) -> (0,1) -> (1,1) -> (1,0).
std::uint64_t hilbert_encode(std::uint32_t cx, std::uint32_t cy, int order);

/// Inverse of hilbert_encode.
std::pair<std::uint32_t, std::uint32_t> hilbert_decode(std::uint64_t h, int order);

/// Hilbert indices of every cell in `rect`, sorted ascending. Reference
/// per-cell enumeration; cost is proportional to the cell count.
std::vector<std::uint64_t> get_hilbert_values(const CellRect& rect, int order);

/// Minimal list of maximal contiguous inclusive ranges whose union equals the
/// input set, sorted ascending. Duplicates in the input are tolerated.
std::vector<HilbertRange> coalesce_regions(std::vector<std::uint64_t> values);

/// Same output as coalesce_regions(get_hilbert_values(rect, order)) computed
/// by quadrant recursion: a fully covered aligned square contributes one whole
/// range, so cost scales with the rectangle perimeter instead of its area.
std::vector<HilbertRange> hilbert_covering_ranges(const CellRect& rect, int order);

/// Bit-interleaved Morton key of `c`.
MortonKey morton3_encode(const CellCoord& c);

/// Inverse of morton3_encode.
CellCoord morton3_decode(const MortonKey& k);

} // namespace hoc
