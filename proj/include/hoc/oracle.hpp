#pragma once

#include <span>
#include <vector>

#include "hoc/geometry.hpp"
#include "hoc/index.hpp"

namespace hoc {

/// Brute-force linear scan answering the range-search contract without any
/// index: exactly the objects inside q's closed 3D box, sorted by id.
/// Ground truth for every indexed method and the benchmark baseline.
std::vector<STObject> scan_range(std::span<const STObject> objects, const RangeQuery& q);

} // namespace hoc
