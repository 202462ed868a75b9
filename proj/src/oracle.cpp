#include "hoc/oracle.hpp"

#include <algorithm>

namespace hoc {

std::vector<STObject> scan_range(std::span<const STObject> objects, const RangeQuery& q) {
    q.validate();
    std::vector<STObject> out;
    for (const auto& o : objects)
        if (q.contains(o.x, o.y, o.t))
            out.push_back(o);
    std::sort(out.begin(), out.end(),
              [](const STObject& a, const STObject& b) { return a.id < b.id; });
    return out;
}

} // namespace hoc
