#pragma once

#include <algorithm>

#include "hoc/errors.hpp"

namespace hoc {

/// Closed axis-aligned 3D box over (x, y, t).
struct Box3 {
    double x_min = 0, x_max = 0;
    double y_min = 0, y_max = 0;
    double t_min = 0, t_max = 0;

    bool empty() const { return x_min > x_max || y_min > y_max || t_min > t_max; }

    bool contains(double x, double y, double t) const {
        return x_min <= x && x <= x_max && y_min <= y && y <= y_max && t_min <= t &&
               t <= t_max;
    }

    bool contains(const Box3& o) const {
        return x_min <= o.x_min && o.x_max <= x_max && y_min <= o.y_min &&
               o.y_max <= y_max && t_min <= o.t_min && o.t_max <= t_max;
    }

    bool intersects(const Box3& o) const {
        return x_min <= o.x_max && o.x_min <= x_max && y_min <= o.y_max &&
               o.y_min <= y_max && t_min <= o.t_max && o.t_min <= t_max;
    }
};

/// Spatio-temporal range query ([x_min,x_max], [y_min,y_max], [t_start,t_end]).
/// All six bounds are closed.
struct RangeQuery {
    double x_min = 0, x_max = 0;
    double y_min = 0, y_max = 0;
    double t_start = 0, t_end = 0;

    void validate() const {
        if (x_min > x_max || y_min > y_max || t_start > t_end)
            throw domain_error("inverted range query bounds");
    }

    bool contains(double x, double y, double t) const {
        return x_min <= x && x <= x_max && y_min <= y && y <= y_max && t_start <= t &&
               t <= t_end;
    }

    Box3 box() const { return {x_min, x_max, y_min, y_max, t_start, t_end}; }
};

/// Intersection of q with `domain`; may come out empty.
inline Box3 clip(const RangeQuery& q, const Box3& domain) {
    return {std::max(q.x_min, domain.x_min), std::min(q.x_max, domain.x_max),
            std::max(q.y_min, domain.y_min), std::min(q.y_max, domain.y_max),
            std::max(q.t_start, domain.t_min), std::min(q.t_end, domain.t_max)};
}

} // namespace hoc
