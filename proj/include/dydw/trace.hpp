#pragma once

#include <utility>
#include <vector>

#include "dydw/site.hpp"
#include "dydw/web.hpp"

namespace dydw {

// A traced walk: positions[i] is S(origin.t + i), i = 0 .. t_end - origin.t.
struct PathTrace {
    SiteAddress origin;
    double tau = 0.0;
    std::vector<int> positions;

    int position_at(int t) const { return positions[static_cast<std::size_t>(t - origin.t)]; }
    int t_begin() const { return origin.t; }
    int t_end() const { return origin.t + static_cast<int>(positions.size()) - 1; }
};

// Follows the main-web arrows from origin up to path time t_end.
template <ArrowField F>
PathTrace trace_path(const F& field, SiteAddress origin, double tau, int t_end) {
    require_even_site(origin, "trace origin");
    if (t_end < origin.t) throw GeometryError("trace_path: t_end < origin.t");
    PathTrace tr;
    tr.origin = origin;
    tr.tau = tau;
    tr.positions.reserve(static_cast<std::size_t>(t_end - origin.t) + 1);
    int x = origin.x;
    tr.positions.push_back(x);
    for (int t = origin.t; t < t_end; ++t) {
        x += field.arrow(WebId::main, {x, t}, tau);
        tr.positions.push_back(x);
    }
    return tr;
}

// Non-coalescing pair: the left path always follows the main web; the right
// path follows the main web except on steps where it sits on top of the left
// path, where it reads the secondary web at the same site instead.  The pair
// is distributed as two independent simple symmetric random walks.
template <ArrowField F>
std::pair<PathTrace, PathTrace> trace_pair_noncoalescing(const F& field, SiteAddress left,
                                                         SiteAddress right, double tau,
                                                         int t_end) {
    require_even_site(left, "left origin");
    require_even_site(right, "right origin");
    if (left.t != right.t) throw GeometryError("trace_pair: start times differ");
    if (!(left.x < right.x)) throw GeometryError("trace_pair: left.x must be < right.x");
    if (t_end < left.t) throw GeometryError("trace_pair: t_end < start time");

    PathTrace l, r;
    l.origin = left;
    r.origin = right;
    l.tau = r.tau = tau;
    const std::size_t n = static_cast<std::size_t>(t_end - left.t) + 1;
    l.positions.reserve(n);
    r.positions.reserve(n);
    int xl = left.x, xr = right.x;
    l.positions.push_back(xl);
    r.positions.push_back(xr);
    for (int t = left.t; t < t_end; ++t) {
        const int step_l = field.arrow(WebId::main, {xl, t}, tau);
        const int step_r = (xr == xl) ? field.arrow(WebId::secondary, {xr, t}, tau)
                                      : field.arrow(WebId::main, {xr, t}, tau);
        xl += step_l;
        xr += step_r;
        l.positions.push_back(xl);
        r.positions.push_back(xr);
    }
    return {std::move(l), std::move(r)};
}

}  // namespace dydw
