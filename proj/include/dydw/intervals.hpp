#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "dydw/errors.hpp"
#include "dydw/rectangles.hpp"
#include "dydw/site.hpp"
#include "dydw/web.hpp"

namespace dydw {

// One clock ring whose redraw changed the arrow value.
struct SwitchRecord {
    double tau = 0.0;
    WebId web = WebId::main;
    SiteAddress site;
    std::int8_t old_value = 0;
    std::int8_t new_value = 0;
};

// Materialized arrow streams for a dependence region, addressable like a
// WebPair but O(log rings) per lookup.  Lookups outside the region throw:
// that is the runtime guarantee that the advertised region really covers
// everything an event evaluation can consult.
class RegionField {
  public:
    RegionField(const WebPair& web, const DependenceRegion& region) : tau_max_(web.tau_max()) {
        grids_[0].build(web, WebId::main, region.main);
        if (region.secondary) grids_[1].build(web, WebId::secondary, *region.secondary);
    }

    double tau_max() const { return tau_max_; }

    int arrow(WebId id, SiteAddress site, double tau) const {
        return stream(id, site).arrow_at(tau);
    }

    const ArrowStream& stream(WebId id, SiteAddress site) const {
        const Grid& g = grids_[static_cast<std::size_t>(id)];
        const ArrowStream* s = g.find(site);
        if (!s)
            throw IntegrityError(std::string("RegionField: ") + web_id_name(id) + " site (" +
                                 std::to_string(site.x) + "," + std::to_string(site.t) +
                                 ") consulted outside the dependence region");
        return *s;
    }

    // All switches in (a, b], globally sorted by tau.  Exact ring-time ties
    // are a measure-zero event the downstream endpoint attribution cannot
    // survive, so they are reported as a diagnostic error.
    std::vector<SwitchRecord> switches(double a, double b) const {
        std::vector<SwitchRecord> out;
        for (const Grid& g : grids_)
            g.collect_switches(a, b, out);
        std::sort(out.begin(), out.end(),
                  [](const SwitchRecord& u, const SwitchRecord& v) { return u.tau < v.tau; });
        for (std::size_t i = 1; i < out.size(); ++i)
            if (out[i].tau == out[i - 1].tau)
                throw TieError("switch_times: exact ring-time tie at tau = " +
                               std::to_string(out[i].tau));
        return out;
    }

  private:
    struct Grid {
        WebId id = WebId::main;
        int t0 = 0, t1 = 0, x_min = 0;
        int cols = 0;
        std::vector<ArrowStream> cells;
        std::vector<std::uint8_t> present;

        void build(const WebPair& web, WebId web_id, const SiteRegion& region) {
            id = web_id;
            t0 = region.t_begin;
            t1 = region.t_end;
            int lo = 0, hi = 0;
            bool first = true;
            for (int s = region.t_begin; s < region.t_end; ++s)
                for (auto [a, b] : region.row_spans(s)) {
                    lo = first ? a : std::min(lo, a);
                    hi = first ? b : std::max(hi, b);
                    first = false;
                }
            if (first) {  // empty region
                t1 = t0;
                return;
            }
            x_min = lo;
            cols = (hi - lo) / 2 + 1;
            cells.resize(static_cast<std::size_t>(t1 - t0) * cols);
            present.assign(cells.size(), 0);
            region.for_each_site([&](SiteAddress site) {
                const std::size_t i = index(site);
                cells[i] = web.arrow_stream(web_id, site);
                present[i] = 1;
            });
        }

        std::size_t index(SiteAddress s) const {
            return static_cast<std::size_t>(s.t - t0) * cols +
                   static_cast<std::size_t>(s.x - x_min) / 2;
        }

        const ArrowStream* find(SiteAddress s) const {
            if (s.t < t0 || s.t >= t1 || s.x < x_min) return nullptr;
            if ((s.x - x_min) / 2 >= cols) return nullptr;
            const std::size_t i = index(s);
            return present[i] ? &cells[i] : nullptr;
        }

        void collect_switches(double a, double b, std::vector<SwitchRecord>& out) const {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (!present[i]) continue;
                const ArrowStream& st = cells[i];
                for (std::size_t j = 0; j < st.ring_times.size(); ++j) {
                    const double r = st.ring_times[j];
                    if (r > a && r <= b && st.values[j + 1] != st.values[j])
                        out.push_back({r, id, st.site, st.values[j], st.values[j + 1]});
                }
            }
        }
    };

    Grid grids_[2];
    double tau_max_;
};

// Convenience wrapper matching the spec operation: all switches of a region
// in (window.first, window.second], sorted.
inline std::vector<SwitchRecord> switch_times(const WebPair& web, const DependenceRegion& region,
                                              double window_a, double window_b) {
    if (window_a > window_b || window_a < 0.0 || window_b > web.tau_max())
        throw WindowError("switch_times: window outside [0, tau_max]");
    RegionField field(web, region);
    return field.switches(window_a, window_b);
}

// Finite union of disjoint half-open intervals [a, b) inside a window.
// Every interior endpoint carries the switch that produced it.
struct TauIntervalSet {
    struct Member {
        double a = 0.0;
        double b = 0.0;
        std::optional<SwitchRecord> open_switch;   // absent when a is the window start
        std::optional<SwitchRecord> close_switch;  // absent when b is the window end
    };

    double window_a = 0.0;
    double window_b = 0.0;
    std::vector<Member> members;

    bool empty() const { return members.empty(); }

    double measure() const {
        double m = 0.0;
        for (const auto& iv : members) m += iv.b - iv.a;
        return m;
    }

    bool contains(double tau) const {
        for (const auto& iv : members)
            if (tau >= iv.a && tau < iv.b) return true;
        return false;
    }

    // Interior endpoints (strictly inside the window), each with its switch.
    std::vector<SwitchRecord> interior_endpoints() const {
        std::vector<SwitchRecord> out;
        for (const auto& iv : members) {
            if (iv.open_switch) out.push_back(*iv.open_switch);
            if (iv.close_switch) out.push_back(*iv.close_switch);
        }
        return out;
    }
};

// Exact {tau in [a, b) : eval(tau)} for an indicator that is right-continuous
// in tau and constant between switches of the supplied list.  Evaluates once
// per inter-switch gap.
template <typename Eval>
TauIntervalSet interval_set_from_switches(const std::vector<SwitchRecord>& switches, double a,
                                          double b, Eval&& eval) {
    TauIntervalSet set;
    set.window_a = a;
    set.window_b = b;
    if (!(a < b)) return set;

    bool open = false;
    TauIntervalSet::Member cur;
    auto open_at = [&](double tau, const SwitchRecord* sw) {
        cur = {};
        cur.a = tau;
        if (sw) cur.open_switch = *sw;
        open = true;
    };
    auto close_at = [&](double tau, const SwitchRecord* sw) {
        cur.b = tau;
        if (sw) cur.close_switch = *sw;
        set.members.push_back(cur);
        open = false;
    };

    bool value = eval(a);
    if (value) open_at(a, nullptr);
    for (const SwitchRecord& sw : switches) {
        if (sw.tau <= a || sw.tau >= b) continue;
        const bool v = eval(sw.tau);
        if (v && !value) open_at(sw.tau, &sw);
        if (!v && value) close_at(sw.tau, &sw);
        value = v;
    }
    if (open) close_at(b, nullptr);
    return set;
}

// Exact set of dynamical times in [window_a, window_b) at which the event
// holds, for one realization of the web pair.
inline TauIntervalSet tau_interval_set(const WebPair& web, const EventSpec& spec, double window_a,
                                       double window_b) {
    spec.validate();
    if (window_a > window_b || window_a < 0.0 || window_b > web.tau_max())
        throw WindowError("tau_interval_set: window outside [0, tau_max]");
    const RegionField field(web, dependence_region(spec));
    const auto switches = field.switches(window_a, window_b);
    return interval_set_from_switches(switches, window_a, window_b,
                                      [&](double tau) { return evaluate_event(field, spec, tau); });
}

// Set intersection of two exact interval sets (same window).
inline TauIntervalSet intersect(const TauIntervalSet& u, const TauIntervalSet& v) {
    TauIntervalSet out;
    out.window_a = std::max(u.window_a, v.window_a);
    out.window_b = std::min(u.window_b, v.window_b);
    std::size_t i = 0, j = 0;
    while (i < u.members.size() && j < v.members.size()) {
        const auto& p = u.members[i];
        const auto& q = v.members[j];
        const double lo = std::max(p.a, q.a);
        const double hi = std::min(p.b, q.b);
        if (lo < hi) {
            TauIntervalSet::Member m;
            m.a = lo;
            m.b = hi;
            m.open_switch = (p.a >= q.a) ? p.open_switch : q.open_switch;
            m.close_switch = (p.b <= q.b) ? p.close_switch : q.close_switch;
            out.members.push_back(m);
        }
        if (p.b <= q.b)
            ++i;
        else
            ++j;
    }
    return out;
}

// E_n for one web realization: exact intersection of the per-k interval sets
// of C_0 .. C_n over the window.
inline TauIntervalSet exceptional_search_sub(const WebPair& web, const RectangleStack& stack,
                                             int n, double window_a, double window_b) {
    if (n < 0 || n > stack.k_max) throw HorizonError("exceptional_search_sub: n beyond stack");
    TauIntervalSet acc = tau_interval_set(web, {EventKind::C, 0, stack}, window_a, window_b);
    for (int k = 1; k <= n && !acc.empty(); ++k)
        acc = intersect(acc, tau_interval_set(web, {EventKind::C, k, stack}, window_a, window_b));
    if (acc.empty()) {
        acc.window_a = window_a;
        acc.window_b = window_b;
        acc.members.clear();
    }
    return acc;
}

// One closed interval of the nested superdiffusive search.
struct ClosedInterval {
    double a = 0.0;
    double b = 0.0;
};

struct NestedSearchResult {
    std::vector<int> k_done;              // indices successfully descended into
    std::vector<ClosedInterval> levels;   // chosen interval per completed depth
    bool exhausted = false;               // processed the whole k list
};

// The nested-interval procedure: starting from the window, for each k pick a
// maximal closed interval inside E-hat_k intersected with the current
// interval (largest piece; right endpoint backed off one ulp when the piece
// is closed by a switch, kept when it is clipped by the window).  Stops at
// the first empty intersection.
inline NestedSearchResult exceptional_search_super(const WebPair& web,
                                                   const RectangleStack& stack,
                                                   const std::vector<int>& k_list,
                                                   double window_a, double window_b) {
    NestedSearchResult res;
    double a = window_a, b = window_b;
    for (int k : k_list) {
        const auto set = tau_interval_set(web, {EventKind::a_hat, k, stack}, a, b);
        if (set.empty()) return res;
        const TauIntervalSet::Member* best = &set.members.front();
        for (const auto& m : set.members)
            if (m.b - m.a > best->b - best->a) best = &m;
        const double hi =
            best->close_switch ? std::nextafter(best->b, -1.0) : best->b;
        if (!(best->a <= hi)) return res;
        a = best->a;
        b = hi;
        res.k_done.push_back(k);
        res.levels.push_back({a, b});
    }
    res.exhausted = true;
    return res;
}

// Endpoint census for an Upsilon event: every boundary point of the exact
// interval set, attributed to the switch that produced it.
struct CensusReport {
    TauIntervalSet set;
    std::size_t endpoint_count = 0;
    std::vector<std::pair<SiteAddress, int>> per_site;  // sorted by site
};

inline CensusReport pivotal_endpoint_census(const WebPair& web, const EventSpec& spec,
                                            double window_a, double window_b) {
    if (spec.kind != EventKind::upsilon)
        throw ValidationError("pivotal_endpoint_census: spec kind must be Upsilon");
    CensusReport rep;
    rep.set = tau_interval_set(web, spec, window_a, window_b);
    std::vector<SiteAddress> sites;
    for (const auto& sw : rep.set.interior_endpoints()) {
        ++rep.endpoint_count;
        sites.push_back(sw.site);
    }
    std::sort(sites.begin(), sites.end());
    for (std::size_t i = 0; i < sites.size();) {
        std::size_t j = i;
        while (j < sites.size() && sites[j] == sites[i]) ++j;
        rep.per_site.emplace_back(sites[i], static_cast<int>(j - i));
        i = j;
    }
    return rep;
}

}  // namespace dydw
