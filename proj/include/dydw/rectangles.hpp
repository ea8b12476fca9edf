#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dydw/errors.hpp"
#include "dydw/site.hpp"
#include "dydw/trace.hpp"
#include "dydw/web.hpp"

namespace dydw {

// Rounds away from the axis to the nearest even integer (Remark-1 skew
// rounding).  The epsilon absorbs float noise on exact products.
inline int round_out_even(double v) {
    if (!(v > 0.0)) throw GeometryError("round_out_even: value must be > 0");
    return 2 * static_cast<int>(std::ceil(v / 2.0 - 1e-9));
}

// The stack of rectangles R_k (subdiffusive, width 2 d_k) and the widths w_k
// of the superdiffusive stack R-hat_k.  All derived quantities are integers:
//   d_k = 2(floor(gamma^k / 2) + 1)
//   t_0 = 0, t_{k+1} = t_k + d_k^2
//   w_k = 2(floor(alpha sqrt(log(d_k^2) d_k^2) / 2) + 1)      (natural log)
// Skew factors scale the left/right half-widths of R_k (round_out_even).
struct RectangleStack {
    double gamma = 0.0;
    double width_alpha = 0.0;
    double skew_left = 1.0;
    double skew_right = 1.0;
    int k_max = 0;

    std::vector<int> d;            // 0..k_max
    std::vector<long long> t;      // 0..k_max+1, lower-edge times
    std::vector<int> w;            // 0..k_max
    std::vector<int> left_edge;    // 0..k_max, magnitude of the left edge
    std::vector<int> right_edge;   // 0..k_max

    long long horizon() const { return t.back(); }

    // Corner sites of the spec: l_k / r_k are the upper corners of R_{k-1},
    // l-hat_k / r-hat_k those of R-hat_{k-1}.
    SiteAddress corner_l(int k) const { return {-left_edge[k - 1], t_int(k)}; }
    SiteAddress corner_r(int k) const { return {right_edge[k - 1], t_int(k)}; }
    SiteAddress corner_l_hat(int k) const { return {-w[k - 1], t_int(k)}; }
    SiteAddress corner_r_hat(int k) const { return {w[k - 1], t_int(k)}; }

    int t_int(int k) const { return static_cast<int>(t[static_cast<std::size_t>(k)]); }
};

inline RectangleStack make_stack(double gamma, double width_alpha, int k_max,
                                 double skew_left = 1.0, double skew_right = 1.0) {
    if (!(gamma > 1.0)) throw GeometryError("make_stack: gamma must be > 1");
    if (!(width_alpha > 0.0)) throw GeometryError("make_stack: width_alpha must be > 0");
    if (k_max < 1 || k_max > 24) throw GeometryError("make_stack: k_max out of range [1,24]");
    if (!(skew_left > 0.0) || !(skew_right > 0.0))
        throw GeometryError("make_stack: skew factors must be > 0");

    RectangleStack s;
    s.gamma = gamma;
    s.width_alpha = width_alpha;
    s.skew_left = skew_left;
    s.skew_right = skew_right;
    s.k_max = k_max;
    s.t.push_back(0);
    double gk = 1.0;
    for (int k = 0; k <= k_max; ++k, gk *= gamma) {
        const int dk = 2 * (static_cast<int>(std::floor(gk / 2.0)) + 1);
        s.d.push_back(dk);
        const double n = static_cast<double>(dk) * dk;
        s.w.push_back(2 * (static_cast<int>(std::floor(width_alpha * std::sqrt(std::log(n) * n) / 2.0)) + 1));
        s.left_edge.push_back(skew_left == 1.0 ? dk : round_out_even(skew_left * dk));
        s.right_edge.push_back(skew_right == 1.0 ? dk : round_out_even(skew_right * dk));
        s.t.push_back(s.t.back() + static_cast<long long>(dk) * dk);
        if (s.t.back() > (1ll << 30)) throw GeometryError("make_stack: stack horizon too large");
    }
    return s;
}

// Re-derives the stack with new skew factors; heights unchanged.
inline RectangleStack skew_stack(const RectangleStack& base, double c_left, double c_right) {
    return make_stack(base.gamma, base.width_alpha, base.k_max, c_left, c_right);
}

// Right edge of the stack as a step function of path time.
inline int sigma_gamma(const RectangleStack& stack, long long t) {
    if (t < 0 || t >= stack.horizon())
        throw HorizonError("sigma_gamma: t beyond computed stack");
    const auto it = std::upper_bound(stack.t.begin(), stack.t.end(), t);
    const int k = static_cast<int>(it - stack.t.begin()) - 1;
    return stack.right_edge[static_cast<std::size_t>(k)];
}

enum class EventKind { B, C, a_hat, upsilon };

inline const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::B: return "B";
        case EventKind::C: return "C";
        case EventKind::a_hat: return "Ahat";
        default: return "Upsilon";
    }
}

inline EventKind parse_event_kind(const std::string& s) {
    if (s == "B") return EventKind::B;
    if (s == "C") return EventKind::C;
    if (s == "Ahat" || s == "A" || s == "ahat") return EventKind::a_hat;
    if (s == "Upsilon" || s == "upsilon" || s == "U") return EventKind::upsilon;
    throw ValidationError("unknown event kind: " + s);
}

struct EventSpec {
    EventKind kind = EventKind::C;
    int k = 0;
    RectangleStack stack;

    void validate() const {
        const bool needs_k1 = kind == EventKind::a_hat || kind == EventKind::upsilon;
        if (k < (needs_k1 ? 1 : 0)) throw GeometryError("EventSpec: k too small for kind");
        if (k > stack.k_max) throw HorizonError("EventSpec: k beyond stack k_max");
    }
};

// --- dependence regions ---------------------------------------------------

// Sites (x, s) with t_begin <= s < t_end, parity-correct, lying in the
// forward light cone of at least one anchor (join any) or of every anchor
// (join all).  Anchors sit at time t_begin.
struct SiteRegion {
    enum class Join { any_anchor, all_anchors };

    int t_begin = 0;
    int t_end = 0;
    std::vector<int> anchor_x;  // sorted
    Join join = Join::any_anchor;

    bool contains(SiteAddress s) const {
        if (s.t < t_begin || s.t >= t_end || !is_even_site(s)) return false;
        const int h = s.t - t_begin;
        if (join == Join::any_anchor) {
            for (int a : anchor_x)
                if (std::abs(s.x - a) <= h) return true;
            return false;
        }
        for (int a : anchor_x)
            if (std::abs(s.x - a) > h) return false;
        return true;
    }

    // Inclusive x-intervals covered at row s, already merged and
    // parity-unfiltered (callers step x by 2 from the parity-aligned start).
    std::vector<std::pair<int, int>> row_spans(int s) const {
        std::vector<std::pair<int, int>> spans;
        const int h = s - t_begin;
        if (h < 0 || s >= t_end) return spans;
        if (join == Join::any_anchor) {
            for (int a : anchor_x) {
                const int lo = a - h, hi = a + h;
                if (!spans.empty() && lo <= spans.back().second + 1)
                    spans.back().second = std::max(spans.back().second, hi);
                else
                    spans.emplace_back(lo, hi);
            }
        } else {
            const int lo = anchor_x.back() - h, hi = anchor_x.front() + h;
            if (lo <= hi) spans.emplace_back(lo, hi);
        }
        return spans;
    }

    template <typename Fn>
    void for_each_site(Fn&& fn) const {
        for (int s = t_begin; s < t_end; ++s)
            for (auto [lo, hi] : row_spans(s)) {
                int x = lo + (((lo + s) % 2 + 2) % 2);  // first parity-correct x >= lo
                for (; x <= hi; x += 2) fn(SiteAddress{x, s});
            }
    }

    std::size_t size() const {
        std::size_t n = 0;
        for_each_site([&n](SiteAddress) { ++n; });
        return n;
    }
};

struct DependenceRegion {
    SiteRegion main;
    std::optional<SiteRegion> secondary;  // present only for C events

    std::vector<SiteAddress> sites(WebId id) const {
        std::vector<SiteAddress> out;
        const SiteRegion* r = id == WebId::main ? &main : (secondary ? &*secondary : nullptr);
        if (r) r->for_each_site([&out](SiteAddress s) { out.push_back(s); });
        return out;
    }
};

// Light cone of every site an evaluation of the event can possibly consult.
inline DependenceRegion dependence_region(const EventSpec& spec) {
    spec.validate();
    const auto& st = spec.stack;
    DependenceRegion region;
    switch (spec.kind) {
        case EventKind::B:
        case EventKind::C:
            if (spec.k == 0) {
                region.main = {0, st.t_int(1), {0}, SiteRegion::Join::any_anchor};
            } else {
                const int t0 = st.t_int(spec.k), t1 = st.t_int(spec.k + 1);
                std::vector<int> anchors = {st.corner_l(spec.k).x, st.corner_r(spec.k).x};
                region.main = {t0, t1, anchors, SiteRegion::Join::any_anchor};
                if (spec.kind == EventKind::C)
                    region.secondary = SiteRegion{t0, t1, anchors, SiteRegion::Join::all_anchors};
            }
            break;
        case EventKind::a_hat: {
            const int t0 = st.t_int(spec.k), t1 = st.t_int(spec.k + 1);
            region.main = {t0, t1, {st.corner_l_hat(spec.k).x}, SiteRegion::Join::any_anchor};
            break;
        }
        case EventKind::upsilon:
            region.main = {0, st.t_int(spec.k), {0}, SiteRegion::Join::any_anchor};
            break;
    }
    return region;
}

// --- event evaluation -----------------------------------------------------

namespace detail {

// Confinement of a single main-web trace to [lo, hi] over [origin.t, t_end].
template <ArrowField F>
bool confined_single(const F& field, SiteAddress origin, double tau, int t_end, int lo, int hi) {
    int x = origin.x;
    if (x < lo || x > hi) return false;
    for (int t = origin.t; t < t_end; ++t) {
        x += field.arrow(WebId::main, {x, t}, tau);
        if (x < lo || x > hi) return false;
    }
    return true;
}

template <ArrowField F>
bool confined_pair(const F& field, SiteAddress left, SiteAddress right, double tau, int t_end,
                   int lo, int hi) {
    int xl = left.x, xr = right.x;
    if (xl < lo || xl > hi || xr < lo || xr > hi) return false;
    for (int t = left.t; t < t_end; ++t) {
        const int step_l = field.arrow(WebId::main, {xl, t}, tau);
        const int step_r = (xr == xl) ? field.arrow(WebId::secondary, {xr, t}, tau)
                                      : field.arrow(WebId::main, {xr, t}, tau);
        xl += step_l;
        xr += step_r;
        if (xl < lo || xl > hi || xr < lo || xr > hi) return false;
    }
    return true;
}

}  // namespace detail

template <ArrowField F>
bool evaluate_event(const F& field, const EventSpec& spec, double tau) {
    spec.validate();
    if (tau < 0.0 || tau > field.tau_max())
        throw WindowError("evaluate_event: tau outside [0, tau_max]");
    const auto& st = spec.stack;
    const int k = spec.k;
    switch (spec.kind) {
        case EventKind::B:
        case EventKind::C: {
            const int lo = -st.left_edge[static_cast<std::size_t>(k)];
            const int hi = st.right_edge[static_cast<std::size_t>(k)];
            if (k == 0)
                return detail::confined_single(field, {0, 0}, tau, st.t_int(1), lo, hi);
            if (spec.kind == EventKind::B)
                return detail::confined_single(field, st.corner_l(k), tau, st.t_int(k + 1), lo, hi) &&
                       detail::confined_single(field, st.corner_r(k), tau, st.t_int(k + 1), lo, hi);
            return detail::confined_pair(field, st.corner_l(k), st.corner_r(k), tau,
                                         st.t_int(k + 1), lo, hi);
        }
        case EventKind::a_hat: {
            const auto tr = trace_path(field, st.corner_l_hat(k), tau, st.t_int(k + 1));
            return tr.positions.back() > st.w[static_cast<std::size_t>(k)];
        }
        case EventKind::upsilon: {
            const auto tr = trace_path(field, {0, 0}, tau, st.t_int(k));
            const int base = tr.position_at(st.t_int(k - 1));
            int best = base;
            for (int t = st.t_int(k - 1); t <= st.t_int(k); ++t)
                best = std::max(best, tr.position_at(t));
            return best - base >= st.w[static_cast<std::size_t>(k)];
        }
    }
    return false;  // unreachable
}

}  // namespace dydw
