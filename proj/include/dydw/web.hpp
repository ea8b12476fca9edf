#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <vector>

#include "dydw/errors.hpp"
#include "dydw/philox.hpp"
#include "dydw/site.hpp"

namespace dydw {

// The full dynamical history of one site's arrow on [0, window_end]:
// Poisson ring times plus the piecewise-constant right-continuous value.
struct ArrowStream {
    SiteAddress site;
    double window_end = 0.0;
    std::vector<double> ring_times;       // strictly increasing, in (0, window_end]
    std::vector<std::int8_t> values;      // size ring_times.size()+1, entries +-1

    // Right-continuous lookup: values[#rings <= tau].
    int arrow_at(double tau) const {
        if (tau < 0.0 || tau > window_end)
            throw WindowError("arrow_at: tau outside [0, window_end]");
        std::size_t i = 0;
        while (i < ring_times.size() && ring_times[i] <= tau) ++i;
        return values[i];
    }

    // Rings in the half-open interval (a, b].
    int rings_in(double a, double b) const {
        int n = 0;
        for (double r : ring_times)
            if (r > a && r <= b) ++n;
        return n;
    }

    // Switches (rings whose redrawn value differs from the previous one)
    // in (a, b].
    int switches_in(double a, double b) const {
        int n = 0;
        for (std::size_t j = 0; j < ring_times.size(); ++j)
            if (ring_times[j] > a && ring_times[j] <= b && values[j + 1] != values[j]) ++n;
        return n;
    }
};

// Seeded handle to the main web W and the independent secondary web W-hat.
// Every arrow draw is a pure function of (seed, web id, site, draw index),
// so the infinite lattice is addressable lazily and results are identical
// across calls, processes and degrees of parallelism.
//
// Draw layout per (web id, site): index 0 is the initial arrow; for j >= 1,
// index 2j-1 is the exponential gap before ring j and index 2j the arrow
// value after ring j.
class WebPair {
  public:
    WebPair(std::uint64_t seed, double tau_max) : seed_(seed), tau_max_(tau_max) {
        if (!(tau_max > 0.0)) throw WindowError("WebPair: tau_max must be > 0");
    }

    std::uint64_t seed() const { return seed_; }
    double tau_max() const { return tau_max_; }

    // Arrow value at dynamical time tau, computed lazily from the draws.
    int arrow(WebId id, SiteAddress site, double tau) const {
        require_even_site(site);
        if (tau < 0.0 || tau > tau_max_)
            throw WindowError("arrow: tau outside [0, tau_max]");
        std::uint32_t rings = 0;
        double cum = 0.0;
        for (;;) {
            cum += gap_draw(id, site, 2 * rings + 1);
            if (cum > tau) break;
            ++rings;
        }
        return value_draw(id, site, rings == 0 ? 0 : 2 * rings);
    }

    // Number of rings in the half-open interval (a, b], b <= tau_max.
    int rings_in(WebId id, SiteAddress site, double a, double b) const {
        require_even_site(site);
        if (a > b || b > tau_max_ || a < 0.0)
            throw WindowError("rings_in: bad interval");
        int n = 0;
        std::uint32_t j = 0;
        double cum = 0.0;
        for (;;) {
            cum += gap_draw(id, site, 2 * j + 1);
            if (cum > b) break;
            if (cum > a) ++n;
            ++j;
        }
        return n;
    }

    // Materializes the full stream on (0, tau_max].
    ArrowStream arrow_stream(WebId id, SiteAddress site) const {
        require_even_site(site);
        ArrowStream s;
        s.site = site;
        s.window_end = tau_max_;
        s.values.push_back(value_draw(id, site, 0));
        std::uint32_t j = 1;
        double cum = 0.0;
        for (;;) {
            cum += gap_draw(id, site, 2 * j - 1);
            if (cum > tau_max_) break;
            s.ring_times.push_back(cum);
            s.values.push_back(value_draw(id, site, 2 * j));
            ++j;
        }
        return s;
    }

  private:
    std::uint64_t raw_draw(WebId id, SiteAddress site, std::uint32_t index) const {
        return detail::Philox4x32::draw64(
            {static_cast<std::uint32_t>(site.x), static_cast<std::uint32_t>(site.t), index,
             static_cast<std::uint32_t>(id)},
            {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    }

    double gap_draw(WebId id, SiteAddress site, std::uint32_t index) const {
        return -std::log(detail::u64_to_open_unit(raw_draw(id, site, index)));
    }

    std::int8_t value_draw(WebId id, SiteAddress site, std::uint32_t index) const {
        return (raw_draw(id, site, index) >> 63) ? 1 : -1;
    }

    std::uint64_t seed_;
    double tau_max_;
};

// Replicate i of a Monte Carlo run uses seed_root ^ mix64(golden * (i+1)).
// Documented so results are recomputable from (seed_root, n_replicates).
inline std::uint64_t replicate_seed(std::uint64_t seed_root, std::uint64_t index) {
    return seed_root ^ detail::mix64(0x9E3779B97F4A7C15ull * (index + 1));
}

// Anything path tracing can read arrows from: the lazy WebPair or a
// materialized region cache.
template <typename F>
concept ArrowField = requires(const F f, SiteAddress s, double tau) {
    { f.arrow(WebId::main, s, tau) } -> std::convertible_to<int>;
    { f.tau_max() } -> std::convertible_to<double>;
};

}  // namespace dydw
