#pragma once

// Shared test scaffolding: synthetic arrow fields, instrumented wrappers and
// the small exhaustive oracles the suites freeze expected values from.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "dydw/site.hpp"
#include "dydw/web.hpp"

namespace dydw::testing {

// Every arrow points the same way; handy for forced-drift checks.
struct ConstField {
    int value = 1;
    double window = 1.0;
    int arrow(WebId, SiteAddress, double) const { return value; }
    double tau_max() const { return window; }
};

// Forwards to a real web while recording every consulted site.
struct RecordingField {
    const WebPair* web;
    mutable std::vector<std::pair<WebId, SiteAddress>> consulted;

    int arrow(WebId id, SiteAddress s, double tau) const {
        consulted.emplace_back(id, s);
        return web->arrow(id, s, tau);
    }
    double tau_max() const { return web->tau_max(); }
};

// Chi-square statistic for observed counts against uniform cells.
inline double chi_square_uniform(const std::vector<std::size_t>& counts) {
    std::size_t total = 0;
    for (auto c : counts) total += c;
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double stat = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

// Exhaustive oracle: P(|S(t)| <= bound for all t <= n_steps) for a walk from
// start, enumerating all 2^n_steps sign patterns.  Independent of the
// simulator: pure integer loops on the event definition.
inline double enumerate_confinement(int start, int n_steps, int lo, int hi) {
    const std::uint64_t total = 1ull << n_steps;
    std::uint64_t good = 0;
    for (std::uint64_t bits = 0; bits < total; ++bits) {
        int x = start;
        bool ok = x >= lo && x <= hi;
        for (int s = 0; ok && s < n_steps; ++s) {
            x += (bits >> s) & 1 ? 1 : -1;
            ok = x >= lo && x <= hi;
        }
        if (ok) ++good;
    }
    return static_cast<double>(good) / static_cast<double>(total);
}

// Exhaustive oracle: P(S(n_steps) > bound) for a walk from start.
inline double enumerate_endpoint_above(int start, int n_steps, int bound) {
    const std::uint64_t total = 1ull << n_steps;
    std::uint64_t good = 0;
    for (std::uint64_t bits = 0; bits < total; ++bits) {
        int x = start;
        for (int s = 0; s < n_steps; ++s) x += (bits >> s) & 1 ? 1 : -1;
        if (x > bound) ++good;
    }
    return static_cast<double>(good) / static_cast<double>(total);
}

// Exhaustive oracle: P(max_{t<=n_steps} (S(t) - S(0)) >= bound).
inline double enumerate_running_max_at_least(int n_steps, int bound) {
    const std::uint64_t total = 1ull << n_steps;
    std::uint64_t good = 0;
    for (std::uint64_t bits = 0; bits < total; ++bits) {
        int x = 0, best = 0;
        for (int s = 0; s < n_steps; ++s) {
            x += (bits >> s) & 1 ? 1 : -1;
            best = best > x ? best : x;
        }
        if (best >= bound) ++good;
    }
    return static_cast<double>(good) / static_cast<double>(total);
}

}  // namespace dydw::testing
