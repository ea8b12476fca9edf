#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dydw/rectangles.hpp"
#include "dydw/trace.hpp"
#include "dydw/web.hpp"

namespace dydw {

// The four paths Y_l/Y_r at dynamical times tau < tau', time-shifted so the
// rectangle's lower edge t_k becomes step 0.  positions index n = 0..n_steps.
struct StickQuadruple {
    int k = 0;
    double tau = 0.0;
    double tau_prime = 0.0;
    int t_base = 0;   // lattice time of step 0 (= t_k)
    int d_k = 0;
    int n_steps = 0;  // defaults to d_k^2
    std::vector<int> l_tau, r_tau, l_tau2, r_tau2;
};

StickQuadruple make_quadruple(const WebPair& web, const RectangleStack& stack, int k, double tau,
                              double tau_prime, int n_steps = -1);

// Per-step sticking labels and the cumulative non-sticking clocks.
struct StickingProfile {
    static constexpr std::uint8_t LL = 1, LR = 2, RL = 4, RR = 8;

    int k = 0;
    double tau = 0.0, tau_prime = 0.0;
    int n_steps = 0;
    int d_k = 0;
    double delta = 0.0;                   // 1 / (d_k |tau - tau'|)
    std::vector<std::uint8_t> labels;     // bitmask per step, size n_steps
    std::vector<int> g, g_ll, g_lr, g_rl, g_rr;  // sampled at 0..n_steps

    // sup over t in [0,1] of (t - G(t d_k^2)/d_k^2); attained on the step grid.
    double max_sticking_fraction() const {
        int best = 0;
        for (int n = 0; n <= n_steps; ++n) best = std::max(best, n - g[static_cast<std::size_t>(n)]);
        return static_cast<double>(best) / static_cast<double>(n_steps);
    }
};

StickingProfile classify_sticking(const WebPair& web, const StickQuadruple& quad);

// The time-changed split Y(t) = Y_d(G(t)) + Y_s(t - G(t)).
struct PathDecomposition {
    std::vector<int> detached;  // Y_d, sampled at 0..G(n_steps)
    std::vector<int> stuck;     // Y_s, sampled at 0..n_steps-G(n_steps)
};

struct Decomposition {
    PathDecomposition l_tau, r_tau, l_tau2, r_tau2;
};

Decomposition decompose(const StickQuadruple& quad, const StickingProfile& profile);

// Alternating sticking / excursion durations of a coupled pair.
struct CouplingTrace {
    std::vector<long long> deltas;  // completed sticking-section lengths (>= 0)
    std::vector<long long> gammas;  // completed excursion lengths (>= 1)
    bool partial = false;           // horizon cut an in-progress section
    std::optional<long long> censored_delta;  // sticking run still open at the cut
};

struct CouplingPair {
    CouplingTrace reference;  // (S_0^tau, S_0^tau') from the origin
    CouplingTrace starred;    // (Y_r^tau, Y_r^tau') of the rr construction
};

CouplingPair coupling_trace(const WebPair& web, const RectangleStack& stack, int k, double tau,
                            double tau_prime, int horizon);

// Empirical P(sup (t - G-bar) >= Delta^beta) over a batch of profiles that
// share (k, tau, tau').
struct Lemma2Point {
    double delta = 0.0;
    double beta = 0.0;
    double threshold = 0.0;  // Delta^beta
    double frequency = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

Lemma2Point lemma2_statistic(const std::vector<StickingProfile>& profiles, double beta);

// Smallest c'' with frequency <= c'' Delta^(1-beta) across a swept grid.
double lemma2_envelope(const std::vector<Lemma2Point>& points);

// Modulus of continuity of the diffusively rescaled walk over window eps,
// evaluated on the integer grid (|i - j| < eps * n_steps).
double rescaled_modulus(const std::vector<int>& path, double eps, int scale);

struct ModulusPoint {
    double delta = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double epsilon = 0.0;    // Delta^beta
    double threshold = 0.0;  // Delta^alpha / 2
    double frequency = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

std::vector<ModulusPoint> modulus_statistic(const RectangleStack& stack, int k,
                                            std::size_t n_samples, std::uint64_t seed_root,
                                            const std::vector<double>& deltas,
                                            const std::vector<std::pair<double, double>>& alpha_betas);

}  // namespace dydw
