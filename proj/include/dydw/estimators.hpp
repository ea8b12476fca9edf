#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dydw/intervals.hpp"
#include "dydw/rectangles.hpp"
#include "dydw/web.hpp"

namespace dydw {

struct Estimate {
    double mean = 0.0;
    double se = 0.0;  // sample standard deviation / sqrt(n)
    std::size_t n = 0;
    std::uint64_t seed_root = 0;
};

namespace detail {

// Plain running moments; merged across fixed-order chunks so parallel runs
// reproduce the single-threaded result bit for bit.
struct Accumulator {
    std::size_t n = 0;
    double sum = 0.0;
    double sum2 = 0.0;

    void add(double x) {
        ++n;
        sum += x;
        sum2 += x * x;
    }
    void merge(const Accumulator& o) {
        n += o.n;
        sum += o.sum;
        sum2 += o.sum2;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double variance() const {  // Bessel-corrected
        if (n < 2) return 0.0;
        const double m = mean();
        const double v = (sum2 - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return v > 0.0 ? v : 0.0;
    }
    double stderr_of_mean() const {
        return n ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
    Estimate finish(std::uint64_t seed_root) const { return {mean(), stderr_of_mean(), n, seed_root}; }
};

// Replicates are processed in fixed chunks handed to workers through an
// atomic cursor; per-chunk partial results are merged in chunk order, so the
// output is independent of scheduling and of the worker count.
void parallel_replicates(std::size_t n, int workers,
                         const std::function<void(std::size_t chunk_index, std::size_t begin,
                                                  std::size_t end)>& chunk_fn);

std::size_t chunk_count(std::size_t n);
constexpr std::size_t kChunkSize = 1024;

}  // namespace detail

// Frequency of the event at fixed tau over i.i.d. replicate webs.
Estimate estimate_event(const EventSpec& spec, double tau, std::size_t n, std::uint64_t seed_root,
                        int workers = 1);

// Frequency of event^tau AND event^tau' on the same replicate web.
Estimate joint_event(const EventSpec& spec, double tau, double tau_prime, std::size_t n,
                     std::uint64_t seed_root, int workers = 1);

struct SweepPoint {
    double tau_prime = 0.0;
    double delta = 0.0;  // 1 / (d_k |tau - tau'|)
    Estimate joint;
    double excess = 0.0;
    double excess_se = 0.0;
    bool admissible = false;  // excess > 3 excess_se
    double product_ratio = 0.0;     // prod_{j<=k} joint_j / P_j^2
    double product_envelope = 0.0;  // c_hat / |tau-tau'|^b
};

struct DecorrelationSweep {
    int k = 0;
    double gamma = 0.0;
    std::vector<Estimate> singles;  // P(C_j), j = 0..k, at tau = 0
    std::vector<SweepPoint> points;

    bool fit_ok = false;
    double exponent_a = 0.0;
    double exponent_a_se = 0.0;
    double coeff_c = 0.0;

    double b_estimate = 0.0;        // log(max_j 1/P_j) / log gamma
    double product_c_hat = 0.0;     // smallest c with prod <= c |tau-tau'|^-b on the grid
};

DecorrelationSweep decorrelation_sweep(const RectangleStack& stack, int k,
                                       const std::vector<double>& tau_primes, std::size_t n,
                                       std::uint64_t seed_root, int workers = 1);

// Least-squares power-law fit y = c x^a on admissible (x, y) pairs; exposed
// for the synthetic-control test.
struct PowerFit {
    bool ok = false;
    double a = 0.0;
    double a_se = 0.0;
    double c = 0.0;
};
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct SecondMomentReport {
    int n_levels = 0;  // the n of E_n
    std::size_t n_rep = 0;
    double mean_measure = 0.0;
    double mean_square = 0.0;
    double ratio = 0.0;     // (E m)^2 / E m^2, the (thmp1) lower bound
    double ratio_se = 0.0;  // delta method
    double observed_freq = 0.0;  // P(E_n nonempty)
    double observed_se = 0.0;
    bool degenerate = false;  // all replicate measures were zero

    // optional quadrature route for the (thmp2) double integral
    int resolution = 0;
    double quadrature_integral = 0.0;
    double quadrature_ratio = 0.0;
};

SecondMomentReport second_moment_bound(const RectangleStack& stack, int n_levels, int resolution,
                                       std::size_t n_rep, std::uint64_t seed_root, int workers = 1);

// Two-sided standard normal tail bounds: x/(1+x^2) phi(x) <= P(Z>x) <= phi(x)/x.
double normal_tail_lower(double x);
double normal_tail_upper(double x);

// K-tilde audited from the implemented lower tail bound at the actual stack
// geometry: the minimum over k in [k_lo, k_hi] of
//   tail_lower((w_k + w_{k-1} + 2)/d_k) * sqrt(log d_k^2) * gamma^(4 alpha^2 k),
// which makes tail_envelope(k) <= tail_lower(threshold_k) for every such k.
double audited_tail_constant(const RectangleStack& stack, int k_lo, int k_hi);

// The paper-shaped envelope K-tilde / sqrt(log d_k^2) * gamma^(-4 alpha^2 k).
double tail_envelope(double gamma, double width_alpha, int k, double k_tilde);

struct TailBoundReport {
    int k = 0;
    double threshold_x = 0.0;
    double k_tilde = 0.0;
    double envelope = 0.0;
    Estimate prob;
    bool holds_within_3se = false;
};

TailBoundReport superdiffusive_tail_bound(const RectangleStack& stack, int k, std::size_t n,
                                          std::uint64_t seed_root, int workers = 1);

struct PivotalChainReport {
    int k = 0;
    std::size_t n_rep = 0;
    Estimate p_exists;     // tau-set over [0,1] nonempty
    Estimate p_upsilon_0;  // event at tau = 0
    double mean_endpoints = 0.0;
    double endpoints_se = 0.0;
    std::size_t omega_size = 0;
    double ratio = 0.0;  // E|upsilon| / (|Omega| P(Upsilon))
    bool chain_holds_3se = false;
    bool chain_holds_exact = false;  // per-replicate 1_exists <= 1_0 + |upsilon|
};

PivotalChainReport pivotal_chain(const RectangleStack& stack, int k, std::size_t n_rep,
                                 std::uint64_t seed_root, int workers = 1);

}  // namespace dydw
