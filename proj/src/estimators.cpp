#include "dydw/estimators.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "dydw/errors.hpp"

namespace dydw {

namespace detail {

std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

void parallel_replicates(std::size_t n, int workers,
                         const std::function<void(std::size_t, std::size_t, std::size_t)>& chunk_fn) {
    if (n == 0) return;
    const std::size_t chunks = chunk_count(n);
    if (workers <= 1 || chunks == 1) {
        for (std::size_t c = 0; c < chunks; ++c)
            chunk_fn(c, c * kChunkSize, std::min(n, (c + 1) * kChunkSize));
        return;
    }
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t c = cursor.fetch_add(1);
            if (c >= chunks) return;
            chunk_fn(c, c * kChunkSize, std::min(n, (c + 1) * kChunkSize));
        }
    };
    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), chunks);
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

namespace {

// Deterministic replicate sweep: per-chunk accumulators merged in order.
Accumulator accumulate_replicates(std::size_t n, int workers,
                                  const std::function<double(const WebPair&)>& value,
                                  double tau_max, std::uint64_t seed_root) {
    std::vector<Accumulator> partial(chunk_count(n));
    parallel_replicates(n, workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
        Accumulator acc;
        for (std::size_t i = begin; i < end; ++i)
            acc.add(value(WebPair(replicate_seed(seed_root, i), tau_max)));
        partial[c] = acc;
    });
    Accumulator total;
    for (const auto& acc : partial) total.merge(acc);
    return total;
}

}  // namespace

}  // namespace detail

Estimate estimate_event(const EventSpec& spec, double tau, std::size_t n, std::uint64_t seed_root,
                        int workers) {
    spec.validate();
    if (n < 1) throw ValidationError("estimate_event: n must be >= 1");
    const double tau_max = std::max(1.0, tau);
    auto acc = detail::accumulate_replicates(
        n, workers,
        [&](const WebPair& web) { return evaluate_event(web, spec, tau) ? 1.0 : 0.0; }, tau_max,
        seed_root);
    return acc.finish(seed_root);
}

Estimate joint_event(const EventSpec& spec, double tau, double tau_prime, std::size_t n,
                     std::uint64_t seed_root, int workers) {
    spec.validate();
    if (n < 1) throw ValidationError("joint_event: n must be >= 1");
    const double tau_max = std::max({1.0, tau, tau_prime});
    auto acc = detail::accumulate_replicates(
        n, workers,
        [&](const WebPair& web) {
            return (evaluate_event(web, spec, tau) && evaluate_event(web, spec, tau_prime)) ? 1.0
                                                                                            : 0.0;
        },
        tau_max, seed_root);
    return acc.finish(seed_root);
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    PowerFit fit;
    if (x.size() != y.size() || x.size() < 3) return fit;
    const std::size_t m = x.size();
    double sx = 0, sy = 0;
    std::vector<double> lx(m), ly(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return fit;
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        sx += lx[i];
        sy += ly[i];
    }
    const double mx = sx / static_cast<double>(m), my = sy / static_cast<double>(m);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) return fit;
    fit.a = sxy / sxx;
    const double b = my - fit.a * mx;
    fit.c = std::exp(b);
    double rss = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ly[i] - (b + fit.a * lx[i]);
        rss += r * r;
    }
    fit.a_se = m > 2 ? std::sqrt(rss / static_cast<double>(m - 2) / sxx) : 0.0;
    fit.ok = true;
    return fit;
}

DecorrelationSweep decorrelation_sweep(const RectangleStack& stack, int k,
                                       const std::vector<double>& tau_primes, std::size_t n,
                                       std::uint64_t seed_root, int workers) {
    if (k < 0 || k > stack.k_max) throw HorizonError("decorrelation_sweep: k beyond stack");
    if (tau_primes.empty()) throw ValidationError("decorrelation_sweep: empty tau' grid");

    DecorrelationSweep sweep;
    sweep.k = k;
    sweep.gamma = stack.gamma;

    // Marginals P(C_j) at tau = 0 for j <= k; each j gets its own seed lane.
    for (int j = 0; j <= k; ++j)
        sweep.singles.push_back(estimate_event({EventKind::C, j, stack}, 0.0, n,
                                               seed_root + 1000003ull * (j + 1), workers));
    double inv_p_max = 0.0;
    for (const auto& e : sweep.singles) {
        if (e.mean <= 0.0) throw DegenerateError("decorrelation_sweep: a marginal estimate is 0");
        inv_p_max = std::max(inv_p_max, 1.0 / e.mean);
    }
    sweep.b_estimate = std::log(inv_p_max) / std::log(stack.gamma);

    const Estimate& single = sweep.singles.back();
    const int d_k = stack.d[static_cast<std::size_t>(k)];
    for (std::size_t g = 0; g < tau_primes.size(); ++g) {
        const double tp = tau_primes[g];
        if (!(tp > 0.0)) throw ValidationError("decorrelation_sweep: tau' must be > 0");
        SweepPoint pt;
        pt.tau_prime = tp;
        pt.delta = 1.0 / (d_k * tp);
        pt.joint = joint_event({EventKind::C, k, stack}, 0.0, tp, n,
                               seed_root + 7778777ull * (g + 1), workers);
        pt.excess = pt.joint.mean - single.mean * single.mean;
        pt.excess_se = std::sqrt(pt.joint.se * pt.joint.se +
                                 4.0 * single.mean * single.mean * single.se * single.se);
        pt.admissible = pt.excess > 3.0 * pt.excess_se;

        // product diagnostic over all levels j <= k at this separation
        double prod = 1.0;
        for (int j = 0; j <= k; ++j) {
            const Estimate jj = joint_event({EventKind::C, j, stack}, 0.0, tp, n,
                                            seed_root + 104729ull * (g + 1) + 15485863ull * (j + 1),
                                            workers);
            const double pj = sweep.singles[static_cast<std::size_t>(j)].mean;
            prod *= jj.mean / (pj * pj);
        }
        pt.product_ratio = prod;
        sweep.points.push_back(pt);
    }

    for (auto& pt : sweep.points)
        sweep.product_c_hat =
            std::max(sweep.product_c_hat, pt.product_ratio * std::pow(pt.tau_prime, sweep.b_estimate));
    for (auto& pt : sweep.points)
        pt.product_envelope = sweep.product_c_hat / std::pow(pt.tau_prime, sweep.b_estimate);

    std::vector<double> xs, ys;
    for (const auto& pt : sweep.points)
        if (pt.admissible) {
            xs.push_back(pt.delta);
            ys.push_back(pt.excess);
        }
    const PowerFit fit = fit_power_law(xs, ys);
    sweep.fit_ok = fit.ok;
    sweep.exponent_a = fit.a;
    sweep.exponent_a_se = fit.a_se;
    sweep.coeff_c = fit.c;
    return sweep;
}

SecondMomentReport second_moment_bound(const RectangleStack& stack, int n_levels, int resolution,
                                       std::size_t n_rep, std::uint64_t seed_root, int workers) {
    if (n_levels < 0 || n_levels > stack.k_max)
        throw HorizonError("second_moment_bound: n beyond stack");
    if (n_rep < 2) throw ValidationError("second_moment_bound: need n_rep >= 2");

    SecondMomentReport rep;
    rep.n_levels = n_levels;
    rep.n_rep = n_rep;
    rep.resolution = resolution;

    struct Moments {
        double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
        std::size_t pos = 0;
        void merge(const Moments& o) {
            m1 += o.m1;
            m2 += o.m2;
            m3 += o.m3;
            m4 += o.m4;
            pos += o.pos;
        }
    };
    std::vector<Moments> partial(detail::chunk_count(n_rep));
    detail::parallel_replicates(n_rep, workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
        Moments acc;
        for (std::size_t i = begin; i < end; ++i) {
            const WebPair web(replicate_seed(seed_root, i), 1.0);
            const double m = exceptional_search_sub(web, stack, n_levels, 0.0, 1.0).measure();
            acc.m1 += m;
            acc.m2 += m * m;
            acc.m3 += m * m * m;
            acc.m4 += m * m * m * m;
            if (m > 0.0) ++acc.pos;
        }
        partial[c] = acc;
    });
    Moments tot;
    for (const auto& p : partial) tot.merge(p);

    const double N = static_cast<double>(n_rep);
    const double A = tot.m1 / N, B = tot.m2 / N;
    rep.mean_measure = A;
    rep.mean_square = B;
    rep.observed_freq = static_cast<double>(tot.pos) / N;
    rep.observed_se = std::sqrt(rep.observed_freq * (1.0 - rep.observed_freq) / N);
    if (B <= 0.0) {
        rep.degenerate = true;
        return rep;
    }
    rep.ratio = A * A / B;
    // delta method for R = A^2 / B
    const double var_a = (B - A * A) / N;
    const double var_b = (tot.m4 / N - B * B) / N;
    const double cov_ab = (tot.m3 / N - A * B) / N;
    const double da = 2.0 * A / B, db = -A * A / (B * B);
    const double var_r = da * da * var_a + db * db * var_b + 2.0 * da * db * cov_ab;
    rep.ratio_se = var_r > 0.0 ? std::sqrt(var_r) : 0.0;

    if (resolution > 0) {
        // midpoint quadrature of the (thmp2) double integral
        std::vector<Estimate> singles;
        for (int j = 0; j <= n_levels; ++j)
            singles.push_back(estimate_event({EventKind::C, j, stack}, 0.0, n_rep,
                                             seed_root + 2654435761ull * (j + 1), workers));
        double integral = 0.0;
        const double h = 1.0 / resolution;
        for (int a = 0; a < resolution; ++a)
            for (int b = a; b < resolution; ++b) {
                const double ta = (a + 0.5) * h, tb = (b + 0.5) * h;
                double prod = 1.0;
                for (int j = 0; j <= n_levels; ++j) {
                    double joint;
                    if (a == b) {
                        joint = singles[static_cast<std::size_t>(j)].mean;
                    } else {
                        joint = joint_event({EventKind::C, j, stack}, ta, tb, n_rep,
                                            seed_root + 512927357ull * (j + 1) +
                                                7368787ull * (a * resolution + b + 1),
                                            workers)
                                    .mean;
                    }
                    const double pj = singles[static_cast<std::size_t>(j)].mean;
                    prod *= joint / (pj * pj);
                }
                integral += (a == b ? 1.0 : 2.0) * prod * h * h;
            }
        rep.quadrature_integral = integral;
        rep.quadrature_ratio = integral > 0.0 ? 1.0 / integral : 0.0;
    }
    return rep;
}

double normal_tail_lower(double x) {
    if (!(x > 0.0)) throw DomainError("normal_tail_lower: x must be > 0");
    const double phi = std::exp(-x * x / 2.0) / std::sqrt(2.0 * std::numbers::pi);
    return x / (1.0 + x * x) * phi;
}

double normal_tail_upper(double x) {
    if (!(x > 0.0)) throw DomainError("normal_tail_upper: x must be > 0");
    const double phi = std::exp(-x * x / 2.0) / std::sqrt(2.0 * std::numbers::pi);
    return phi / x;
}

double audited_tail_constant(const RectangleStack& stack, int k_lo, int k_hi) {
    if (k_lo < 1 || k_hi > stack.k_max || k_lo > k_hi)
        throw HorizonError("audited_tail_constant: bad k range");
    double k_tilde = std::numeric_limits<double>::infinity();
    for (int k = k_lo; k <= k_hi; ++k) {
        const double d = stack.d[static_cast<std::size_t>(k)];
        const double x = (stack.w[static_cast<std::size_t>(k)] +
                          stack.w[static_cast<std::size_t>(k - 1)] + 2.0) /
                         d;
        const double log_n = std::log(d * d);
        const double growth =
            std::pow(std::pow(stack.gamma, k), 4.0 * stack.width_alpha * stack.width_alpha);
        k_tilde = std::min(k_tilde, normal_tail_lower(x) * std::sqrt(log_n) * growth);
    }
    return k_tilde;
}

double tail_envelope(double gamma, double width_alpha, int k, double k_tilde) {
    const double gk = std::pow(gamma, k);
    const int dk = 2 * (static_cast<int>(std::floor(gk / 2.0)) + 1);
    const double log_n = std::log(static_cast<double>(dk) * dk);
    return k_tilde / std::sqrt(log_n) * std::pow(gk, -4.0 * width_alpha * width_alpha);
}

TailBoundReport superdiffusive_tail_bound(const RectangleStack& stack, int k, std::size_t n,
                                          std::uint64_t seed_root, int workers) {
    if (k < 1 || k > stack.k_max) throw HorizonError("superdiffusive_tail_bound: k out of range");
    TailBoundReport rep;
    rep.k = k;
    const double d = stack.d[static_cast<std::size_t>(k)];
    rep.threshold_x =
        (stack.w[static_cast<std::size_t>(k)] + stack.w[static_cast<std::size_t>(k - 1)] + 2.0) / d;
    rep.k_tilde = audited_tail_constant(stack, 1, stack.k_max);
    rep.envelope = tail_envelope(stack.gamma, stack.width_alpha, k, rep.k_tilde);
    rep.prob = estimate_event({EventKind::a_hat, k, stack}, 0.0, n, seed_root, workers);
    rep.holds_within_3se = rep.prob.mean >= rep.envelope - 3.0 * rep.prob.se;
    return rep;
}

PivotalChainReport pivotal_chain(const RectangleStack& stack, int k, std::size_t n_rep,
                                 std::uint64_t seed_root, int workers) {
    if (k < 1 || k > stack.k_max) throw HorizonError("pivotal_chain: k out of range");
    PivotalChainReport rep;
    rep.k = k;
    rep.n_rep = n_rep;
    const EventSpec spec{EventKind::upsilon, k, stack};
    rep.omega_size = dependence_region(spec).main.size();

    struct Cell {
        detail::Accumulator exists, at0, endpoints;
        std::size_t exact_violations = 0;
        void merge(const Cell& o) {
            exists.merge(o.exists);
            at0.merge(o.at0);
            endpoints.merge(o.endpoints);
            exact_violations += o.exact_violations;
        }
    };
    std::vector<Cell> partial(detail::chunk_count(n_rep));
    detail::parallel_replicates(n_rep, workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
        Cell cell;
        for (std::size_t i = begin; i < end; ++i) {
            const WebPair web(replicate_seed(seed_root, i), 1.0);
            const CensusReport census = pivotal_endpoint_census(web, spec, 0.0, 1.0);
            const double ex = census.set.empty() ? 0.0 : 1.0;
            const double a0 = census.set.contains(0.0) ? 1.0 : 0.0;
            cell.exists.add(ex);
            cell.at0.add(a0);
            cell.endpoints.add(static_cast<double>(census.endpoint_count));
            if (ex > a0 + static_cast<double>(census.endpoint_count)) ++cell.exact_violations;
        }
        partial[c] = cell;
    });
    Cell tot;
    for (const auto& p : partial) tot.merge(p);

    rep.p_exists = tot.exists.finish(seed_root);
    rep.p_upsilon_0 = tot.at0.finish(seed_root);
    rep.mean_endpoints = tot.endpoints.mean();
    rep.endpoints_se = tot.endpoints.stderr_of_mean();
    const double p_up = rep.p_upsilon_0.mean;
    rep.ratio = (rep.omega_size > 0 && p_up > 0.0)
                    ? rep.mean_endpoints / (static_cast<double>(rep.omega_size) * p_up)
                    : 0.0;
    const double slack = 3.0 * std::sqrt(rep.p_exists.se * rep.p_exists.se +
                                         rep.p_upsilon_0.se * rep.p_upsilon_0.se +
                                         rep.endpoints_se * rep.endpoints_se);
    rep.chain_holds_3se = rep.p_exists.mean <= p_up + rep.mean_endpoints + slack;
    rep.chain_holds_exact = tot.exact_violations == 0;
    return rep;
}

}  // namespace dydw
