#include "dydw/sticking.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "dydw/errors.hpp"

namespace dydw {

StickQuadruple make_quadruple(const WebPair& web, const RectangleStack& stack, int k, double tau,
                              double tau_prime, int n_steps) {
    if (k < 1 || k > stack.k_max) throw GeometryError("make_quadruple: k out of range");
    if (!(tau < tau_prime)) throw WindowError("make_quadruple: need tau < tau_prime");
    if (tau < 0.0 || tau_prime > web.tau_max())
        throw WindowError("make_quadruple: times outside [0, tau_max]");

    StickQuadruple q;
    q.k = k;
    q.tau = tau;
    q.tau_prime = tau_prime;
    q.d_k = stack.d[static_cast<std::size_t>(k)];
    q.n_steps = n_steps < 0 ? q.d_k * q.d_k : n_steps;
    q.t_base = stack.t_int(k);

    const SiteAddress l = stack.corner_l(k);
    const SiteAddress r = stack.corner_r(k);
    const int t_end = q.t_base + q.n_steps;
    auto [l1, r1] = trace_pair_noncoalescing(web, l, r, tau, t_end);
    auto [l2, r2] = trace_pair_noncoalescing(web, l, r, tau_prime, t_end);
    q.l_tau = std::move(l1.positions);
    q.r_tau = std::move(r1.positions);
    q.l_tau2 = std::move(l2.positions);
    q.r_tau2 = std::move(r2.positions);
    return q;
}

StickingProfile classify_sticking(const WebPair& web, const StickQuadruple& quad) {
    StickingProfile p;
    p.k = quad.k;
    p.tau = quad.tau;
    p.tau_prime = quad.tau_prime;
    p.n_steps = quad.n_steps;
    p.d_k = quad.d_k;
    p.delta = 1.0 / (quad.d_k * std::abs(quad.tau - quad.tau_prime));
    p.labels.resize(static_cast<std::size_t>(quad.n_steps), 0);

    auto main_quiet = [&](int x, int t) {
        return web.rings_in(WebId::main, {x, t}, quad.tau, quad.tau_prime) == 0;
    };

    for (int n = 0; n < quad.n_steps; ++n) {
        const std::size_t i = static_cast<std::size_t>(n);
        const int t = quad.t_base + n;
        const int lt = quad.l_tau[i], rt = quad.r_tau[i];
        const int lt2 = quad.l_tau2[i], rt2 = quad.r_tau2[i];
        std::uint8_t m = 0;
        if (lt == lt2 && main_quiet(lt, t)) m |= StickingProfile::LL;
        if (lt == rt2 && rt2 != lt2 && main_quiet(lt, t)) m |= StickingProfile::LR;
        if (lt2 == rt && rt != lt && main_quiet(lt2, t)) m |= StickingProfile::RL;
        if (rt == rt2) {
            if (rt != lt && rt != lt2) {
                if (main_quiet(rt, t)) m |= StickingProfile::RR;
            } else if (rt == lt && rt == lt2) {
                if (web.rings_in(WebId::secondary, {rt, t}, quad.tau, quad.tau_prime) == 0)
                    m |= StickingProfile::RR;
            }
        }
        p.labels[i] = m;
    }

    auto integrate = [&](std::uint8_t bit, std::vector<int>& out) {
        out.resize(static_cast<std::size_t>(quad.n_steps) + 1);
        out[0] = 0;
        for (int n = 0; n < quad.n_steps; ++n) {
            const bool sticking = bit == 0 ? p.labels[static_cast<std::size_t>(n)] != 0
                                           : (p.labels[static_cast<std::size_t>(n)] & bit) != 0;
            out[static_cast<std::size_t>(n) + 1] = out[static_cast<std::size_t>(n)] + (sticking ? 0 : 1);
        }
    };
    integrate(0, p.g);
    integrate(StickingProfile::LL, p.g_ll);
    integrate(StickingProfile::LR, p.g_lr);
    integrate(StickingProfile::RL, p.g_rl);
    integrate(StickingProfile::RR, p.g_rr);
    return p;
}

namespace {

PathDecomposition split_path(const std::vector<int>& path, const std::vector<std::uint8_t>& labels,
                             int n_steps) {
    PathDecomposition d;
    d.detached.push_back(path[0]);
    d.stuck.push_back(0);
    for (int n = 0; n < n_steps; ++n) {
        const std::size_t i = static_cast<std::size_t>(n);
        const int step = path[i + 1] - path[i];
        if (labels[i] == 0)
            d.detached.push_back(d.detached.back() + step);
        else
            d.stuck.push_back(d.stuck.back() + step);
    }
    return d;
}

}  // namespace

Decomposition decompose(const StickQuadruple& quad, const StickingProfile& profile) {
    if (profile.n_steps != quad.n_steps || profile.k != quad.k || profile.tau != quad.tau ||
        profile.tau_prime != quad.tau_prime)
        throw IntegrityError("decompose: profile does not match quadruple");
    Decomposition out;
    out.l_tau = split_path(quad.l_tau, profile.labels, quad.n_steps);
    out.r_tau = split_path(quad.r_tau, profile.labels, quad.n_steps);
    out.l_tau2 = split_path(quad.l_tau2, profile.labels, quad.n_steps);
    out.r_tau2 = split_path(quad.r_tau2, profile.labels, quad.n_steps);
    return out;
}

namespace {

// Walks the alternating sticking/excursion structure of two equal-length
// position sequences.  is_sticking(n) decides whether step n extends the
// current sticking section; the pair must sit together when a section starts.
CouplingTrace extract_cycles(const std::vector<int>& a, const std::vector<int>& b, int horizon,
                             const std::function<bool(int)>& is_sticking) {
    CouplingTrace tr;
    int n = 0;
    for (;;) {
        // sticking section from n (positions equal here)
        int run = 0;
        while (n + run < horizon && is_sticking(n + run)) ++run;
        if (n + run >= horizon) {
            tr.partial = true;
            tr.censored_delta = run;
            return tr;
        }
        tr.deltas.push_back(run);
        n += run;
        // excursion from n: first strictly later meeting
        int m = n + 1;
        while (m <= horizon && a[static_cast<std::size_t>(m)] != b[static_cast<std::size_t>(m)]) ++m;
        if (m > horizon) {
            tr.partial = true;
            return tr;
        }
        tr.gammas.push_back(m - n);
        n = m;
    }
}

}  // namespace

CouplingPair coupling_trace(const WebPair& web, const RectangleStack& stack, int k, double tau,
                            double tau_prime, int horizon) {
    if (horizon < 1) throw GeometryError("coupling_trace: horizon must be >= 1");
    CouplingPair out;

    // Reference pair: the origin path at the two dynamical times.
    const auto s1 = trace_path(web, {0, 0}, tau, horizon);
    const auto s2 = trace_path(web, {0, 0}, tau_prime, horizon);
    out.reference = extract_cycles(s1.positions, s2.positions, horizon, [&](int n) {
        const int x = s1.positions[static_cast<std::size_t>(n)];
        if (x != s2.positions[static_cast<std::size_t>(n)]) return false;
        return web.rings_in(WebId::main, {x, n}, tau, tau_prime) == 0;
    });

    // Starred pair: the rr paths of the quadruple, sticking means rr-label.
    const auto quad = make_quadruple(web, stack, k, tau, tau_prime, horizon);
    const auto profile = classify_sticking(web, quad);
    out.starred = extract_cycles(quad.r_tau, quad.r_tau2, horizon, [&](int n) {
        return (profile.labels[static_cast<std::size_t>(n)] & StickingProfile::RR) != 0;
    });
    return out;
}

Lemma2Point lemma2_statistic(const std::vector<StickingProfile>& profiles, double beta) {
    if (profiles.empty()) throw DegenerateError("lemma2_statistic: empty profile collection");
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("lemma2_statistic: beta outside (0,1)");
    const auto& first = profiles.front();
    for (const auto& p : profiles)
        if (p.k != first.k || p.tau != first.tau || p.tau_prime != first.tau_prime)
            throw IntegrityError("lemma2_statistic: profiles do not share (k, tau, tau')");

    Lemma2Point pt;
    pt.delta = first.delta;
    pt.beta = beta;
    pt.threshold = std::pow(first.delta, beta);
    pt.n = profiles.size();
    std::size_t hits = 0;
    for (const auto& p : profiles)
        if (p.max_sticking_fraction() >= pt.threshold) ++hits;
    pt.frequency = static_cast<double>(hits) / static_cast<double>(pt.n);
    pt.se = std::sqrt(pt.frequency * (1.0 - pt.frequency) / static_cast<double>(pt.n));
    return pt;
}

double lemma2_envelope(const std::vector<Lemma2Point>& points) {
    double c = 0.0;
    for (const auto& p : points)
        c = std::max(c, p.frequency / std::pow(p.delta, 1.0 - p.beta));
    return c;
}

double rescaled_modulus(const std::vector<int>& path, double eps, int scale) {
    const int n = static_cast<int>(path.size()) - 1;
    int m = static_cast<int>(std::ceil(eps * n)) - 1;  // |i-j| < eps*n on the integer grid
    m = std::clamp(m, 0, n);
    if (m == 0) return 0.0;
    // sliding-window min/max over windows of m+1 samples
    std::deque<int> maxq, minq;
    int best = 0;
    for (int j = 0; j <= n; ++j) {
        const int v = path[static_cast<std::size_t>(j)];
        while (!maxq.empty() && path[static_cast<std::size_t>(maxq.back())] <= v) maxq.pop_back();
        maxq.push_back(j);
        while (!minq.empty() && path[static_cast<std::size_t>(minq.back())] >= v) minq.pop_back();
        minq.push_back(j);
        while (maxq.front() < j - m) maxq.pop_front();
        while (minq.front() < j - m) minq.pop_front();
        best = std::max(best, path[static_cast<std::size_t>(maxq.front())] -
                                  path[static_cast<std::size_t>(minq.front())]);
    }
    return static_cast<double>(best) / scale;
}

std::vector<ModulusPoint> modulus_statistic(const RectangleStack& stack, int k,
                                            std::size_t n_samples, std::uint64_t seed_root,
                                            const std::vector<double>& deltas,
                                            const std::vector<std::pair<double, double>>& alpha_betas) {
    if (k < 0 || k > stack.k_max) throw HorizonError("modulus_statistic: k beyond stack");
    const int d = stack.d[static_cast<std::size_t>(k)];
    const int steps = d * d;

    std::vector<ModulusPoint> points;
    for (double delta : deltas)
        for (auto [alpha, beta] : alpha_betas) {
            if (!(beta / 2.0 > alpha))
                throw DomainError("modulus_statistic: need beta/2 > alpha");
            ModulusPoint p;
            p.delta = delta;
            p.alpha = alpha;
            p.beta = beta;
            p.epsilon = std::pow(delta, beta);
            p.threshold = std::pow(delta, alpha) / 2.0;
            p.n = n_samples;
            points.push_back(p);
        }

    std::vector<std::size_t> hits(points.size(), 0);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const WebPair web(replicate_seed(seed_root, i), 1.0);
        const auto tr = trace_path(web, {0, 0}, 0.0, steps);
        for (std::size_t j = 0; j < points.size(); ++j)
            if (rescaled_modulus(tr.positions, points[j].epsilon, d) >= points[j].threshold)
                ++hits[j];
    }
    for (std::size_t j = 0; j < points.size(); ++j) {
        points[j].frequency = static_cast<double>(hits[j]) / static_cast<double>(n_samples);
        points[j].se = std::sqrt(points[j].frequency * (1.0 - points[j].frequency) /
                                 static_cast<double>(n_samples));
    }
    return points;
}

}  // namespace dydw
