#include "dydw/bounds.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dydw/errors.hpp"

namespace dydw {

namespace {
constexpr double kRelTol = 1e-14;
constexpr double kRootTol = 1e-10;
constexpr double kBracketEps = 1e-6;
}  // namespace

double brownian_stay_probability(double start, double t_end, std::size_t max_terms) {
    if (!(std::abs(start) < 1.0))
        throw DomainError("brownian_stay_probability: start must lie in (-1,1)");
    if (!(t_end > 0.0)) throw DomainError("brownian_stay_probability: t_end must be > 0");

    // P = sum over odd n of (4 / n pi) sin(n pi (x+1)/2) exp(-n^2 pi^2 t / 8)
    const double pi = std::numbers::pi;
    double sum = 0.0;
    for (std::size_t i = 0; i < max_terms; ++i) {
        const double n = 2.0 * static_cast<double>(i) + 1.0;
        const double term =
            (4.0 / (n * pi)) * std::sin(n * pi * (start + 1.0) / 2.0) * std::exp(-n * n * pi * pi * t_end / 8.0);
        sum += term;
        if (std::abs(term) < kRelTol * std::max(std::abs(sum), 1e-300)) break;
    }
    return sum;
}

double c_infinity_probability(double gamma) {
    if (!(gamma > 1.0)) throw DomainError("c_infinity_probability: gamma must be > 1");
    const double p = brownian_stay_probability(1.0 / gamma, 1.0);
    return p * p;  // independence + left-right symmetry of the interval
}

double c_star_probability() {
    const double p = brownian_stay_probability(0.0, 1.0);
    return p * p;
}

DimensionLowerBound lower_bound(double K) {
    if (!(K > 0.0)) throw DomainError("lower_bound: K must be > 0");
    DimensionLowerBound out;
    out.K = K;
    out.gamma_tilde = std::sqrt(K * K + 1.0);
    out.p_c_infinity = c_infinity_probability(out.gamma_tilde);
    out.b_infinity = std::log(1.0 / out.p_c_infinity) / std::log(out.gamma_tilde);
    out.lower = 1.0 - out.b_infinity;
    out.vacuous = out.lower < 0.0;
    return out;
}

double f_of_p(double p, double K, std::size_t max_terms) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("f_of_p: p must lie in (0,1)");
    if (!(K > 0.0)) throw DomainError("f_of_p: K must be > 0");

    const double pi = std::numbers::pi;
    const double log_sqrt2k = std::log(std::numbers::sqrt2 * K);
    double sum = 0.0;
    bool decreasing = false;
    double prev = 0.0;
    for (std::size_t n = 1; n <= max_terms; ++n) {
        const double dn = static_cast<double>(n);
        const double term =
            std::exp(dn * log_sqrt2k - std::lgamma(dn + 1.0) + std::lgamma((dn - p) / 2.0));
        sum += term;
        if (n > 1 && term < prev) decreasing = true;
        if (decreasing && term < kRelTol * sum) break;
        prev = term;
    }
    return std::sin(pi * p / 2.0) * std::tgamma(1.0 + p / 2.0) / pi * sum;
}

double solve_p(double K) {
    if (!(K > 0.0)) throw DomainError("solve_p: K must be > 0");
    double lo = kBracketEps, hi = 1.0 - kBracketEps;
    double f_lo = f_of_p(lo, K) - 1.0;
    double f_hi = f_of_p(hi, K) - 1.0;
    if (f_lo * f_hi > 0.0)
        throw SolverError("solve_p: no sign change of f-1 on the bracket; f(lo)-1 = " +
                          std::to_string(f_lo) + ", f(hi)-1 = " + std::to_string(f_hi));
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f_of_p(mid, K) - 1.0;
        if (std::abs(f_mid) < kRootTol) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-16) break;
    }
    const double p = 0.5 * (lo + hi);
    if (std::abs(f_of_p(p, K) - 1.0) >= kRootTol)
        throw SolverError("solve_p: bisection failed to reach tolerance at K = " + std::to_string(K));
    return p;
}

BoundReport bound_report(double K_L, double K_R) {
    if (!(K_L > 0.0) || !(K_R > 0.0)) throw DomainError("bound_report: K values must be > 0");
    BoundReport rep;
    rep.K_L = K_L;
    rep.K_R = K_R;
    rep.symmetric = K_L == K_R;
    if (rep.symmetric) {
        const DimensionLowerBound lb = lower_bound(K_L);
        rep.lower_available = true;
        rep.gamma_tilde = lb.gamma_tilde;
        rep.p_c_infinity = lb.p_c_infinity;
        rep.b_infinity = lb.b_infinity;
        rep.lower = lb.lower;
        rep.lower_vacuous = lb.vacuous;
    }
    rep.p_L = solve_p(K_L);
    rep.p_R = rep.symmetric ? rep.p_L : solve_p(K_R);
    rep.upper = 1.0 - rep.p_L - rep.p_R;
    rep.empty_flag = rep.p_L + rep.p_R > 1.0;
    return rep;
}

}  // namespace dydw
