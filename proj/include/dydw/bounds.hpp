#pragma once

#include <cstddef>

namespace dydw {

// P(a standard Brownian motion from start stays in [-1,1] up to t_end),
// via the absorbing-interval eigenfunction series; terms added until the
// next one is below 1e-14 relative.
double brownian_stay_probability(double start, double t_end, std::size_t max_terms = 2'000'000);

// P(C_infinity(gamma)): two independent Brownian motions from -1/gamma and
// +1/gamma both stay in [-1,1] up to time 1.
double c_infinity_probability(double gamma);

// The gamma -> infinity limit variant: both motions started at the center.
double c_star_probability();

struct DimensionLowerBound {
    double K = 0.0;
    double gamma_tilde = 0.0;    // sqrt(K^2 + 1)
    double p_c_infinity = 0.0;
    double b_infinity = 0.0;     // log(1/P) / log(gamma_tilde)
    double lower = 0.0;          // 1 - b_infinity, emitted raw
    bool vacuous = false;        // lower < 0
};

DimensionLowerBound lower_bound(double K);

// f(p, K) = sin(pi p/2) Gamma(1+p/2) / pi * sum_n (sqrt2 K)^n / n! Gamma((n-p)/2).
double f_of_p(double p, double K, std::size_t max_terms = 1'000'000);

// Root of f(p, K) = 1 in (1e-6, 1-1e-6) by bracketing + bisection to
// |f - 1| < 1e-10; throws SolverError when the bracket has no sign change.
double solve_p(double K);

struct BoundReport {
    double K_L = 0.0;
    double K_R = 0.0;
    bool symmetric = false;

    // lower bound; computed for the symmetric case only
    bool lower_available = false;
    double gamma_tilde = 0.0;
    double p_c_infinity = 0.0;
    double b_infinity = 0.0;
    double lower = 0.0;
    bool lower_vacuous = false;

    double p_L = 0.0;
    double p_R = 0.0;
    double upper = 0.0;        // 1 - p(K_L) - p(K_R)
    bool empty_flag = false;   // p(K_L) + p(K_R) > 1
};

BoundReport bound_report(double K_L, double K_R);

}  // namespace dydw
