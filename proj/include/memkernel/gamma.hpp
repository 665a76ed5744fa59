#pragma once

#include <cmath>
#include <limits>

#include "memkernel/errors.hpp"

namespace memkernel {

namespace detail {

// Lanczos approximation, g = 7, 9 coefficients.  Relative error below 1e-13
// over the positive real axis; see Lanczos (1964) and the widely used
// coefficient set of Godfrey.
inline constexpr double lanczos_g = 7.0;
inline constexpr double lanczos_coeff[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

inline double lanczos_sum(double z) {
    double s = lanczos_coeff[0];
    for (int i = 1; i < 9; ++i) s += lanczos_coeff[i] / (z + i);
    return s;
}

}  // namespace detail

/// Gamma function on the real line (poles at 0, -1, -2, ... excluded).
inline double gamma_fn(double x) {
    if (std::isnan(x)) return x;
    if (x <= 0.0 && x == std::floor(x)) throw parameter_error("gamma_fn: pole at non-positive integer");
    if (x < 0.5) {
        // reflection formula
        const double pi = 3.14159265358979323846;
        return pi / (std::sin(pi * x) * gamma_fn(1.0 - x));
    }
    if (x > 171.624) return std::numeric_limits<double>::infinity();
    const double z = x - 1.0;
    const double t = z + detail::lanczos_g + 0.5;
    const double sqrt_two_pi = 2.50662827463100050242;
    return sqrt_two_pi * std::pow(t, z + 0.5) * std::exp(-t) * detail::lanczos_sum(z);
}

/// log |Gamma(x)| for x > 0 (no reflection); avoids overflow of gamma_fn.
inline double log_gamma(double x) {
    if (x <= 0.0) throw parameter_error("log_gamma: requires x > 0");
    if (x < 0.5) return std::log(gamma_fn(x));
    const double z = x - 1.0;
    const double t = z + detail::lanczos_g + 0.5;
    const double log_sqrt_two_pi = 0.91893853320467274178;
    return log_sqrt_two_pi + (z + 0.5) * std::log(t) - t + std::log(detail::lanczos_sum(z));
}

/// 1/Gamma(x); zero at the poles of Gamma, finite everywhere else.
inline double reciprocal_gamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return 0.0;
    if (x > 171.624) return 0.0;
    if (x < 0.5) {
        const double pi = 3.14159265358979323846;
        return std::sin(pi * x) * gamma_fn(1.0 - x) / pi;
    }
    return 1.0 / gamma_fn(x);
}

}  // namespace memkernel
