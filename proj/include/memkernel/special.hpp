#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include "memkernel/errors.hpp"
#include "memkernel/gamma.hpp"
#include "memkernel/laplace.hpp"

namespace memkernel {

/// Parameters of the two-parameter Mittag-Leffler function E_{alpha,beta2}.
struct MLParams {
    double alpha;        // order, in (0, 2]
    double beta2 = 1.0;  // second parameter, > 0; beta2 = 1 is the one-parameter function

    void validate() const {
        if (!(alpha > 0.0) || !(alpha <= 2.0)) throw parameter_error("MLParams: alpha must be in (0,2]");
        if (!(beta2 > 0.0)) throw parameter_error("MLParams: beta2 must be > 0");
    }
};

/// Parameters of the one-sided stable density Phi_alpha(sigma).
struct StableParams {
    double alpha;  // stability index, in (0, 1)
    double sigma;  // argument, > 0

    void validate() const {
        if (!(alpha > 0.0) || !(alpha < 1.0))
            throw parameter_error("StableParams: alpha must be in (0,1)");
        if (!(sigma > 0.0)) throw parameter_error("StableParams: sigma must be > 0");
    }
};

namespace detail {

constexpr double ml_taylor_radius = 5.0;
constexpr double ml_cancellation_limit = 1e4;  // max|term|/|sum| before the contour route takes over
constexpr double ml_exp_arg_limit = 705.0;     // exp overflow bound on z^(1/alpha)

// Series over z^n / Gamma(alpha n + beta2), terms formed in log space.
// Returns the max |term| / |sum| ratio so the caller can detect cancellation.
inline std::complex<double> ml_taylor(double alpha, double beta2, std::complex<double> z,
                                      double& cancel_ratio) {
    const std::complex<double> lz = std::log(z);
    std::complex<double> sum = reciprocal_gamma(beta2);
    double max_term = std::abs(sum);
    for (int n = 1; n < 100000; ++n) {
        const double g = alpha * n + beta2;
        const std::complex<double> term = std::exp(double(n) * lz - log_gamma(g));
        sum += term;
        const double at = std::abs(term);
        if (at > max_term) max_term = at;
        if (at > 1e30) {  // summation hopeless in double precision, defer to the contour
            cancel_ratio = std::numeric_limits<double>::infinity();
            return sum;
        }
        if (at < 1e-17 * (std::abs(sum) + 1e-300) && n > 4) break;
    }
    cancel_ratio = max_term / (std::abs(sum) + 1e-300);
    return sum;
}

// All-positive-terms series for real z >= 0 (no cancellation at any magnitude).
inline double ml_taylor_positive(double alpha, double beta2, double z) {
    const double lz = std::log(z);
    const double n_peak = std::pow(z, 1.0 / alpha);  // largest term sits near n ~ z^(1/alpha)
    double sum = reciprocal_gamma(beta2);
    for (int n = 1; n < 200000; ++n) {
        const double g = alpha * n + beta2;
        const double term = std::exp(n * lz - log_gamma(g));
        sum += term;
        if (term < 1e-17 * sum && n > n_peak) break;
    }
    return sum;
}

// Contour route: E_{alpha,beta2}(z) = L^{-1}[ s^{alpha-beta2} / (s^alpha - z); t = 1 ].
// The fixed-Talbot contour must enclose every principal-sheet root of s^alpha = z;
// the node count is escalated until it does.
inline std::complex<double> ml_contour(double alpha, double beta2, std::complex<double> z) {
    const double pi = 3.14159265358979323846;
    const double az = std::abs(z);
    const double mag = std::pow(az, 1.0 / alpha);
    double max_im = 0.0, max_re = 0.0;
    for (int k = -1; k <= 1; ++k) {
        const double ang = (std::arg(z) + 2.0 * pi * k) / alpha;
        if (std::abs(ang) < pi) {
            max_im = std::max(max_im, std::abs(mag * std::sin(ang)));
            max_re = std::max(max_re, mag * std::cos(ang));
        }
    }
    // M = 24 is the double-precision optimum of the fixed-Talbot rule at t = 1
    // (roundoff grows like e^{2M/5}); escalated only until the contour encloses
    // every pole of the image.
    int M = 24;
    for (int esc = 0; esc < 7; ++esc) {
        const double r = 2.0 * M / 5.0;  // t = 1
        if (max_im < 0.8 * r * pi && max_re < 0.8 * r) break;
        M *= 2;
    }
    {
        const double r = 2.0 * M / 5.0;
        if (!(max_im < 0.8 * r * pi && max_re < 0.8 * r))
            throw range_error("mittag_leffler: argument outside the contour-route domain");
    }
    auto image = make_image([alpha, beta2, z](complex_t s) {
        return std::exp((alpha - beta2) * std::log(s)) / (std::exp(alpha * std::log(s)) - z);
    });
    return talbot_complex(image, 1.0, M);
}

}  // namespace detail

/// Two-parameter Mittag-Leffler function E_{alpha,beta2}(z), complex argument.
/// Taylor summation inside |z| <= 5 with a cancellation self-check; contour
/// inversion of the Laplace-space form beyond.
inline std::complex<double> mittag_leffler(const MLParams& p, std::complex<double> z) {
    p.validate();
    if (z == std::complex<double>(0.0, 0.0)) return reciprocal_gamma(p.beta2);
    if (z.imag() == 0.0 && z.real() > 0.0) {
        if (std::pow(z.real(), 1.0 / p.alpha) > detail::ml_exp_arg_limit)
            throw range_error("mittag_leffler: result overflows double range");
        return detail::ml_taylor_positive(p.alpha, p.beta2, z.real());
    }
    if (std::abs(z) <= detail::ml_taylor_radius) {
        double cancel = 0.0;
        const std::complex<double> v = detail::ml_taylor(p.alpha, p.beta2, z, cancel);
        if (cancel < detail::ml_cancellation_limit) return v;
    }
    return detail::ml_contour(p.alpha, p.beta2, z);
}

/// Real-argument convenience overload.
inline double mittag_leffler(const MLParams& p, double z) {
    return mittag_leffler(p, std::complex<double>(z, 0.0)).real();
}

inline double mittag_leffler(double alpha, double z) { return mittag_leffler(MLParams{alpha, 1.0}, z); }

namespace detail {

// Convergent descending series for sigma >= 1,
//   Phi_alpha(sigma) = (1/pi) sum_{k>=1} (-1)^{k+1} Gamma(1+k alpha)/k! sin(k pi alpha) sigma^{-1-k alpha};
// cancellation-free there, and exact to near machine precision.
inline double stable_series_large_sigma(double alpha, double sigma) {
    const double pi = 3.14159265358979323846;
    const double ls = std::log(sigma);
    double sum = 0.0;
    for (int k = 1; k <= 400; ++k) {
        const double amp =
            std::exp(log_gamma(1.0 + k * alpha) - log_gamma(k + 1.0) - (1.0 + k * alpha) * ls);
        sum += ((k % 2 == 1) ? 1.0 : -1.0) * amp * std::sin(k * pi * alpha);
        if (amp < 1e-17 * std::abs(sum) && k > 8) break;
    }
    return sum / pi;
}

}  // namespace detail

/// One-sided (one-argument) stable density Phi_alpha(sigma) = L^{-1}[e^{-s^alpha}; sigma].
/// Bromwich inversion on the fixed-Talbot contour below sigma = 1 (its strong
/// regime); descending series above, where the contour sum is roundoff-limited.
/// For alpha > 1/2 the image grows along the contour back at small sigma, so
/// that branch carries the contour-certified fallback.
inline double levy_stable_density(const StableParams& p) {
    p.validate();
    if (p.sigma >= 1.0) {
        const double v = detail::stable_series_large_sigma(p.alpha, p.sigma);
        return v < 0.0 ? 0.0 : v;
    }
    auto image = make_image(
        [a = p.alpha](complex_t s) { return std::exp(-std::exp(a * std::log(s))); },
        "principal power s^alpha, cut on (-inf,0]", {{0.0, SingularityKind::branch_point}});
    // alpha <= 1/2: the image decays on the entire contour, plain Talbot holds
    // (M = 32 balances truncation at small sigma against e^{2M/5} roundoff)
    const double v = p.alpha <= 0.5 ? detail::talbot_real(image, p.sigma, 32)
                                    : detail::invert_density_image(image, p.sigma, 32);
    return v < 0.0 ? 0.0 : v;  // noise-floor roundoff only; the density is non-negative
}

inline double levy_stable_density(double alpha, double sigma) {
    return levy_stable_density(StableParams{alpha, sigma});
}

/// Two-argument stable density Phi_alpha(xi, t) = L^{-1}[e^{-xi s^alpha}; t], via the
/// self-reproducing scaling Phi_alpha(xi, t) = xi^{-1/alpha} Phi_alpha(t xi^{-1/alpha}).
inline double levy_stable_two_arg(double alpha, double xi, double t) {
    if (!(xi > 0.0)) throw parameter_error("levy_stable_two_arg: requires xi > 0");
    if (!(t > 0.0)) throw parameter_error("levy_stable_two_arg: requires t > 0");
    const double scale = std::pow(xi, -1.0 / alpha);
    return scale * levy_stable_density(StableParams{alpha, t * scale});
}

/// Fractional heat polynomial
///   H_n(beta; x, a, t) = n! sum_{r=0}^{floor(n/2)} (a t^beta)^{2r} x^{n-2r} / [Gamma(1+2 beta r) (n-2r)!].
/// beta = 1/2 reduces to the classical heat polynomials; beta = 1 to the wave case.
inline double fractional_heat_polynomial(double beta, int n, double x, double a, double t) {
    if (!(beta >= 0.5) || !(beta <= 1.0))
        throw parameter_error("fractional_heat_polynomial: beta must be in [1/2, 1]");
    if (n < 0) throw parameter_error("fractional_heat_polynomial: n must be >= 0");
    if (!(t >= 0.0)) throw parameter_error("fractional_heat_polynomial: t must be >= 0");
    if (n == 0) return 1.0;

    const double atb = a * std::pow(t, beta);
    double sum = 0.0;
    for (int r = 0; r <= n / 2; ++r) {
        const int m = n - 2 * r;  // power of x
        double lmag = log_gamma(n + 1.0) - log_gamma(m + 1.0) - log_gamma(1.0 + 2.0 * beta * r);
        double sign = 1.0;
        if (r > 0) {
            if (atb == 0.0) continue;
            lmag += 2.0 * r * std::log(std::abs(atb));
        }
        if (m > 0) {
            if (x == 0.0) continue;
            lmag += m * std::log(std::abs(x));
            if (x < 0.0 && m % 2 == 1) sign = -sign;
        }
        sum += sign * std::exp(lmag);
    }
    return sum;
}

}  // namespace memkernel
