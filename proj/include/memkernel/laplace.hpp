#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "memkernel/errors.hpp"
#include "memkernel/quadrature.hpp"

namespace memkernel {

using complex_t = std::complex<double>;

enum class SingularityKind { pole, branch_point, removable };

struct SingularPoint {
    double location = 0.0;  // on the real axis
    SingularityKind kind = SingularityKind::branch_point;
};

/// A Laplace-space image F(s), defined and analytic for Re(s) > abscissa,
/// evaluable in the cut plane C \ (-inf, 0] with principal branches.
struct LaplaceImage {
    std::function<complex_t(complex_t)> eval;
    std::string branch_note;  // record of the branch-cut convention in use
    std::vector<SingularPoint> singularities;
    double abscissa = 0.0;

    complex_t operator()(complex_t s) const { return eval(s); }
};

inline LaplaceImage make_image(std::function<complex_t(complex_t)> f,
                               std::string branch_note = "principal log/power, cut on (-inf,0]",
                               std::vector<SingularPoint> sing = {}, double abscissa = 0.0) {
    return LaplaceImage{std::move(f), std::move(branch_note), std::move(sing), abscissa};
}

enum class InversionMethod { talbot, gaver_stehfest, auto_check };

struct InversionConfig {
    int talbot_nodes = 48;       // M of the fixed-Talbot rule
    int stehfest_order = 14;     // even; higher orders are unstable in double precision
    double cross_tol = 1e-6;     // relative Talbot/Stehfest discrepancy before escalation
    int max_node_doublings = 2;  // Talbot node count doublings on cross-check failure
};

struct Inversion {
    double value = 0.0;
    double cross_discrepancy = 0.0;  // |talbot - stehfest| / max(1, |talbot|), auto only
    bool accuracy_warning = false;
    int talbot_nodes_used = 0;
};

namespace detail {

inline void check_contour(const LaplaceImage& img, double r) {
    for (const auto& sp : img.singularities) {
        if (sp.kind == SingularityKind::pole && sp.location >= 0.9 * r)
            throw config_error("invert_laplace: Talbot contour does not enclose declared pole at s=" +
                               std::to_string(sp.location));
    }
}

// Fixed-Talbot rule of Abate & Valko: s(theta) = r*theta*(cot(theta) + i),
// r = 2M/(5t), midpoint discretization with M nodes on the upper half contour.
inline double talbot_real(const LaplaceImage& img, double t, int M) {
    const double r = 2.0 * M / (5.0 * t);
    check_contour(img, r);
    double sum = 0.5 * std::exp(r * t) * img(complex_t(r, 0.0)).real();
    const double pi = 3.14159265358979323846;
    for (int k = 1; k < M; ++k) {
        const double theta = k * pi / M;
        const double cot = std::cos(theta) / std::sin(theta);
        const complex_t s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        const complex_t term = std::exp(t * s) * img(s) * complex_t(1.0, sigma);
        sum += term.real();
    }
    return sum * 2.0 / (5.0 * t);
}

// Full-contour variant for complex-valued originals (no conjugate folding).
inline complex_t talbot_complex(const LaplaceImage& img, double t, int M) {
    const double r = 2.0 * M / (5.0 * t);
    check_contour(img, r);
    const double pi = 3.14159265358979323846;
    complex_t sum = std::exp(r * t) * img(complex_t(r, 0.0));
    for (int k = 1; k < M; ++k) {
        const double theta = k * pi / M;
        const double cot = std::cos(theta) / std::sin(theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        const complex_t sp(r * theta * cot, r * theta);
        const complex_t sm(r * theta * cot, -r * theta);
        sum += std::exp(t * sp) * img(sp) * complex_t(1.0, sigma);
        sum += std::exp(t * sm) * img(sm) * complex_t(1.0, -sigma);
    }
    return sum * (r / (2.0 * M));
}

inline const std::vector<double>& stehfest_coefficients(int order) {
    static const std::vector<double> c14 = [] {
        const int N = 14;
        std::vector<double> zeta(N + 1, 0.0);
        auto fact = [](int n) {
            long double f = 1.0L;
            for (int i = 2; i <= n; ++i) f *= i;
            return f;
        };
        for (int k = 1; k <= N; ++k) {
            long double s = 0.0L;
            const int j_lo = (k + 1) / 2;
            const int j_hi = std::min(k, N / 2);
            for (int j = j_lo; j <= j_hi; ++j) {
                long double num = 1.0L;
                for (int p = 0; p < N / 2; ++p) num *= j;  // j^(N/2)
                num *= fact(2 * j);
                const long double den = fact(N / 2 - j) * fact(j) * fact(j - 1) *
                                        fact(k - j) * fact(2 * j - k);
                s += num / den;
            }
            zeta[k] = static_cast<double>(((k + N / 2) % 2 == 0 ? 1.0L : -1.0L) * s);
        }
        return zeta;
    }();
    if (order != 14) throw config_error("gaver_stehfest: only order 14 is provided");
    return c14;
}

inline double gaver_stehfest(const LaplaceImage& img, double t, int order) {
    const auto& zeta = stehfest_coefficients(order);
    const double ln2_t = 0.69314718055994530942 / t;
    double sum = 0.0;
    for (int k = 1; k <= order; ++k) sum += zeta[k] * img(complex_t(k * ln2_t, 0.0)).real();
    return sum * ln2_t;
}

// Bromwich integral along the vertical line Re s = c, adaptive quadrature in
// panels of doubling width.  Much slower than Talbot but immune to the contour
// blow-up of images growing like e^{+xi |s|} on the back of the Talbot contour
// (subordination-density tails).  Absolute accuracy ~ e^{ct} * eps * |F|.
inline double bromwich_line(const LaplaceImage& img, double t, double abs_tol = 1e-13) {
    const double c = std::max(1.5 / t, img.abscissa + 0.5) + 0.75;
    const double pi = 3.14159265358979323846;
    auto g = [&](double y) {
        const complex_t s(c, y);
        return (std::exp(s * t) * img(s)).real() / pi;
    };
    double lo = 0.0, total = 0.0;
    int quiet = 0;
    long evals = 0;
    for (int k = 0; k < 48; ++k) {
        const double hi = (k == 0) ? std::max(8.0 / t, 8.0) : 2.0 * lo;
        QuadLimits lim;
        lim.max_evaluations = 40000;
        const QuadResult q = integrate(g, lo, hi, 0.25 * abs_tol, 0.0, lim);
        total += q.value;
        evals += q.evaluations;
        if (evals > 200000)
            throw accuracy_error("bromwich_line: evaluation budget exhausted before decay");
        if (std::abs(q.value) < 0.25 * abs_tol) {
            if (++quiet >= 2) return total;
        } else {
            quiet = 0;
        }
        lo = hi;
    }
    throw accuracy_error("bromwich_line: integrand did not decay within the panel budget");
}

// Talbot sum with a roundoff-amplification estimate: the absolute noise floor is
// the largest term magnitude times machine epsilon (cancellation loss).
inline double talbot_real_noise(const LaplaceImage& img, double t, int M, double& noise_abs) {
    const double r = 2.0 * M / (5.0 * t);
    check_contour(img, r);
    double sum = 0.5 * std::exp(r * t) * img(complex_t(r, 0.0)).real();
    double max_term = std::abs(sum);
    const double pi = 3.14159265358979323846;
    for (int k = 1; k < M; ++k) {
        const double theta = k * pi / M;
        const double cot = std::cos(theta) / std::sin(theta);
        const complex_t s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        const complex_t term = std::exp(t * s) * img(s) * complex_t(1.0, sigma);
        sum += term.real();
        max_term = std::max(max_term, std::abs(term));
    }
    const double scale = 2.0 / (5.0 * t);
    noise_abs = max_term * 2.2e-16 * std::sqrt(double(M)) * scale;
    return sum * scale;
}

// Density-image inversion: fixed Talbot while its roundoff amplification stays
// below 1e-10 of the value, vertical-line Bromwich beyond.  Density images grow
// like e^{+xi |s M(s)|} along the back of the Talbot contour at large xi, which
// first drowns the sum in cancellation noise and eventually overflows; the
// max-term metric catches both.  The tight threshold keeps the returned values
// smooth in xi to ~1e-10 relative, so downstream adaptive quadrature never
// chases evaluation noise.
inline double invert_density_image(const LaplaceImage& img, double t, int nodes) {
    // Two contours (radii r = 2M/5t differ): their agreement certifies the value
    // against truncation, while the max-term metric bounds cancellation roundoff.
    // At these node counts both sums carry ~1e-12 relative roundoff, so the
    // 1e-9 agreement threshold flips cleanly, without noise-driven flicker.
    double noise1 = 0.0, noise2 = 0.0;
    const double v1 = talbot_real_noise(img, t, nodes, noise1);
    const double v2 = talbot_real_noise(img, t, nodes + (2 * nodes) / 5, noise2);
    const double av = std::abs(v1);
    if (std::isfinite(v1) && std::isfinite(v2) && av < 1e8 &&
        noise1 <= std::max(1e-14, 1e-10 * av) &&
        std::abs(v1 - v2) <= std::max(1e-13, 1e-9 * av))
        return v1;
    return bromwich_line(img, t, 1e-12);
}

}  // namespace detail

/// Numerical inverse Laplace transform of `img` at time t > 0.
/// `auto_check` returns the Talbot value with a Gaver-Stehfest cross-check; on
/// disagreement the Talbot node count is doubled, and a persisting discrepancy is
/// recorded as an accuracy warning on the result.
inline Inversion invert_laplace(const LaplaceImage& img, double t,
                                InversionMethod method = InversionMethod::auto_check,
                                const InversionConfig& cfg = {}) {
    if (!(t > 0.0)) throw parameter_error("invert_laplace: requires t > 0");
    Inversion out;
    switch (method) {
        case InversionMethod::talbot:
            out.value = detail::talbot_real(img, t, cfg.talbot_nodes);
            out.talbot_nodes_used = cfg.talbot_nodes;
            return out;
        case InversionMethod::gaver_stehfest:
            out.value = detail::gaver_stehfest(img, t, cfg.stehfest_order);
            return out;
        case InversionMethod::auto_check: {
            // Talbot value cross-checked against Gaver-Stehfest; the node count
            // is doubled while the discrepancy shrinks (Talbot truncation), and
            // the best-agreeing candidate is returned.  A persisting discrepancy
            // is the Stehfest side's truncation and is recorded as a warning.
            const double gs = detail::gaver_stehfest(img, t, cfg.stehfest_order);
            int M = cfg.talbot_nodes;
            double best_value = detail::talbot_real(img, t, M);
            int best_nodes = M;
            double best_disc = std::abs(best_value - gs) / std::max(1.0, std::abs(best_value));
            for (int d = 0; d < cfg.max_node_doublings && best_disc > cfg.cross_tol; ++d) {
                M *= 2;
                const double v = detail::talbot_real(img, t, M);
                const double disc = std::abs(v - gs) / std::max(1.0, std::abs(v));
                if (disc >= best_disc) break;  // not Talbot truncation; stop escalating
                best_value = v;
                best_disc = disc;
                best_nodes = M;
            }
            out.value = best_value;
            out.cross_discrepancy = best_disc;
            out.talbot_nodes_used = best_nodes;
            if (best_disc > cfg.cross_tol) {
                out.accuracy_warning = true;
                diag::counters().inversion_cross_check_warnings++;
            }
            return out;
        }
    }
    throw config_error("invert_laplace: unknown method");
}

/// Complex-original inversion (used for Mittag-Leffler values off the real axis).
inline complex_t invert_laplace_complex(const LaplaceImage& img, double t, int talbot_nodes = 48) {
    if (!(t > 0.0)) throw parameter_error("invert_laplace_complex: requires t > 0");
    return detail::talbot_complex(img, t, talbot_nodes);
}

}  // namespace memkernel
