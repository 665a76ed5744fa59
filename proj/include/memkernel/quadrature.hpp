#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

#include "memkernel/errors.hpp"

namespace memkernel {

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
    bool converged = true;
};

struct QuadLimits {
    // Depth 24 puts the smallest panel at (b-a)/2^24, below any feature scale of
    // the integrands here; deeper descent only chases evaluation noise, whose
    // error/tolerance ratio is depth-invariant under proportional splitting.
    int max_depth = 24;
    long max_evaluations = 400000;  // hard budget across the whole subdivision tree
};

namespace detail {

// Gauss-Kronrod 15-point pair (QUADPACK dqk15 abscissae/weights).
inline constexpr double gk15_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
inline constexpr double gk15_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
inline constexpr double gk15_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

template <class F>
inline void gk15_panel(const F& f, double a, double b, double& value, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = gk15_wk[7] * fc;
    double resg = gk15_wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * gk15_x[j];
        const double fsum = f(c - dx) + f(c + dx);
        resk += gk15_wk[j] * fsum;
        if (j % 2 == 1) resg += gk15_wg[j / 2] * fsum;
    }
    value = resk * h;
    err = std::abs((resk - resg) * h);
}

template <class F>
inline void integrate_rec(const F& f, double a, double b, double v, double e, double abs_tol,
                          double rel_tol, int depth, const QuadLimits& lim, QuadResult& out) {
    const double local_tol = std::max(abs_tol, rel_tol * std::abs(v));
    if (e <= local_tol || depth >= lim.max_depth || out.evaluations >= lim.max_evaluations) {
        out.value += v;
        out.error_estimate += e;
        if (e > local_tol) out.converged = false;
        return;
    }
    const double m = 0.5 * (a + b);
    double v1, e1, v2, e2;
    gk15_panel(f, a, m, v1, e1);
    gk15_panel(f, m, b, v2, e2);
    out.evaluations += 30;
    integrate_rec(f, a, m, v1, e1, 0.5 * abs_tol, rel_tol, depth + 1, lim, out);
    integrate_rec(f, m, b, v2, e2, 0.5 * abs_tol, rel_tol, depth + 1, lim, out);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b].
template <class F>
inline QuadResult integrate(const F& f, double a, double b, double abs_tol = 1e-10,
                            double rel_tol = 0.0, QuadLimits lim = {}) {
    QuadResult out;
    if (a == b) return out;
    double v, e;
    detail::gk15_panel(f, a, b, v, e);
    out.evaluations = 15;
    detail::integrate_rec(f, a, b, v, e, abs_tol, rel_tol, 0, lim, out);
    return out;
}

/// Same, but throws accuracy_error when the requested tolerance was not met.
template <class F>
inline double integrate_or_throw(const F& f, double a, double b, double abs_tol = 1e-10,
                                 double rel_tol = 0.0, QuadLimits lim = {}) {
    QuadResult r = integrate(f, a, b, abs_tol, rel_tol, lim);
    if (!r.converged)
        throw accuracy_error("quadrature did not converge to requested tolerance", r.error_estimate);
    return r.value;
}

/// Integral of a fast-decaying f over [a, inf) via the rational map x = a + u/(1-u).
/// Requires decay faster than 1/x^2; heavy-tailed integrands need a custom split.
template <class F>
inline QuadResult integrate_half_line(const F& f, double a, double abs_tol = 1e-10,
                                      double rel_tol = 0.0) {
    auto g = [&](double u) {
        const double w = 1.0 - u;
        const double x = a + u / w;
        return f(x) / (w * w);
    };
    return integrate(g, 0.0, 1.0, abs_tol, rel_tol);
}

}  // namespace memkernel
