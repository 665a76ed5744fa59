#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "memkernel/errors.hpp"
#include "memkernel/kernels.hpp"
#include "memkernel/moments.hpp"
#include "memkernel/operators.hpp"
#include "memkernel/quadrature.hpp"
#include "memkernel/special.hpp"

namespace memkernel {

struct VerificationReport {
    std::string identity;
    std::vector<std::string> samples;
    double max_abs_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;

    void note(const std::string& s) { samples.push_back(s); }
    void residual(double r) { max_abs_residual = std::max(max_abs_residual, std::abs(r)); }
    VerificationReport& finish() {
        pass = max_abs_residual <= tolerance;
        return *this;
    }
};

struct CaputoOptions {
    double fd_step = 0.0;          // 0: 1e-4 * max(t, 1); used for f' (order > 1) and the scan
    double quad_abs_tol = 1e-10;   // quadrature budget on the substituted axis
    double quad_rel_tol = 1e-8;
    bool check_smoothness = true;  // kink detection scan (adds ~130 evaluations)
    bool has_initial_value = false;  // supply f(0) analytically (order < 1)
    double initial_value = 0.0;
    bool has_initial_slope = false;  // supply f'(0) analytically (order > 1)
    double initial_slope = 0.0;
};

namespace detail {

// n-th derivative by second-order finite differences; one-sided near xi = 0.
template <class F>
inline double fd_derivative(const F& f, int n, double xi, double h) {
    if (n == 1) {
        if (xi >= h) return (f(xi + h) - f(xi - h)) / (2.0 * h);
        return (-3.0 * f(xi) + 4.0 * f(xi + h) - f(xi + 2.0 * h)) / (2.0 * h);
    }
    if (xi >= h) return (f(xi + h) - 2.0 * f(xi) + f(xi - h)) / (h * h);
    return (2.0 * f(xi) - 5.0 * f(xi + h) + 4.0 * f(xi + 2.0 * h) - f(xi + 3.0 * h)) / (h * h);
}

}  // namespace detail

/// Caputo fractional derivative of order nu in (0,1) u (1,2) at time t.  The
/// defining integral is brought to derivative-free form by parts,
///   D^nu f(t) = [ (f(t)-f(0)) t^{-nu}
///                 + nu * integral_0^t (f(t)-f(xi)) (t-xi)^{-nu-1} dxi ] / Gamma(1-nu)
/// for nu < 1, and the analogous f'-form for nu in (1,2); the endpoint
/// singularity is flattened by the substitution w = (t-xi)^{n-nu}.  This keeps
/// sharply-started inputs (solver output near t = 0) representable without a
/// finite-difference step racing the input's own scale.
template <class F>
inline double caputo_derivative(const F& f, double nu, double t, const CaputoOptions& opts = {}) {
    if (!(nu > 0.0) || !(nu < 2.0) || nu == 1.0)
        throw parameter_error("caputo_derivative: order must lie in (0,1) or (1,2)");
    if (!(t > 0.0)) throw parameter_error("caputo_derivative: requires t > 0");
    const double h = opts.fd_step > 0.0 ? opts.fd_step : 1e-4 * std::max(t, 1.0);

    if (opts.check_smoothness) {
        // a kink anywhere in (0, t) shows up as a jump in the finite-difference
        // first derivative sampled on a uniform grid, regardless of where the
        // quadrature nodes land
        const int m = 64;
        std::vector<double> g(m + 1);
        double scale = 0.0;
        for (int i = 0; i <= m; ++i) {
            const double xi = t * (i + 0.5) / (m + 2);
            g[i] = detail::fd_derivative(f, 1, xi, h);
            scale = std::max(scale, std::abs(g[i]));
        }
        for (int i = 1; i < m; ++i)
            if (std::abs(g[i + 1] - 2.0 * g[i] + g[i - 1]) > 0.25 * scale + 1e-6)
                throw accuracy_error(
                    "caputo_derivative: divided differences blow up; input not smooth");
    }

    QuadLimits lim;
    lim.max_depth = 18;
    if (nu < 1.0) {
        const double p = 1.0 - nu;
        const double W = std::pow(t, p);
        const double ft = f(t);
        const double f0 = opts.has_initial_value ? opts.initial_value : f(0.0);
        // w = (t-xi)^p turns the tail integral into a bounded integrand,
        //   g(w) = nu (f(t) - f(t - w^{1/p})) w^{-1/p} / p  ->  f'(t)  as w -> 0;
        // the last stretch [0, w_cut] is taken by its limit value (the
        // difference underflows against w^{-1/p} roundoff there)
        auto g = [&](double w) {
            return nu * (ft - f(t - std::pow(w, 1.0 / p))) * std::pow(w, -1.0 / p) / p;
        };
        const double w_cut = W * 1e-4;
        const double tail = g(w_cut) * w_cut +
                            integrate(g, w_cut, W, opts.quad_abs_tol, opts.quad_rel_tol, lim).value;
        return ((ft - f0) * std::pow(t, -nu) + tail) / gamma_fn(1.0 - nu);
    }
    const double p = 2.0 - nu;
    const double W = std::pow(t, p);
    auto fp = [&](double xi) { return detail::fd_derivative(f, 1, xi, h); };
    const double fpt = fp(t);
    const double fp0 = opts.has_initial_slope ? opts.initial_slope : fp(0.0);
    auto g = [&](double w) {
        return (nu - 1.0) * (fpt - fp(t - std::pow(w, 1.0 / p))) * std::pow(w, -1.0 / p) / p;
    };
    const double w_cut = W * 1e-4;
    const double tail =
        g(w_cut) * w_cut + integrate(g, w_cut, W, opts.quad_abs_tol, opts.quad_rel_tol, lim).value;
    return ((fpt - fp0) * std::pow(t, 1.0 - nu) + tail) / gamma_fn(2.0 - nu);
}

struct PdeResidualOptions {
    double h_x = 0.05;           // spatial finite-difference step
    double h_t = 0.0;            // Caputo inner step; 0: 2e-2 * t
    double tolerance = 1e-2;     // stacked quadrature + differencing budget
    double point_tol = 1e-9;     // solver tolerance per point evaluation
};

/// Residual of the Caputo-form equation on solver output at one (x, t):
/// gfpe: D^alpha_t q = B q_xx - mu q_x;  gdwe: D^{2 beta}_t p = a^2 p_xx.
inline VerificationReport check_pde_residual(Equation equation, const MemoryKernel& kernel,
                                             const InitialCondition& ic, const VelocityProfile& v0,
                                             const TransportParams& tp, double x, double t,
                                             const PdeResidualOptions& opts = {}) {
    if (kernel.kind != KernelKind::power_law)
        throw parameter_error("check_pde_residual: Caputo form applies to power-law kernels");
    VerificationReport rep;
    rep.tolerance = opts.tolerance;
    SolveOptions po;
    po.abs_tol = opts.point_tol;

    std::function<double(double, double)> u;
    double nu;
    CaputoOptions copts;
    copts.fd_step = opts.h_t > 0.0 ? opts.h_t : 1e-2 * t;
    copts.check_smoothness = false;  // solver output is smooth by construction
    copts.quad_abs_tol = 1e-6;       // the differenced integrand carries solver noise
    copts.quad_rel_tol = 1e-5;
    if (equation == Equation::gfpe) {
        u = [&](double xx, double tt) { return gfpe_value(kernel, ic, tp, xx, tt, po); };
        nu = kernel.exponent;
        rep.identity = "pde-residual:gfpe";
        copts.has_initial_value = true;  // q(x, 0) = q0(x); zero off-origin for delta
        copts.initial_value = ic.kind == InitialCondition::Kind::delta ? 0.0 : ic(x);
        if (ic.kind == InitialCondition::Kind::delta && x == 0.0)
            throw parameter_error("check_pde_residual: delta profile needs an off-origin x");
    } else {
        u = [&](double xx, double tt) { return gdwe_value(kernel, ic, v0, tp, xx, tt, po); };
        nu = 2.0 * kernel.exponent;
        rep.identity = "pde-residual:gdwe";
        copts.has_initial_slope = true;  // p_t(x, 0) = v0(x)
        if (v0.kind == VelocityProfile::Kind::zero) {
            copts.initial_slope = 0.0;
        } else if (v0.kind == VelocityProfile::Kind::gaussian_derivative) {
            copts.initial_slope = x * std::exp(-x * x / (2.0 * v0.sigma * v0.sigma)) /
                                  (std::sqrt(2.0 * 3.14159265358979323846) *
                                   v0.sigma * v0.sigma * v0.sigma);
        } else {
            throw parameter_error("check_pde_residual: v0 must be zero or gaussian_derivative");
        }
    }
    auto ut = [&](double tt) { return u(x, tt); };
    double lhs;
    if (nu == 1.0 || nu == 2.0) {
        // integer orders are the classical derivatives (alpha = 1, beta = 1)
        const double h = copts.fd_step;
        const int n = nu == 1.0 ? 1 : 2;
        const double d1 = detail::fd_derivative(ut, n, t, h);
        const double d2 = detail::fd_derivative(ut, n, t, 0.5 * h);
        lhs = (4.0 * d2 - d1) / 3.0;
    } else {
        lhs = caputo_derivative(ut, nu, t, copts);
    }

    const double hx = opts.h_x;
    const double um = u(x - hx, t), u0 = u(x, t), up = u(x + hx, t);
    const double uxx = (up - 2.0 * u0 + um) / (hx * hx);
    double rhs;
    if (equation == Equation::gfpe)
        rhs = tp.B * uxx - tp.mu * (up - um) / (2.0 * hx);
    else
        rhs = tp.a * tp.a * uxx;

    const double rel = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-12});
    std::ostringstream os;
    os << "x=" << x << " t=" << t << " lhs=" << lhs << " rhs=" << rhs;
    rep.note(os.str());
    rep.residual(rel);
    return rep.finish();
}

/// Self-reproduction of the subordination densities under kernel composition:
///   integral_0^inf f_{sM2}(y, xi) f_{sM1}(xi, t) dxi = f_{s Mc}(y, t),
/// with Mc(s) = M1(s) * M2(s M1(s)).
inline VerificationReport check_efros_selfreproduction(const MemoryKernel& k1,
                                                       const MemoryKernel& k2, double y, double t,
                                                       double tolerance = 1e-4) {
    if (k1.family != Equation::gfpe || k2.family != Equation::gfpe)
        throw parameter_error("check_efros_selfreproduction: gfpe kernels required");
    VerificationReport rep;
    rep.identity = "efros:" + k1.id + "*" + k2.id;
    rep.tolerance = tolerance;

    double lhs;
    if (k1.degenerate) {
        lhs = subordination_density(k2, DensityVariant::f_sM, y, t);
    } else if (k2.degenerate) {
        lhs = subordination_density(k1, DensityVariant::f_sM, y, t);
    } else {
        auto d1 = make_density(k1, DensityVariant::f_sM);
        auto d2 = make_density(k2, DensityVariant::f_sM);
        const double xi_max = density_tail_bound(d1, t, 1e-9);
        auto f = [&](double xi) { return d2(y, xi) * d1(xi, t); };
        lhs = integrate(f, 0.0, xi_max, 1e-8).value;
    }

    auto m1 = k1.laplace_image.eval;
    auto m2 = k2.laplace_image.eval;
    auto composite = make_image(
        [m1, m2, y](complex_t s) {
            const complex_t mc = m1(s) * m2(s * m1(s));
            return mc * std::exp(-y * s * mc);
        },
        k1.laplace_image.branch_note, k1.laplace_image.singularities);
    const double rhs = detail::invert_density_image(composite, t, 24);

    std::ostringstream os;
    os << "y=" << y << " t=" << t << " lhs=" << lhs << " rhs=" << rhs;
    rep.note(os.str());
    rep.residual(lhs - rhs);
    return rep.finish();
}

/// Mittag-Leffler composition law:
///   d/dT2 int_0^1 du int_{T0}^{T2} dT1 E_a[-u (T2-T1)^a] E_a[-u (T1-T0)^a]
///     = E_a[-(T2-T0)^a].
inline VerificationReport check_ml_composition(double alpha, double t0, double t2,
                                               double tolerance = 1e-3) {
    if (!(t0 >= 0.0) || !(t2 > t0)) throw parameter_error("check_ml_composition: need 0 <= t0 < t2");
    VerificationReport rep;
    rep.identity = "ml-composition";
    rep.tolerance = tolerance;
    const MLParams ml{alpha, 1.0};

    auto G = [&](double T2) {
        auto outer = [&](double u) {
            auto inner = [&](double T1) {
                return mittag_leffler(ml, -u * std::pow(T2 - T1, alpha)) *
                       mittag_leffler(ml, -u * std::pow(T1 - t0, alpha));
            };
            return integrate(inner, t0, T2, 1e-9).value;
        };
        return integrate(outer, 0.0, 1.0, 1e-8).value;
    };
    const double h = 1e-3 * (t2 - t0);
    const double derivative = (G(t2 + h) - G(t2 - h)) / (2.0 * h);
    const double target = mittag_leffler(ml, -std::pow(t2 - t0, alpha));

    std::ostringstream os;
    os << "alpha=" << alpha << " t0=" << t0 << " t2=" << t2 << " d/dT=" << derivative
       << " E_a=" << target;
    rep.note(os.str());
    rep.residual(derivative - target);
    return rep.finish();
}

/// Wave composition law in Fourier space: with the evolution parameter u scaling
/// the squared argument (cos(a sqrt(u) dt k), as in the Mittag-Leffler law at
/// order 2),
///   1/2 d/dT int_0^1 du int_{t0}^{t2} dt1 { cos[a sqrt(u) (t2-t0) k]
///       + cos[a sqrt(u) (t2+t0-2 t1) k] } = cos[a (t2-t0) k].
inline VerificationReport check_wave_composition(double a, double kappa, double t0, double t2,
                                                 double tolerance = 1e-4) {
    if (!(t2 > t0)) throw parameter_error("check_wave_composition: need t0 < t2");
    VerificationReport rep;
    rep.identity = "wave-composition";
    rep.tolerance = tolerance;

    auto G = [&](double T2) {
        auto outer = [&](double u) {
            const double su = std::sqrt(u);
            auto inner = [&](double T1) {
                return 0.5 * (std::cos(a * su * (T2 - t0) * kappa) +
                              std::cos(a * su * (T2 + t0 - 2.0 * T1) * kappa));
            };
            return integrate(inner, t0, T2, 1e-10).value;
        };
        return integrate(outer, 0.0, 1.0, 1e-9).value;
    };
    const double h = 1e-3 * (t2 - t0);
    const double derivative = (G(t2 + h) - G(t2 - h)) / (2.0 * h);
    const double target = std::cos(a * (t2 - t0) * kappa);

    std::ostringstream os;
    os << "a=" << a << " kappa=" << kappa << " t0=" << t0 << " t2=" << t2
       << " d/dT=" << derivative << " cos=" << target;
    rep.note(os.str());
    rep.residual(derivative - target);
    return rep.finish();
}

/// Sign-alternation test of complete monotonicity: (-1)^n d^n/ds^n f(s) >= 0 up
/// to order n_max (<= 6), by central finite differences with Richardson
/// extrapolation.  Violations beyond the differencing noise floor are reported.
inline VerificationReport check_complete_monotonicity(
    const std::function<double(double)>& image_on_axis, const std::vector<double>& s_grid,
    int n_max, const std::string& label = "image") {
    if (n_max < 0 || n_max > 6)
        throw parameter_error("check_complete_monotonicity: n_max must be in [0, 6]");
    VerificationReport rep;
    rep.identity = "cmf:" + label;
    rep.tolerance = 0.0;

    auto derivative = [&](double s, int n, double h, double& stencil_max) {
        if (n == 0) {
            stencil_max = std::abs(image_on_axis(s));
            return image_on_axis(s);
        }
        double acc = 0.0;
        stencil_max = 0.0;
        double binom = 1.0;
        for (int j = 0; j <= n; ++j) {
            const double fx = image_on_axis(s + (0.5 * n - j) * h);
            stencil_max = std::max(stencil_max, std::abs(fx));
            acc += ((j % 2 == 0) ? 1.0 : -1.0) * binom * fx;
            binom *= double(n - j) / double(j + 1);
        }
        return acc / std::pow(h, n);
    };

    bool violated = false;
    for (double s : s_grid) {
        if (!(s > 0.0)) throw parameter_error("check_complete_monotonicity: s_grid must be > 0");
        for (int n = 0; n <= n_max; ++n) {
            const double h = s * std::max(0.02, std::pow(2.2e-16, 1.0 / (n + 2)));
            if (h < 1e-280) throw accuracy_error("check_complete_monotonicity: step underflow");
            double m1 = 0.0, m2 = 0.0;
            const double d_h = derivative(s, n, h, m1);
            const double d_h2 = derivative(s, n, 0.5 * h, m2);
            const double val = n == 0 ? d_h : (4.0 * d_h2 - d_h) / 3.0;
            const double noise =
                50.0 * std::max(m1, m2) * std::pow(2.0, n) * 2.2e-16 / std::pow(0.5 * h, n) + 1e-14;
            const double signed_val = ((n % 2 == 0) ? 1.0 : -1.0) * val;
            if (signed_val < -noise) {
                std::ostringstream os;
                os << "violation at s=" << s << " order n=" << n << " value=" << signed_val;
                rep.note(os.str());
                rep.residual(signed_val);
                violated = true;
            }
        }
    }
    if (!violated) rep.note("sign alternation holds on the grid");
    return rep.finish();
}

inline VerificationReport check_complete_monotonicity(const LaplaceImage& image,
                                                      const std::vector<double>& s_grid, int n_max,
                                                      const std::string& label = "image") {
    return check_complete_monotonicity(
        [&image](double s) { return image(complex_t(s, 0.0)).real(); }, s_grid, n_max, label);
}

/// Mass of a subordination density against its Laplace-side target: 1 for f_sM
/// and F_half, L^{-1}[k-hat^{1/2}(s)/s; t] for F_mixed.
inline VerificationReport check_normalization(const SubordinationDensity& density, double t,
                                              double tolerance = 1e-5) {
    VerificationReport rep;
    rep.identity = "normalization:" + density.source_kernel.id;
    rep.tolerance = tolerance;
    const double target = density.total_mass(t);
    const double xi_max = density_tail_bound(density, t, 1e-9);
    const double mass =
        integrate([&](double xi) { return density(xi, t); }, 0.0, xi_max, 0.02 * tolerance).value;
    std::ostringstream os;
    os << "t=" << t << " mass=" << mass << " target=" << target;
    rep.note(os.str());
    rep.residual(mass - target);
    return rep.finish();
}

}  // namespace memkernel
