#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "memkernel/errors.hpp"
#include "memkernel/kernels.hpp"
#include "memkernel/quadrature.hpp"
#include "memkernel/special.hpp"

namespace memkernel {

struct TransportParams {
    double B = 1.0;   // diffusion coefficient (gfpe), > 0
    double mu = 0.0;  // drift coefficient (gfpe), >= 0
    double a = 1.0;   // wave speed (gdwe), > 0

    void validate(Equation eq) const {
        if (eq == Equation::gfpe) {
            if (!(B > 0.0)) throw parameter_error("TransportParams: B must be > 0");
            if (mu < 0.0) throw parameter_error("TransportParams: mu must be >= 0");
        } else if (!(a > 0.0)) {
            throw parameter_error("TransportParams: a must be > 0");
        }
    }
};

struct InitialCondition {
    enum class Kind { delta, box, gaussian, custom };
    Kind kind = Kind::delta;
    double eps = 0.0;      // box half-width
    double sigma_x = 0.0;  // gaussian width
    std::function<double(double)> profile;  // custom sampled profile
    double lo = 0.0, hi = 0.0;              // custom support

    static InitialCondition delta() { return {}; }
    static InitialCondition box(double eps) {
        if (!(eps > 0.0)) throw parameter_error("box IC: eps must be > 0");
        InitialCondition ic;
        ic.kind = Kind::box;
        ic.eps = eps;
        return ic;
    }
    static InitialCondition gaussian(double sigma_x) {
        if (!(sigma_x > 0.0)) throw parameter_error("gaussian IC: sigma_x must be > 0");
        InitialCondition ic;
        ic.kind = Kind::gaussian;
        ic.sigma_x = sigma_x;
        return ic;
    }
    static InitialCondition custom(std::function<double(double)> f, double lo, double hi) {
        if (!(hi > lo)) throw parameter_error("custom IC: requires hi > lo");
        InitialCondition ic;
        ic.kind = Kind::custom;
        ic.profile = std::move(f);
        ic.lo = lo;
        ic.hi = hi;
        return ic;
    }

    /// Pointwise value; the delta profile has none.
    double operator()(double x) const {
        switch (kind) {
            case Kind::delta:
                throw config_error("delta initial condition has no pointwise value");
            case Kind::box:
                return std::abs(x) < eps ? 1.0 / (2.0 * eps) : 0.0;
            case Kind::gaussian:
                return std::exp(-x * x / (2.0 * sigma_x * sigma_x)) /
                       (std::sqrt(2.0 * 3.14159265358979323846) * sigma_x);
            case Kind::custom:
                return (x < lo || x > hi) ? 0.0 : profile(x);
        }
        return 0.0;
    }

    std::string describe() const {
        switch (kind) {
            case Kind::delta: return "delta";
            case Kind::box: return "box:" + std::to_string(eps);
            case Kind::gaussian: return "gaussian:" + std::to_string(sigma_x);
            case Kind::custom: return "custom";
        }
        return "?";
    }
};

/// Second (velocity) initial profile of the diffusion-wave equation.
struct VelocityProfile {
    enum class Kind { zero, neg_derivative_of_p0, gaussian_derivative, box_spikes, custom };
    Kind kind = Kind::zero;
    double sigma = 0.0;  // gaussian_derivative width
    double eps = 0.0;    // box_spikes half-separation
    std::function<double(double)> profile;
    double lo = 0.0, hi = 0.0;

    static VelocityProfile zero() { return {}; }
    static VelocityProfile neg_derivative_of_p0() {
        VelocityProfile v;
        v.kind = Kind::neg_derivative_of_p0;
        return v;
    }
    static VelocityProfile gaussian_derivative(double sigma) {
        if (!(sigma > 0.0)) throw parameter_error("gaussian_derivative v0: sigma must be > 0");
        VelocityProfile v;
        v.kind = Kind::gaussian_derivative;
        v.sigma = sigma;
        return v;
    }
    static VelocityProfile box_spikes(double eps) {
        if (!(eps > 0.0)) throw parameter_error("box_spikes v0: eps must be > 0");
        VelocityProfile v;
        v.kind = Kind::box_spikes;
        v.eps = eps;
        return v;
    }
    static VelocityProfile custom(std::function<double(double)> f, double lo, double hi) {
        VelocityProfile v;
        v.kind = Kind::custom;
        v.profile = std::move(f);
        v.lo = lo;
        v.hi = hi;
        return v;
    }

    bool is_zero() const { return kind == Kind::zero; }

    /// v0 = -p0' resolved against the concrete first profile.
    VelocityProfile resolve(const InitialCondition& p0) const {
        if (kind != Kind::neg_derivative_of_p0) return *this;
        switch (p0.kind) {
            case InitialCondition::Kind::box: return box_spikes(p0.eps);
            case InitialCondition::Kind::gaussian: return gaussian_derivative(p0.sigma_x);
            default:
                throw parameter_error("v0 = -p0' requires a box or gaussian p0");
        }
    }

    std::string describe() const {
        switch (kind) {
            case Kind::zero: return "zero";
            case Kind::neg_derivative_of_p0: return "neg_dp0";
            case Kind::gaussian_derivative: return "gauss_deriv:" + std::to_string(sigma);
            case Kind::box_spikes: return "box_spikes:" + std::to_string(eps);
            case Kind::custom: return "custom";
        }
        return "?";
    }
};

struct SolutionField {
    std::vector<double> grid;
    std::vector<double> values;
    struct Meta {
        std::string kernel_id;
        std::string ic;
        std::string v0;
        TransportParams tp;
        double t = 0.0;
        Equation equation = Equation::gfpe;
    } meta;
};

inline std::vector<double> make_grid(double lo, double hi, int n) {
    if (n < 2 || !(hi > lo)) throw parameter_error("make_grid: need n >= 2 and hi > lo");
    std::vector<double> g(n);
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) g[i] = lo + i * h;
    return g;
}

namespace detail {

inline double gauss_pdf(double x, double sd) {
    return std::exp(-x * x / (2.0 * sd * sd)) / (std::sqrt(2.0 * 3.14159265358979323846) * sd);
}

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("MEMKERNEL_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return std::max(1, n);
}

template <class Fn>
inline void parallel_for(std::size_t n, int threads, const Fn& fn) {
    threads = std::min<std::size_t>(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

/// Action of exp(xi (B d^2/dx^2 - mu d/dx)) on the initial profile: the Gauss-
/// Weierstrass transform drifted to x - mu xi.  Closed forms for delta, box and
/// gaussian profiles; quadrature for custom ones.
inline double diffusion_parent(const InitialCondition& ic, const TransportParams& tp, double xi,
                               double x) {
    if (xi < 0.0) throw parameter_error("diffusion_parent: requires xi >= 0");
    tp.validate(Equation::gfpe);
    const double z = x - tp.mu * xi;
    if (xi == 0.0) {
        if (ic.kind == InitialCondition::Kind::delta) {
            if (z == 0.0)
                throw config_error("diffusion_parent: delta profile at xi = 0 is distributional");
            return 0.0;
        }
        return ic(z);
    }
    const double var = 2.0 * tp.B * xi;  // heat-kernel variance
    switch (ic.kind) {
        case InitialCondition::Kind::delta:
            return detail::gauss_pdf(z, std::sqrt(var));
        case InitialCondition::Kind::box: {
            const double s = std::sqrt(4.0 * tp.B * xi);
            return (std::erf((z + ic.eps) / s) - std::erf((z - ic.eps) / s)) / (4.0 * ic.eps);
        }
        case InitialCondition::Kind::gaussian:
            return detail::gauss_pdf(z, std::sqrt(ic.sigma_x * ic.sigma_x + var));
        case InitialCondition::Kind::custom: {
            const double sd = std::sqrt(var);
            auto f = [&](double y) { return ic.profile(y) * detail::gauss_pdf(z - y, sd); };
            return integrate(f, ic.lo, ic.hi, 1e-12, 1e-10).value;
        }
    }
    return 0.0;
}

/// cos(a xi d/dx) p0(x) = [p0(x + a xi) + p0(x - a xi)] / 2.
inline double wave_parent_cos(const InitialCondition& p0, double a, double xi, double x) {
    if (xi < 0.0) throw parameter_error("wave_parent_cos: requires xi >= 0");
    if (p0.kind == InitialCondition::Kind::delta)
        throw config_error("wave_parent_cos: delta profile is distributional; solvers handle it");
    return 0.5 * (p0(x + a * xi) + p0(x - a * xi));
}

/// sin(a xi d/dx) v0(x) = (2a)^{-1} integral of v0 over (x - a xi, x + a xi).
/// A delta spike sitting exactly on a window endpoint counts with half weight.
inline double wave_parent_sin(const VelocityProfile& v0, double a, double xi, double x) {
    if (xi < 0.0) throw parameter_error("wave_parent_sin: requires xi >= 0");
    const double lo = x - a * xi, hi = x + a * xi;
    switch (v0.kind) {
        case VelocityProfile::Kind::zero:
            return 0.0;
        case VelocityProfile::Kind::neg_derivative_of_p0:
            throw config_error("wave_parent_sin: resolve v0 against p0 first");
        case VelocityProfile::Kind::gaussian_derivative:
            // integral of -G' over the window
            return (detail::gauss_pdf(lo, v0.sigma) - detail::gauss_pdf(hi, v0.sigma)) / (2.0 * a);
        case VelocityProfile::Kind::box_spikes: {
            auto spike_weight = [&](double p) {
                if (p == lo || p == hi) {
                    diag::counters().endpoint_half_weights++;
                    return 0.5;
                }
                return (p > lo && p < hi) ? 1.0 : 0.0;
            };
            return (spike_weight(v0.eps) - spike_weight(-v0.eps)) / (4.0 * a * v0.eps);
        }
        case VelocityProfile::Kind::custom: {
            const double c_lo = std::max(lo, v0.lo), c_hi = std::min(hi, v0.hi);
            if (!(c_hi > c_lo)) return 0.0;
            return integrate(v0.profile, c_lo, c_hi, 1e-12, 1e-10).value / (2.0 * a);
        }
    }
    return 0.0;
}

struct SolveOptions {
    double abs_tol = 1e-7;   // quadrature tolerance per grid point
    double tail_tol = 1e-9;  // subordination-density tail mass cut
    int threads = 0;         // 0: hardware concurrency capped by MEMKERNEL_THREADS
};

namespace detail {

// Outer subordination quadrature: the first panel is integrated under xi = u^2,
// which regularizes the 1/sqrt(xi) endpoint of delta-profile parents.
template <class Density, class Parent>
inline double subordination_integral(const Density& density, const Parent& parent, double xi_max,
                                     double abs_tol) {
    const double xi_split = std::min(1.0, 0.25 * xi_max);
    auto h = [&](double xi) { return density(xi) * parent(xi); };
    auto g = [&](double u) { return 2.0 * u * h(u * u); };
    const QuadResult q1 = integrate(g, 0.0, std::sqrt(xi_split), 0.5 * abs_tol);
    const QuadResult q2 = integrate(h, xi_split, xi_max, 0.5 * abs_tol);
    if (!q1.converged || !q2.converged)
        throw accuracy_error("subordination quadrature did not reach the requested tolerance",
                             q1.error_estimate + q2.error_estimate);
    return q1.value + q2.value;
}

}  // namespace detail

/// q(x, t) of the generalized Fokker-Planck equation at a single point.
inline double gfpe_value(const MemoryKernel& kernel, const InitialCondition& ic,
                         const TransportParams& tp, double x, double t,
                         const SolveOptions& opts = {}) {
    if (!(t > 0.0)) throw parameter_error("gfpe_value: requires t > 0");
    if (kernel.family != Equation::gfpe) throw parameter_error("gfpe_value: needs a gfpe kernel");
    tp.validate(Equation::gfpe);
    if (kernel.degenerate) return diffusion_parent(ic, tp, t, x);
    auto density = make_density(kernel, DensityVariant::f_sM);
    const double xi_max = density_tail_bound(density, t, opts.tail_tol);
    auto f = [&](double xi) { return density(xi, t); };
    auto parent = [&](double xi) { return diffusion_parent(ic, tp, xi, x); };
    return detail::subordination_integral(f, parent, xi_max, opts.abs_tol);
}

/// q(x, t) sampled on a grid; grid points are independent and solved in parallel.
inline SolutionField solve_gfpe(const MemoryKernel& kernel, const InitialCondition& ic,
                                const TransportParams& tp, std::vector<double> grid, double t,
                                const SolveOptions& opts = {}) {
    if (!(t > 0.0)) throw parameter_error("solve_gfpe: requires t > 0");
    if (kernel.family != Equation::gfpe) throw parameter_error("solve_gfpe: needs a gfpe kernel");
    tp.validate(Equation::gfpe);
    SolutionField out;
    out.grid = std::move(grid);
    out.values.assign(out.grid.size(), 0.0);
    out.meta = {kernel.id, ic.describe(), "-", tp, t, Equation::gfpe};

    if (kernel.degenerate) {
        for (std::size_t i = 0; i < out.grid.size(); ++i)
            out.values[i] = diffusion_parent(ic, tp, t, out.grid[i]);
        return out;
    }
    CachedDensity density(make_density(kernel, DensityVariant::f_sM), t);
    const double xi_max = density_tail_bound(density.density(), t, opts.tail_tol);
    detail::parallel_for(out.grid.size(), detail::resolve_threads(opts.threads), [&](std::size_t i) {
        auto parent = [&](double xi) { return diffusion_parent(ic, tp, xi, out.grid[i]); };
        out.values[i] = detail::subordination_integral(density, parent, xi_max, opts.abs_tol);
    });
    return out;
}

/// p(x, t) of the generalized diffusion-wave equation at a single point:
/// F_half against the cosine parent plus, for v0 != 0, F_mixed against the sine
/// parent.  The wave limit k-hat = 1 degenerates to the d'Alembert form.
inline double gdwe_value(const MemoryKernel& kernel, const InitialCondition& p0,
                         const VelocityProfile& v0_in, const TransportParams& tp, double x,
                         double t, const SolveOptions& opts = {}) {
    if (!(t > 0.0)) throw parameter_error("gdwe_value: requires t > 0");
    if (kernel.family != Equation::gdwe) throw parameter_error("gdwe_value: needs a gdwe kernel");
    tp.validate(Equation::gdwe);
    const VelocityProfile v0 = v0_in.resolve(p0);
    const double a = tp.a;
    if (kernel.degenerate) {
        const double cos_term = p0.kind == InitialCondition::Kind::delta
                                    ? throw config_error(
                                          "gdwe_value: delta p0 at the wave limit is a pair of "
                                          "delta pulses; no pointwise value")
                                    : wave_parent_cos(p0, a, t, x);
        return cos_term + wave_parent_sin(v0, a, t, x);
    }

    double term1;
    if (p0.kind == InitialCondition::Kind::delta) {
        // cos parent of a delta pair collapses the quadrature: p = F_half(|x|/a, t)/(2a)
        term1 = subordination_density(kernel, DensityVariant::F_half, std::abs(x) / a, t) /
                (2.0 * a);
    } else {
        auto density = make_density(kernel, DensityVariant::F_half);
        const double xi_max = density_tail_bound(density, t, opts.tail_tol);
        auto f = [&](double xi) { return density(xi, t); };
        auto parent = [&](double xi) { return wave_parent_cos(p0, a, xi, x); };
        term1 = detail::subordination_integral(f, parent, xi_max, opts.abs_tol);
    }
    if (v0.is_zero()) return term1;

    auto mixed = make_density(kernel, DensityVariant::F_mixed);
    const double xi_max = density_tail_bound(mixed, t, opts.tail_tol);
    auto f = [&](double xi) { return mixed(xi, t); };
    auto parent = [&](double xi) { return wave_parent_sin(v0, a, xi, x); };
    return term1 + detail::subordination_integral(f, parent, xi_max, opts.abs_tol);
}

inline SolutionField solve_gdwe(const MemoryKernel& kernel, const InitialCondition& p0,
                                const VelocityProfile& v0_in, const TransportParams& tp,
                                std::vector<double> grid, double t, const SolveOptions& opts = {}) {
    if (!(t > 0.0)) throw parameter_error("solve_gdwe: requires t > 0");
    if (kernel.family != Equation::gdwe) throw parameter_error("solve_gdwe: needs a gdwe kernel");
    tp.validate(Equation::gdwe);
    const VelocityProfile v0 = v0_in.resolve(p0);
    const double a = tp.a;
    SolutionField out;
    out.grid = std::move(grid);
    out.values.assign(out.grid.size(), 0.0);
    out.meta = {kernel.id, p0.describe(), v0.describe(), tp, t, Equation::gdwe};

    if (kernel.degenerate) {
        for (std::size_t i = 0; i < out.grid.size(); ++i) {
            const double x = out.grid[i];
            out.values[i] = wave_parent_cos(p0, a, t, x) + wave_parent_sin(v0, a, t, x);
        }
        return out;
    }

    const bool delta_p0 = p0.kind == InitialCondition::Kind::delta;
    CachedDensity half(make_density(kernel, DensityVariant::F_half), t);
    CachedDensity mixed(make_density(kernel, DensityVariant::F_mixed), t);
    const double xi_half =
        delta_p0 ? 0.0 : density_tail_bound(half.density(), t, opts.tail_tol);
    const double xi_mixed =
        v0.is_zero() ? 0.0 : density_tail_bound(mixed.density(), t, opts.tail_tol);

    detail::parallel_for(out.grid.size(), detail::resolve_threads(opts.threads), [&](std::size_t i) {
        const double x = out.grid[i];
        double v;
        if (delta_p0) {
            v = half.density().value(std::abs(x) / a, t) / (2.0 * a);
        } else {
            auto parent = [&](double xi) { return wave_parent_cos(p0, a, xi, x); };
            v = detail::subordination_integral(half, parent, xi_half, opts.abs_tol);
        }
        if (!v0.is_zero()) {
            auto parent = [&](double xi) { return wave_parent_sin(v0, a, xi, x); };
            v += detail::subordination_integral(mixed, parent, xi_mixed, opts.abs_tol);
        }
        out.values[i] = v;
    });
    return out;
}

/// Gaussian profile expanded around x = 0: c_{2m} = (-1)^m / (sqrt(2 pi) sigma^{2m+1} 2^m m!).
inline std::vector<double> gaussian_series_coefficients(double sigma, int count) {
    if (!(sigma > 0.0) || count < 1) throw parameter_error("gaussian_series_coefficients");
    std::vector<double> c(count, 0.0);
    double cur = 1.0 / (std::sqrt(2.0 * 3.14159265358979323846) * sigma);
    for (int m = 0; 2 * m < count; ++m) {
        c[2 * m] = cur;
        cur *= -1.0 / (2.0 * sigma * sigma * (m + 1.0));
    }
    return c;
}

/// Short-time series solution sum c_n H_n(beta; x, a, t) over fractional heat
/// polynomials; a cross-check of solve_gdwe near t = 0.  For the gaussian profile
/// at beta = 1/2 the series converges for t <= sigma_x^2 / (2 a^2), its radius;
/// alternating tails are Euler-accelerated, and term growth past the horizon
/// raises an accuracy error.
inline double solve_dwe_series(double beta, const std::vector<double>& coeffs, double a, double x,
                               double t, int n_terms = 0) {
    if (!(t >= 0.0)) throw parameter_error("solve_dwe_series: requires t >= 0");
    const int n_max = n_terms > 0 ? std::min<int>(n_terms, coeffs.size()) : coeffs.size();
    if (t == 0.0) {
        double s = 0.0, xn = 1.0;
        for (int n = 0; n < n_max; ++n, xn *= x) s += coeffs[n] * xn;
        return s;
    }
    std::vector<double> partials;  // partial sums at nonzero terms
    partials.reserve(n_max);
    double sum = 0.0;
    double prev_mag = 0.0;
    int growth_streak = 0;
    for (int n = 0; n < n_max; ++n) {
        if (coeffs[n] == 0.0) continue;
        const double term = coeffs[n] * fractional_heat_polynomial(beta, n, x, a, t);
        sum += term;
        partials.push_back(sum);
        const double mag = std::abs(term);
        if (n >= 8 && mag > prev_mag && mag > 1e-12 * std::abs(sum)) {
            if (++growth_streak >= 4)
                throw accuracy_error(
                    "solve_dwe_series: terms grow, t is past the convergence horizon");
        } else {
            growth_streak = 0;
        }
        prev_mag = mag;
    }
    // Euler acceleration when the tail alternates (conditionally convergent edge)
    const std::size_t m = partials.size();
    if (m >= 8) {
        bool alternating = true;
        for (std::size_t i = m - 6; i + 1 < m; ++i) {
            const double d1 = partials[i] - (i > 0 ? partials[i - 1] : 0.0);
            const double d2 = partials[i + 1] - partials[i];
            if (d1 * d2 >= 0.0) {
                alternating = false;
                break;
            }
        }
        if (alternating) {
            std::vector<double> acc(partials.end() - 7, partials.end());
            while (acc.size() > 1) {
                for (std::size_t i = 0; i + 1 < acc.size(); ++i) acc[i] = 0.5 * (acc[i] + acc[i + 1]);
                acc.pop_back();
            }
            return acc[0];
        }
    }
    return sum;
}

}  // namespace memkernel
