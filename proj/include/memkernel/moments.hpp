#pragma once

#include <cmath>
#include <string>

#include "memkernel/errors.hpp"
#include "memkernel/gamma.hpp"
#include "memkernel/kernels.hpp"
#include "memkernel/laplace.hpp"
#include "memkernel/operators.hpp"

namespace memkernel {

/// Fourier-at-zero data of the initial profile: everything the moment formulas
/// need.  C = -q0''(kappa)|_0, i.e. the second moment of the profile.
struct ICMomentSpec {
    double q0_at_0 = 1.0;
    double d1 = 0.0;
    double C = 0.0;

    void validate() const {
        if (q0_at_0 != 1.0) throw parameter_error("ICMomentSpec: density profiles have q0(0) = 1");
        if (d1 != 0.0) throw parameter_error("ICMomentSpec: real symmetric moments need d1 = 0");
        if (C < 0.0) throw parameter_error("ICMomentSpec: C must be >= 0");
    }

    static ICMomentSpec from_ic(const InitialCondition& ic) {
        ICMomentSpec s;
        switch (ic.kind) {
            case InitialCondition::Kind::delta: s.C = 0.0; break;
            case InitialCondition::Kind::box: s.C = ic.eps * ic.eps / 3.0; break;
            case InitialCondition::Kind::gaussian: s.C = ic.sigma_x * ic.sigma_x; break;
            case InitialCondition::Kind::custom: {
                const double mass = integrate(ic.profile, ic.lo, ic.hi, 1e-11).value;
                const double m1 =
                    integrate([&](double x) { return x * ic.profile(x); }, ic.lo, ic.hi, 1e-11).value;
                if (std::abs(mass - 1.0) > 1e-8)
                    throw parameter_error("ICMomentSpec: custom profile does not integrate to 1");
                if (std::abs(m1) > 1e-8)
                    throw parameter_error("ICMomentSpec: custom profile must have zero mean");
                s.C = integrate([&](double x) { return x * x * ic.profile(x); }, ic.lo, ic.hi, 1e-11)
                          .value;
                break;
            }
        }
        return s;
    }
};

/// Fourier-at-zero data of the velocity profile.  mean_rate = -i v0~'(0): the
/// mean grows as mean_rate * t; d2 = -v0~''(0).
struct VelocityMomentSpec {
    double v_at_0 = 0.0;
    double mean_rate = 0.0;
    double d2 = 0.0;

    static VelocityMomentSpec from_v0(const VelocityProfile& v0) {
        VelocityMomentSpec s;
        switch (v0.kind) {
            case VelocityProfile::Kind::zero:
                break;
            case VelocityProfile::Kind::neg_derivative_of_p0:
            case VelocityProfile::Kind::gaussian_derivative:
            case VelocityProfile::Kind::box_spikes:
                s.mean_rate = 1.0;  // v0 = -p0' has v~(0) = 0, -i v~'(0) = 1, v~''(0) = 0
                break;
            case VelocityProfile::Kind::custom:
                s.v_at_0 = integrate(v0.profile, v0.lo, v0.hi, 1e-11).value;
                s.mean_rate =
                    integrate([&](double x) { return x * v0.profile(x); }, v0.lo, v0.hi, 1e-11).value;
                s.d2 = integrate([&](double x) { return x * x * v0.profile(x); }, v0.lo, v0.hi, 1e-11)
                           .value;
                break;
        }
        return s;
    }
};

enum class MomentMethod { closed_form, numeric_ilt, tauberian, empirical };

struct MomentReport {
    double mean = 0.0;
    double second_moment = 0.0;
    double msd = 0.0;
    MomentMethod method = MomentMethod::closed_form;
};

namespace detail {

inline double moment_ilt(const MemoryKernel& k, int s_power, int m_power, double t) {
    auto img = make_image(
        [&k, s_power, m_power](complex_t s) {
            complex_t denom = std::pow(s, s_power);
            const complex_t m = k.image(s);
            for (int i = 0; i < m_power; ++i) denom *= m;
            return 1.0 / denom;
        },
        k.laplace_image.branch_note, k.laplace_image.singularities);
    return talbot_real(img, t, 48);
}

inline double gdwe_moment_ilt(const MemoryKernel& k, int s_power, double t) {
    auto img = make_image(
        [&k, s_power](complex_t s) { return 1.0 / (std::pow(s, s_power) * k.image(s)); },
        k.laplace_image.branch_note, k.laplace_image.singularities);
    return talbot_real(img, t, 48);
}

inline double checked_msd(double second, double mean) {
    const double msd = second - mean * mean;
    if (msd < -1e-8) throw integrity_error("negative mean square displacement");
    return msd < 0.0 ? 0.0 : msd;
}

}  // namespace detail

/// Mean of the GFPE solution: mu * L^{-1}[s^{-2} M-hat^{-1}(s); t] for density
/// profiles; closed form mu t^alpha / Gamma(1+alpha) for power-law kernels.
inline double mean_gfpe(const MemoryKernel& kernel, const ICMomentSpec& spec, double mu, double t) {
    if (!(t > 0.0)) throw parameter_error("mean_gfpe: requires t > 0");
    if (kernel.family != Equation::gfpe) throw parameter_error("mean_gfpe: needs a gfpe kernel");
    spec.validate();
    if (mu == 0.0) return 0.0;
    if (kernel.kind == KernelKind::power_law) {
        const double alpha = kernel.exponent;
        return mu * std::pow(t, alpha) / gamma_fn(1.0 + alpha);
    }
    return mu * spec.q0_at_0 * detail::moment_ilt(kernel, 2, 1, t);
}

inline MomentReport msd_gfpe(const MemoryKernel& kernel, const ICMomentSpec& spec, double B,
                             double mu, double t) {
    if (!(t > 0.0)) throw parameter_error("msd_gfpe: requires t > 0");
    if (kernel.family != Equation::gfpe) throw parameter_error("msd_gfpe: needs a gfpe kernel");
    spec.validate();
    MomentReport r;
    if (kernel.kind == KernelKind::power_law) {
        const double alpha = kernel.exponent;
        r.mean = mu * std::pow(t, alpha) / gamma_fn(1.0 + alpha);
        r.second_moment = 2.0 * mu * mu * std::pow(t, 2.0 * alpha) / gamma_fn(1.0 + 2.0 * alpha) +
                          2.0 * B * std::pow(t, alpha) / gamma_fn(1.0 + alpha) + spec.C;
        r.method = MomentMethod::closed_form;
    } else {
        const double i1 = detail::moment_ilt(kernel, 2, 1, t);
        r.mean = mu * i1;
        r.second_moment = 2.0 * B * i1 + spec.C;
        if (mu != 0.0) r.second_moment += 2.0 * mu * mu * detail::moment_ilt(kernel, 3, 2, t);
        r.method = MomentMethod::numeric_ilt;
    }
    r.msd = detail::checked_msd(r.second_moment, r.mean);
    return r;
}

/// MSD of the GDWE solution, both p0 and v0 contributions of the second moment:
///   <x^2> = 2 a^2 L^{-1}[s^{-3} k^{-1}] + C + 2 a^2 v(0) L^{-1}[s^{-4} k^{-1}] + t * d2,
/// with mean = mean_rate * t.
inline MomentReport msd_gdwe(const MemoryKernel& kernel, const ICMomentSpec& p0_spec,
                             const VelocityMomentSpec& v0_spec, double a, double t) {
    if (!(t > 0.0)) throw parameter_error("msd_gdwe: requires t > 0");
    if (kernel.family != Equation::gdwe) throw parameter_error("msd_gdwe: needs a gdwe kernel");
    p0_spec.validate();
    MomentReport r;
    r.mean = v0_spec.mean_rate * t;
    if (kernel.kind == KernelKind::power_law) {
        const double beta = kernel.exponent;
        r.second_moment = 2.0 * a * a * std::pow(t, 2.0 * beta) / gamma_fn(1.0 + 2.0 * beta) +
                          p0_spec.C + t * v0_spec.d2;
        if (v0_spec.v_at_0 != 0.0)
            r.second_moment += 2.0 * a * a * v0_spec.v_at_0 * std::pow(t, 2.0 * beta + 1.0) /
                               gamma_fn(2.0 + 2.0 * beta);
        r.method = MomentMethod::closed_form;
    } else {
        r.second_moment = 2.0 * a * a * detail::gdwe_moment_ilt(kernel, 3, t) + p0_spec.C +
                          t * v0_spec.d2;
        if (v0_spec.v_at_0 != 0.0)
            r.second_moment += 2.0 * a * a * v0_spec.v_at_0 * detail::gdwe_moment_ilt(kernel, 4, t);
        r.method = MomentMethod::numeric_ilt;
    }
    r.msd = detail::checked_msd(r.second_moment, r.mean);
    return r;
}

/// Tauberian long-time leading term of the MSD for the registered kernel families.
inline double msd_asymptotic(const MemoryKernel& kernel, Equation equation,
                             const TransportParams& tp, double C, double t) {
    if (!(t >= 100.0)) throw parameter_error("msd_asymptotic: asymptotic regime needs t >= 100");
    const double lt = std::log(t);
    if (equation == Equation::gfpe && kernel.family == Equation::gfpe) {
        if (kernel.kind == KernelKind::power_law) {
            const double alpha = kernel.exponent;
            const double bracket =
                2.0 / gamma_fn(1.0 + 2.0 * alpha) - 1.0 / std::pow(gamma_fn(1.0 + alpha), 2);
            return tp.mu * tp.mu * std::pow(t, 2.0 * alpha) * bracket +
                   2.0 * tp.B * std::pow(t, alpha) / gamma_fn(1.0 + alpha) + C;
        }
        if (kernel.kind == KernelKind::distributed_order)
            return tp.mu != 0.0 ? tp.mu * tp.mu * lt * lt + 2.0 * tp.B * lt + C : 2.0 * tp.B * lt;
    }
    if (equation == Equation::gdwe && kernel.family == Equation::gdwe) {
        if (kernel.kind == KernelKind::power_law) {
            const double beta = kernel.exponent;
            return 2.0 * tp.a * tp.a * std::pow(t, 2.0 * beta) / gamma_fn(1.0 + 2.0 * beta) + C;
        }
        if (kernel.id == "gdwe_distributed") return 2.0 * tp.a * tp.a * t * lt;
        if (kernel.id == "gdwe_distributed_sq") return 2.0 * tp.a * tp.a * lt * lt;
    }
    throw config_error("msd_asymptotic: no registered asymptotic for kernel '" + kernel.id + "'");
}

/// Trapezoid integral of x^m * field over the grid.  Nonvanishing boundary
/// values indicate a truncated domain; logged as a truncation warning.
inline double empirical_moments(const SolutionField& field, int m) {
    if (m != 1 && m != 2) throw parameter_error("empirical_moments: m must be 1 or 2");
    if (field.grid.size() < 2) throw parameter_error("empirical_moments: field too small");
    if (std::abs(field.values.front()) > 1e-10 || std::abs(field.values.back()) > 1e-10)
        diag::counters().truncation_warnings++;
    double acc = 0.0;
    for (std::size_t i = 1; i < field.grid.size(); ++i) {
        const double x0 = field.grid[i - 1], x1 = field.grid[i];
        const double f0 = field.values[i - 1] * std::pow(x0, m);
        const double f1 = field.values[i] * std::pow(x1, m);
        acc += 0.5 * (f0 + f1) * (x1 - x0);
    }
    return acc;
}

/// Trapezoid mass of the field (normalization checks).
inline double field_mass(const SolutionField& field) {
    double acc = 0.0;
    for (std::size_t i = 1; i < field.grid.size(); ++i)
        acc += 0.5 * (field.values[i - 1] + field.values[i]) * (field.grid[i] - field.grid[i - 1]);
    return acc;
}

}  // namespace memkernel
