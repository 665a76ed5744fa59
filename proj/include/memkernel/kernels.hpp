#pragma once

#include <cmath>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "memkernel/errors.hpp"
#include "memkernel/gamma.hpp"
#include "memkernel/laplace.hpp"
#include "memkernel/quadrature.hpp"
#include "memkernel/special.hpp"

namespace memkernel {

enum class Equation { gfpe, gdwe };
enum class KernelKind { power_law, distributed_order, custom };
enum class DensityVariant { f_sM, F_half, F_mixed };

/// A memory kernel, held as its Laplace image: M-hat(s) for the generalized
/// Fokker-Planck family, k-hat(s) for the generalized diffusion-wave family.
struct MemoryKernel {
    KernelKind kind = KernelKind::custom;
    Equation family = Equation::gfpe;
    double exponent = 0.0;  // alpha or beta where applicable
    LaplaceImage laplace_image;
    std::function<complex_t(complex_t)> half_image;  // k-hat^{1/2}, gdwe kernels only
    bool stieltjes_claimed = false;  // M-hat (gfpe) resp. k-hat^{1/2} (gdwe) is Stieltjes
    bool cmf_claimed = false;        // k-hat is completely monotone (gdwe)
    bool degenerate = false;         // image identically 1: densities collapse to delta(t - xi)
    std::string id;

    complex_t image(complex_t s) const { return laplace_image.eval(s); }
    complex_t half(complex_t s) const {
        if (!half_image) throw config_error("MemoryKernel: k-hat^{1/2} undefined for this kernel");
        return half_image(s);
    }
};

namespace detail {

// (s-1)/(s ln s) with the removable point at s = 1 evaluated through the
// series D(w) = ln(1+w)/w = 1 - w/2 + w^2/3 - ... , w = s - 1.
inline complex_t distributed_order_image(complex_t s) {
    const complex_t w = s - 1.0;
    if (std::abs(w) < 1e-3) {
        const complex_t D =
            1.0 + w * (-1.0 / 2.0 +
                       w * (1.0 / 3.0 + w * (-1.0 / 4.0 + w * (1.0 / 5.0 + w * (-1.0 / 6.0)))));
        return 1.0 / (s * D);
    }
    return w / (s * std::log(s));
}

inline complex_t principal_pow(complex_t s, double p) { return std::exp(p * std::log(s)); }

}  // namespace detail

inline MemoryKernel make_power_law_kernel(double alpha) {
    if (!(alpha > 0.0) || !(alpha > 0.0 && alpha <= 1.0))
        throw parameter_error("power_law kernel: alpha must be in (0,1]");
    MemoryKernel k;
    k.kind = KernelKind::power_law;
    k.family = Equation::gfpe;
    k.exponent = alpha;
    k.degenerate = (alpha == 1.0);
    k.stieltjes_claimed = true;
    k.laplace_image = make_image(
        [alpha](complex_t s) { return detail::principal_pow(s, alpha - 1.0); },
        "principal power, cut on (-inf,0]",
        alpha < 1.0 ? std::vector<SingularPoint>{{0.0, SingularityKind::branch_point}}
                    : std::vector<SingularPoint>{});
    k.id = "power_law:" + std::to_string(alpha);
    return k;
}

inline MemoryKernel make_distributed_order_kernel() {
    MemoryKernel k;
    k.kind = KernelKind::distributed_order;
    k.family = Equation::gfpe;
    k.stieltjes_claimed = true;
    k.laplace_image = make_image(detail::distributed_order_image,
                                 "principal log, cut on (-inf,0]",
                                 {{0.0, SingularityKind::branch_point},
                                  {1.0, SingularityKind::removable}});
    k.id = "distributed_order";
    return k;
}

/// k-hat(s) = s^{2 beta - 2}; beta = 1/2 is the diffusion limit, beta = 1 the wave limit.
inline MemoryKernel make_gdwe_power_kernel(double beta) {
    if (!(beta >= 0.5) || !(beta <= 1.0))
        throw parameter_error("gdwe_power kernel: beta must be in [1/2,1]");
    MemoryKernel k;
    k.kind = KernelKind::power_law;
    k.family = Equation::gdwe;
    k.exponent = beta;
    k.degenerate = (beta == 1.0);
    k.stieltjes_claimed = true;
    k.cmf_claimed = true;
    k.laplace_image = make_image(
        [beta](complex_t s) { return detail::principal_pow(s, 2.0 * beta - 2.0); },
        "principal power, cut on (-inf,0]",
        beta < 1.0 ? std::vector<SingularPoint>{{0.0, SingularityKind::branch_point}}
                   : std::vector<SingularPoint>{});
    k.half_image = [beta](complex_t s) { return detail::principal_pow(s, beta - 1.0); };
    k.id = "gdwe_power:" + std::to_string(beta);
    return k;
}

/// k-hat(s) = (s-1)/(s ln s). Whether k-hat^{1/2} is Stieltjes is not settled;
/// non-negativity of F_half is reported empirically, never asserted.
inline MemoryKernel make_gdwe_distributed_kernel() {
    MemoryKernel k;
    k.kind = KernelKind::distributed_order;
    k.family = Equation::gdwe;
    k.stieltjes_claimed = false;
    k.cmf_claimed = true;  // k-hat itself is Stieltjes, hence completely monotone
    k.laplace_image = make_image(detail::distributed_order_image,
                                 "principal log, cut on (-inf,0]",
                                 {{0.0, SingularityKind::branch_point},
                                  {1.0, SingularityKind::removable}});
    k.half_image = [](complex_t s) { return std::sqrt(detail::distributed_order_image(s)); };
    k.id = "gdwe_distributed";
    return k;
}

/// k-hat(s) = (s-1)^2/(s ln s)^2, so k-hat^{1/2} is the distributed-order image itself.
inline MemoryKernel make_gdwe_distributed_sq_kernel() {
    MemoryKernel k;
    k.kind = KernelKind::distributed_order;
    k.family = Equation::gdwe;
    k.stieltjes_claimed = true;
    k.cmf_claimed = true;
    k.laplace_image = make_image(
        [](complex_t s) {
            const complex_t m = detail::distributed_order_image(s);
            return m * m;
        },
        "principal log, cut on (-inf,0]",
        {{0.0, SingularityKind::branch_point}, {1.0, SingularityKind::removable}});
    k.half_image = detail::distributed_order_image;
    k.id = "gdwe_distributed_sq";
    return k;
}

inline MemoryKernel make_custom_kernel(Equation family, LaplaceImage image,
                                       std::function<complex_t(complex_t)> half = {},
                                       bool stieltjes_claimed = false, bool cmf_claimed = false,
                                       std::string id = "custom") {
    MemoryKernel k;
    k.kind = KernelKind::custom;
    k.family = family;
    k.laplace_image = std::move(image);
    k.half_image = std::move(half);
    k.stieltjes_claimed = stieltjes_claimed;
    k.cmf_claimed = cmf_claimed;
    k.id = std::move(id);
    return k;
}

/// Resolve a kernel registry id: "power_law:<alpha>", "distributed_order",
/// "gdwe_power:<beta>", "gdwe_distributed", "gdwe_distributed_sq".
inline MemoryKernel kernel_from_id(const std::string& id) {
    auto num_after = [&](const std::string& prefix) {
        try {
            return std::stod(id.substr(prefix.size()));
        } catch (const std::exception&) {
            throw config_error("kernel id '" + id + "': malformed numeric parameter");
        }
    };
    if (id.rfind("power_law:", 0) == 0) return make_power_law_kernel(num_after("power_law:"));
    if (id == "distributed_order") return make_distributed_order_kernel();
    if (id.rfind("gdwe_power:", 0) == 0) return make_gdwe_power_kernel(num_after("gdwe_power:"));
    if (id == "gdwe_distributed") return make_gdwe_distributed_kernel();
    if (id == "gdwe_distributed_sq") return make_gdwe_distributed_sq_kernel();
    throw config_error("unknown kernel id '" + id + "'");
}

inline std::vector<std::string> kernel_registry_ids() {
    return {"power_law:<alpha>", "distributed_order", "gdwe_power:<beta>", "gdwe_distributed",
            "gdwe_distributed_sq"};
}

namespace detail {

/// Clamp tiny negative inversion noise to zero, reject genuine negativity.
inline double nonneg_guard(double v, bool guaranteed) {
    if (v >= 0.0 || !guaranteed) return v;
    if (v >= -1e-8) {
        diag::counters().clamped_density_values++;
        return 0.0;
    }
    throw integrity_error("subordination density below -1e-8 where non-negativity is guaranteed");
}

// Wright-type series f(theta; xi, t) = t^{-theta} sum (-w)^n / (n! Gamma(1-theta(n+1))),
// w = xi t^{-theta}; converges for all w, cancellation-free for w < ~1.
inline double wright_f_series(double theta, double w, double t) {
    double sum = 0.0, wn = 1.0, nfact = 1.0;
    int tiny_streak = 0;
    for (int n = 0; n < 220; ++n) {
        if (n > 0) {
            wn *= -w;
            nfact *= n;
        }
        const double term = wn * reciprocal_gamma(1.0 - theta * (n + 1.0)) / nfact;
        sum += term;
        // 1/Gamma vanishes at negative integers, so single tiny terms do not
        // signal convergence; require a streak
        tiny_streak = (std::abs(term) < 1e-18 * std::abs(sum)) ? tiny_streak + 1 : 0;
        if (tiny_streak >= 3 && n > 4) break;
    }
    return std::pow(t, -theta) * sum;
}

// Same for the mixed kernel image s^{2b-2} e^{-xi s^b}:
//   t^{1-2b} sum (-w)^n / (n! Gamma(2-2b-n b)), w = xi t^{-b}.
inline double wright_mixed_series(double b, double w, double t) {
    double sum = 0.0, wn = 1.0, nfact = 1.0;
    int tiny_streak = 0;
    for (int n = 0; n < 220; ++n) {
        if (n > 0) {
            wn *= -w;
            nfact *= n;
        }
        const double term = wn * reciprocal_gamma(2.0 - 2.0 * b - n * b) / nfact;
        sum += term;
        tiny_streak = (std::abs(term) < 1e-18 * std::abs(sum)) ? tiny_streak + 1 : 0;
        if (tiny_streak >= 3 && n > 4) break;
    }
    return std::pow(t, 1.0 - 2.0 * b) * sum;
}

constexpr double wright_series_limit = 0.7;  // switch to the stable-scaling route above this w

}  // namespace detail

/// Density inversions default to M = 24 Talbot nodes: the roundoff floor of the
/// fixed-Talbot rule grows like e^{2M/5}, and M = 24 keeps it near 1e-12 of the
/// value while the rule's own convergence still exceeds double precision.
inline InversionConfig density_inversion_defaults() {
    InversionConfig cfg;
    cfg.talbot_nodes = 24;
    return cfg;
}

/// Evaluator of the subordination densities
///   f_sM:    L^{-1}[ M-hat(s) e^{-xi s M-hat(s)}; t ]
///   F_half:  L^{-1}[ k-hat^{1/2}(s) e^{-xi s k-hat^{1/2}(s)}; t ]
///   F_mixed: L^{-1}[ k-hat(s) e^{-xi s k-hat^{1/2}(s)}; t ]
struct SubordinationDensity {
    MemoryKernel source_kernel;
    DensityVariant variant = DensityVariant::f_sM;
    InversionConfig inversion_config = density_inversion_defaults();

    bool nonneg_guaranteed() const {
        return variant == DensityVariant::F_mixed ? source_kernel.cmf_claimed
                                                  : source_kernel.stieltjes_claimed;
    }

    /// The xi-parametrized Laplace image of this density.
    LaplaceImage image_at(double xi) const {
        const MemoryKernel& k = source_kernel;
        std::function<complex_t(complex_t)> f;
        switch (variant) {
            case DensityVariant::f_sM:
                f = [k, xi](complex_t s) {
                    const complex_t m = k.image(s);
                    return m * std::exp(-xi * s * m);
                };
                break;
            case DensityVariant::F_half:
                f = [k, xi](complex_t s) {
                    const complex_t h = k.half(s);
                    return h * std::exp(-xi * s * h);
                };
                break;
            case DensityVariant::F_mixed:
                f = [k, xi](complex_t s) { return k.image(s) * std::exp(-xi * s * k.half(s)); };
                break;
        }
        return make_image(std::move(f), k.laplace_image.branch_note, k.laplace_image.singularities);
    }

    double value(double xi, double t) const {
        if (xi < 0.0) throw parameter_error("subordination density: requires xi >= 0");
        if (!(t > 0.0)) throw parameter_error("subordination density: requires t > 0");
        if (source_kernel.degenerate)
            throw config_error("subordination density: degenerate kernel, density is delta(t - xi)");
        const double v = source_kernel.kind == KernelKind::power_law
                             ? power_law_value(xi, t)
                             : detail::invert_density_image(image_at(xi), t,
                                                            inversion_config.talbot_nodes);
        return detail::nonneg_guard(v, nonneg_guaranteed());
    }

    /// Power-law kernels collapse to Wright functions of w = xi t^{-theta}: summed
    /// directly for small w, or routed through the one-argument stable density at
    /// sigma = w^{-1/theta} (always a benign inversion) beyond.  This avoids the
    /// Talbot contour blow-up of e^{-xi s M(s)} at large xi entirely.
    double power_law_value(double xi, double t) const {
        const double theta = source_kernel.exponent;
        if (variant == DensityVariant::F_mixed) {
            const double w = xi * std::pow(t, -theta);
            if (w < detail::wright_series_limit) return detail::wright_mixed_series(theta, w, t);
            const double lam = std::pow(xi, -1.0 / theta);
            auto psi = make_image([theta](complex_t s) {
                return detail::principal_pow(s, 2.0 * theta - 2.0) *
                       std::exp(-detail::principal_pow(s, theta));
            });
            return std::pow(lam, 2.0 * theta - 1.0) *
                   detail::invert_density_image(psi, lam * t, 32);
        }
        // f_sM and F_half are both f(theta; xi, t)
        const double w = xi * std::pow(t, -theta);
        if (w < detail::wright_series_limit) return detail::wright_f_series(theta, w, t);
        return (t / (theta * xi)) * levy_stable_two_arg(theta, xi, t);
    }

    double operator()(double xi, double t) const { return value(xi, t); }

    /// Integral of the density over xi in [0, inf): 1 for f_sM and F_half,
    /// L^{-1}[k-hat^{1/2}(s)/s; t] for F_mixed.
    double total_mass(double t) const {
        if (variant != DensityVariant::F_mixed) return 1.0;
        if (source_kernel.degenerate) return 1.0;
        const MemoryKernel& k = source_kernel;
        auto img = make_image([k](complex_t s) { return k.half(s) / s; },
                              k.laplace_image.branch_note, k.laplace_image.singularities);
        return detail::talbot_real(img, t, inversion_config.talbot_nodes);
    }

    /// First moment in xi, from the Laplace side.
    double first_moment(double t) const {
        if (source_kernel.degenerate) return t;
        const MemoryKernel& k = source_kernel;
        std::function<complex_t(complex_t)> f;
        switch (variant) {
            case DensityVariant::f_sM:
                f = [k](complex_t s) { return 1.0 / (s * s * k.image(s)); };
                break;
            case DensityVariant::F_half:
                f = [k](complex_t s) { return 1.0 / (s * s * k.half(s)); };
                break;
            case DensityVariant::F_mixed:
                return t;  // k-hat/(s k-hat^{1/2})^2 = 1/s^2
        }
        auto img = make_image(std::move(f), k.laplace_image.branch_note,
                              k.laplace_image.singularities);
        return detail::talbot_real(img, t, inversion_config.talbot_nodes);
    }
};

inline SubordinationDensity make_density(MemoryKernel kernel, DensityVariant variant,
                                         InversionConfig cfg = density_inversion_defaults()) {
    const bool needs_half =
        variant == DensityVariant::F_half || variant == DensityVariant::F_mixed;
    if (needs_half && kernel.family != Equation::gdwe)
        throw parameter_error("F-variant densities require a gdwe kernel");
    if (!needs_half && kernel.family != Equation::gfpe)
        throw parameter_error("f_sM density requires a gfpe kernel");
    if (needs_half && !kernel.half_image && !kernel.degenerate)
        throw parameter_error("F-variant densities require k-hat^{1/2}");
    return SubordinationDensity{std::move(kernel), variant, cfg};
}

/// Single-value convenience form of the density evaluator.
inline double subordination_density(const MemoryKernel& kernel, DensityVariant variant, double xi,
                                    double t) {
    return make_density(kernel, variant).value(xi, t);
}

/// Truncation point Xi with an estimated tail mass below mass_tol, found by
/// geometric scanning of the cumulative integral against the Laplace-side total.
inline double density_tail_bound(const SubordinationDensity& d, double t, double mass_tol) {
    if (!(mass_tol > 0.0) || !(mass_tol <= 1e-3))
        throw parameter_error("density_tail_bound: mass_tol must be in (0, 1e-3]");
    if (!(t > 0.0)) throw parameter_error("density_tail_bound: requires t > 0");
    if (d.source_kernel.degenerate) return 1.0625 * t;

    const double m_tot = d.total_mass(t);
    const double mean = d.first_moment(t);
    double xi_hi = std::max(4.0 * mean / std::max(m_tot, 1e-12), 1e-2 * t);
    // floor near the noise-times-length limit of general-kernel density values
    const double quad_tol = std::max(0.05 * mass_tol,
                                     d.source_kernel.kind == KernelKind::power_law ? 0.0 : 2e-8);
    auto f = [&](double xi) { return d.value(xi, t); };
    double partial = integrate(f, 0.0, xi_hi, quad_tol).value;
    int quiet = 0;
    for (int iter = 0; iter < 80; ++iter) {
        if (m_tot - partial < 0.5 * mass_tol) return xi_hi;
        const double xi_next = 1.5 * xi_hi;
        const double inc = integrate(f, xi_hi, xi_next, quad_tol).value;
        partial += inc;
        xi_hi = xi_next;
        // two consecutive near-empty segments certify the tail for the
        // superexponentially decaying densities handled here
        if (std::abs(inc) < 0.25 * mass_tol) {
            if (++quiet >= 2) return xi_hi;
        } else {
            quiet = 0;
        }
        if (xi_hi > 1e9 * t)
            throw accuracy_error("density_tail_bound: tail mass does not fall below tolerance");
    }
    throw accuracy_error("density_tail_bound: geometric scan exceeded its iteration cap");
}

inline double density_tail_bound(const MemoryKernel& kernel, DensityVariant variant, double t,
                                 double mass_tol) {
    return density_tail_bound(make_density(kernel, variant), t, mass_tol);
}

/// Memoizing wrapper for repeated density evaluations at one fixed t
/// (the solvers share quadrature nodes across grid points). Thread-safe.
class CachedDensity {
public:
    CachedDensity(SubordinationDensity d, double t) : density_(std::move(d)), t_(t) {}

    double operator()(double xi) const {
        {
            std::shared_lock lock(mutex_);
            auto it = cache_.find(xi);
            if (it != cache_.end()) return it->second;
        }
        const double v = density_.value(xi, t_);
        std::unique_lock lock(mutex_);
        cache_.emplace(xi, v);
        return v;
    }

    const SubordinationDensity& density() const { return density_; }
    double t() const { return t_; }

private:
    SubordinationDensity density_;
    double t_;
    mutable std::unordered_map<double, double> cache_;
    mutable std::shared_mutex mutex_;
};

}  // namespace memkernel
