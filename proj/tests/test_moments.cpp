#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "memkernel/gamma.hpp"
#include "memkernel/moments.hpp"

using namespace memkernel;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST_CASE("IC moment specs") {
    CHECK(ICMomentSpec::from_ic(InitialCondition::delta()).C == 0.0);
    CHECK(ICMomentSpec::from_ic(InitialCondition::box(1.2)).C ==
          doctest::Approx(1.2 * 1.2 / 3.0).epsilon(1e-15));
    CHECK(ICMomentSpec::from_ic(InitialCondition::gaussian(0.8)).C ==
          doctest::Approx(0.64).epsilon(1e-15));
    ICMomentSpec bad;
    bad.C = -1.0;
    CHECK_THROWS_AS(bad.validate(), parameter_error);
    // custom profile: second moment by quadrature
    auto tri = InitialCondition::custom([](double x) { return 1.0 - std::abs(x); }, -1.0, 1.0);
    CHECK(ICMomentSpec::from_ic(tri).C == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("velocity moment specs") {
    CHECK(VelocityMomentSpec::from_v0(VelocityProfile::zero()).mean_rate == 0.0);
    CHECK(VelocityMomentSpec::from_v0(VelocityProfile::gaussian_derivative(0.5)).mean_rate == 1.0);
    CHECK(VelocityMomentSpec::from_v0(VelocityProfile::box_spikes(0.5)).mean_rate == 1.0);
    // custom: v0 = -p0' of a gaussian, numeric Fourier-at-zero data
    auto v = VelocityProfile::custom(
        [](double x) { return x * std::exp(-x * x / 2.0) / std::sqrt(2.0 * pi); }, -9.0, 9.0);
    auto s = VelocityMomentSpec::from_v0(v);
    CHECK(s.v_at_0 == doctest::Approx(0.0));
    CHECK(s.mean_rate == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.d2 == doctest::Approx(0.0));
}

TEST_CASE("gfpe mean") {
    ICMomentSpec delta;
    CHECK(mean_gfpe(make_power_law_kernel(0.5), delta, 1.0, 1.0) ==
          doctest::Approx(2.0 / std::sqrt(pi)).epsilon(1e-12));
    CHECK(mean_gfpe(make_distributed_order_kernel(), delta, 0.0, 3.0) == 0.0);
    // distributed-order kernel: mean ~ ln t at long times
    const double m = mean_gfpe(make_distributed_order_kernel(), delta, 1.0, 1e4);
    CHECK(std::abs(m / std::log(1e4) - 1.0) < 0.1);
}

TEST_CASE("gfpe msd closed forms") {
    ICMomentSpec delta;
    auto half = make_power_law_kernel(0.5);
    auto r0 = msd_gfpe(half, delta, 1.0, 0.0, 1.0);
    CHECK(r0.msd == doctest::Approx(2.0 / gamma_fn(1.5)).epsilon(1e-13));
    CHECK(r0.method == MomentMethod::closed_form);
    // mu = 1: bracket (2/Gamma(2) - 1/Gamma^2(3/2)) + 2/Gamma(3/2)
    auto r1 = msd_gfpe(half, delta, 1.0, 1.0, 1.0);
    CHECK(r1.msd == doctest::Approx(2.0 - 4.0 / pi + 4.0 / std::sqrt(pi)).epsilon(1e-13));
    CHECK(r1.mean == doctest::Approx(2.0 / std::sqrt(pi)).epsilon(1e-13));
}

TEST_CASE("gfpe msd: distributed-order long-time asymptotics") {
    ICMomentSpec delta;
    auto r = msd_gfpe(make_distributed_order_kernel(), delta, 1.0, 0.0, 1e4);
    CHECK(r.method == MomentMethod::numeric_ilt);
    CHECK(std::abs(r.msd / (2.0 * std::log(1e4)) - 1.0) < 0.1);
}

TEST_CASE("closed form vs numeric inversion for power-law kernels") {
    ICMomentSpec spec;
    spec.C = 0.7;
    for (double alpha : {0.25, 0.5, 0.75})
        for (double t : {0.5, 1.0, 5.0}) {
            auto kernel = make_power_law_kernel(alpha);
            const auto closed = msd_gfpe(kernel, spec, 1.3, 0.6, t);
            // numeric route: same Laplace images inverted by Talbot
            const double i1 = detail::moment_ilt(kernel, 2, 1, t);
            const double i2 = detail::moment_ilt(kernel, 3, 2, t);
            const double second = 2.0 * 1.3 * i1 + spec.C + 2.0 * 0.36 * i2;
            const double mean = 0.6 * i1;
            CHECK(second - mean * mean == doctest::Approx(closed.msd).epsilon(1e-6));
        }
}

TEST_CASE("gdwe msd") {
    ICMomentSpec delta;
    VelocityMomentSpec none;
    CHECK(msd_gdwe(make_gdwe_power_kernel(0.75), delta, none, 1.0, 1.0).msd ==
          doctest::Approx(2.0 / gamma_fn(2.5)).epsilon(1e-13));
    // ballistic wave limit: 2 a^2 t^2 / Gamma(3) = a^2 t^2
    CHECK(msd_gdwe(make_gdwe_power_kernel(1.0), delta, none, 1.0, 2.0).msd ==
          doctest::Approx(4.0).epsilon(1e-13));
    // k-hat = (s-1)/(s ln s): msd ~ 2 a^2 t ln t
    auto r = msd_gdwe(kernel_from_id("gdwe_distributed"), delta, none, 1.0, 1e4);
    CHECK(std::abs(r.msd / (2.0 * 1e4 * std::log(1e4)) - 1.0) < 0.1);
    // v0-type initial data contribute mean = t
    VelocityMomentSpec vneg;
    vneg.mean_rate = 1.0;
    auto rv = msd_gdwe(make_gdwe_power_kernel(0.75), ICMomentSpec{1.0, 0.0, 1.0}, vneg, 1.0, 1.0);
    CHECK(rv.mean == doctest::Approx(1.0));
    CHECK(rv.second_moment == doctest::Approx(2.0 / gamma_fn(2.5) + 1.0).epsilon(1e-13));
}

TEST_CASE("tauberian asymptotics") {
    TransportParams tp;
    tp.B = 1.0;
    tp.mu = 1.0;
    tp.a = 1.0;
    const double t = 1e4, lt = std::log(1e4);
    CHECK(msd_asymptotic(make_distributed_order_kernel(), Equation::gfpe, tp, 0.3, t) ==
          doctest::Approx(lt * lt + 2.0 * lt + 0.3).epsilon(1e-14));
    TransportParams nodrift;
    CHECK(msd_asymptotic(make_distributed_order_kernel(), Equation::gfpe, nodrift, 0.0, t) ==
          doctest::Approx(2.0 * lt).epsilon(1e-14));
    CHECK(msd_asymptotic(kernel_from_id("gdwe_distributed_sq"), Equation::gdwe, tp, 0.0, t) ==
          doctest::Approx(2.0 * lt * lt).epsilon(1e-14));
    CHECK(msd_asymptotic(kernel_from_id("gdwe_distributed"), Equation::gdwe, tp, 0.0, t) ==
          doctest::Approx(2.0 * t * lt).epsilon(1e-14));
    // power law at mu = 0 reproduces the exact formula identically
    CHECK(msd_asymptotic(make_power_law_kernel(0.5), Equation::gfpe, nodrift, 0.0, t) ==
          doctest::Approx(msd_gfpe(make_power_law_kernel(0.5), ICMomentSpec{}, 1.0, 0.0, t).msd)
              .epsilon(1e-14));
    CHECK_THROWS_AS(msd_asymptotic(make_power_law_kernel(0.5), Equation::gfpe, tp, 0.0, 50.0),
                    parameter_error);
    auto custom = make_custom_kernel(Equation::gfpe,
                                     make_image([](complex_t s) { return 1.0 / (1.0 + s); }));
    CHECK_THROWS_AS(msd_asymptotic(custom, Equation::gfpe, tp, 0.0, t), config_error);
}

TEST_CASE("box and gaussian profiles with equal C give bitwise-equal msd") {
    // eps^2/3 = sigma^2: the profiles are indistinguishable through the second
    // moment, and equal C inputs give bitwise-equal outputs
    const double sigma = 1.0, eps = std::sqrt(3.0);
    auto sb = ICMomentSpec::from_ic(InitialCondition::box(eps));
    auto sg = ICMomentSpec::from_ic(InitialCondition::gaussian(sigma));
    CHECK(sb.C == doctest::Approx(sg.C).epsilon(1e-15));
    sg.C = sb.C;
    auto kernel = make_power_law_kernel(0.5);
    CHECK(msd_gfpe(kernel, sb, 1.0, 0.4, 1.3).msd == msd_gfpe(kernel, sg, 1.0, 0.4, 1.3).msd);
}

TEST_CASE("drifted gfpe and gdwe msd ratio settles at long times") {
    // alpha-gfpe with drift against beta-gdwe at beta = alpha: both grow like
    // t^{2 alpha}, the ratio drifts less than 5% between t = 1e3 and t = 1e4
    ICMomentSpec delta;
    VelocityMomentSpec none;
    auto kg = make_power_law_kernel(0.75);
    auto kw = make_gdwe_power_kernel(0.75);
    auto ratio = [&](double t) {
        return msd_gfpe(kg, delta, 1.0, 1.0, t).msd / msd_gdwe(kw, delta, none, 1.0, t).msd;
    };
    CHECK(std::abs(ratio(1e3) / ratio(1e4) - 1.0) < 0.05);
}

TEST_CASE("empirical moments") {
    // analytic heat-kernel field: second moment 2 B t
    auto grid = make_grid(-12.0, 12.0, 1201);
    SolutionField field;
    field.grid = grid;
    field.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        field.values[i] =
            std::exp(-grid[i] * grid[i] / 4.0) / (2.0 * std::sqrt(pi));
    CHECK(empirical_moments(field, 2) == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(empirical_moments(field, 1) == doctest::Approx(0.0));
    CHECK(field_mass(field) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(empirical_moments(field, 3), parameter_error);
    // truncated domain trips the warning counter
    const long before = diag::counters().truncation_warnings.load();
    SolutionField narrow;
    narrow.grid = make_grid(-1.0, 1.0, 11);
    narrow.values.assign(11, 0.2);
    empirical_moments(narrow, 2);
    CHECK(diag::counters().truncation_warnings.load() == before + 1);
}

TEST_CASE("empirical moments against analytic msd on solver output") {
    TransportParams tp;
    tp.B = 1.0;
    tp.mu = 1.0;
    auto field = solve_gfpe(make_power_law_kernel(0.5), InitialCondition::delta(), tp,
                            make_grid(-12.0, 16.0, 561), 1.0);
    const auto analytic = msd_gfpe(make_power_law_kernel(0.5), ICMomentSpec{}, 1.0, 1.0, 1.0);
    const double mean = empirical_moments(field, 1);
    const double second = empirical_moments(field, 2);
    const double msd = second - mean * mean;
    CHECK(std::abs(msd - analytic.msd) / analytic.msd < 1e-2);

    TransportParams tw;
    auto wf = solve_gdwe(make_gdwe_power_kernel(0.75), InitialCondition::gaussian(1.0),
                         VelocityProfile::zero(), tw, make_grid(-12.0, 12.0, 481), 1.0);
    const auto wa = msd_gdwe(make_gdwe_power_kernel(0.75),
                             ICMomentSpec::from_ic(InitialCondition::gaussian(1.0)),
                             VelocityMomentSpec{}, 1.0, 1.0);
    CHECK(std::abs(empirical_moments(wf, 2) - wa.msd) / wa.msd < 1e-2);

    // distributed-order kernels, both equations
    TransportParams td;
    auto df = solve_gfpe(make_distributed_order_kernel(), InitialCondition::gaussian(1.0), td,
                         make_grid(-12.0, 12.0, 321), 1.0);
    const auto da = msd_gfpe(make_distributed_order_kernel(),
                             ICMomentSpec::from_ic(InitialCondition::gaussian(1.0)), 1.0, 0.0, 1.0);
    CHECK(std::abs(empirical_moments(df, 2) - da.msd) / da.msd < 1e-2);
    auto sf = solve_gdwe(kernel_from_id("gdwe_distributed_sq"), InitialCondition::gaussian(1.0),
                         VelocityProfile::zero(), tw, make_grid(-12.0, 12.0, 321), 1.0);
    const auto sa = msd_gdwe(kernel_from_id("gdwe_distributed_sq"),
                             ICMomentSpec::from_ic(InitialCondition::gaussian(1.0)),
                             VelocityMomentSpec{}, 1.0, 1.0);
    CHECK(std::abs(empirical_moments(sf, 2) - sa.msd) / sa.msd < 1e-2);
}
