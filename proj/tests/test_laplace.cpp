#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "memkernel/laplace.hpp"

using namespace memkernel;

namespace {
constexpr double pi = 3.14159265358979323846;
double levy_smirnov(double t) {
    return std::exp(-1.0 / (4.0 * t)) / (2.0 * std::sqrt(pi) * std::pow(t, 1.5));
}
}  // namespace

TEST_CASE("talbot inversion of elementary pairs") {
    auto one_over_s = make_image([](complex_t s) { return 1.0 / s; });
    CHECK(invert_laplace(one_over_s, 7.0, InversionMethod::talbot).value ==
          doctest::Approx(1.0).epsilon(1e-9));
    auto sine = make_image([](complex_t s) { return 1.0 / (s * s + 1.0); });
    CHECK(invert_laplace(sine, pi / 2.0, InversionMethod::talbot).value ==
          doctest::Approx(1.0).epsilon(1e-8));
    auto ramp = make_image([](complex_t s) { return 1.0 / (s * s); });
    CHECK(invert_laplace(ramp, 3.0, InversionMethod::talbot).value ==
          doctest::Approx(3.0).epsilon(1e-9));
    // branch-cut image: Levy-Smirnov pair
    auto ls = make_image([](complex_t s) { return std::exp(-std::sqrt(s)); });
    CHECK(invert_laplace(ls, 1.0, InversionMethod::talbot).value ==
          doctest::Approx(levy_smirnov(1.0)).epsilon(1e-8));
}

TEST_CASE("gaver-stehfest inversion") {
    auto one_over_s = make_image([](complex_t s) { return 1.0 / s; });
    CHECK(invert_laplace(one_over_s, 7.0, InversionMethod::gaver_stehfest).value ==
          doctest::Approx(1.0).epsilon(1e-8));
    auto decay = make_image([](complex_t s) { return 1.0 / (s + 1.0); });
    CHECK(invert_laplace(decay, 1.0, InversionMethod::gaver_stehfest).value ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-5));
    // order-14 truncation on branch-cut images sits near 1e-4 relative
    auto ls = make_image([](complex_t s) { return std::exp(-std::sqrt(s)); });
    CHECK(invert_laplace(ls, 1.0, InversionMethod::gaver_stehfest).value ==
          doctest::Approx(levy_smirnov(1.0)).epsilon(5e-4));
    CHECK_THROWS_AS(invert_laplace(ls, 1.0, InversionMethod::gaver_stehfest,
                                   InversionConfig{48, 16, 1e-6, 2}),
                    config_error);  // only order 14 is provided
}

TEST_CASE("auto method cross-checks and records the discrepancy") {
    auto ramp = make_image([](complex_t s) { return 1.0 / (s * s); });
    auto r = invert_laplace(ramp, 3.0);
    CHECK(r.value == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(r.cross_discrepancy < 1e-6);
    CHECK_FALSE(r.accuracy_warning);

    // branch-cut image: the Stehfest side is truncation-limited, so the
    // discrepancy persists through node doubling and is flagged
    auto ls = make_image([](complex_t s) { return std::exp(-std::sqrt(s)); });
    const long before = diag::counters().inversion_cross_check_warnings.load();
    auto r2 = invert_laplace(ls, 1.0);
    CHECK(r2.value == doctest::Approx(levy_smirnov(1.0)).epsilon(1e-7));
    CHECK(r2.cross_discrepancy > 1e-6);
    CHECK(r2.accuracy_warning);
    CHECK(diag::counters().inversion_cross_check_warnings.load() == before + 1);
}

TEST_CASE("declared pole right of the contour is a configuration error") {
    auto img = make_image([](complex_t s) { return 1.0 / (s - 30.0); }, "entire",
                          {{30.0, SingularityKind::pole}});
    CHECK_THROWS_AS(invert_laplace(img, 5.0, InversionMethod::talbot), config_error);
    // removable singular points do not block the contour
    auto ok = make_image([](complex_t s) { return 1.0 / s; }, "entire",
                         {{30.0, SingularityKind::removable}});
    CHECK(invert_laplace(ok, 5.0, InversionMethod::talbot).value ==
          doctest::Approx(1.0).epsilon(1e-7));
    CHECK_THROWS_AS(invert_laplace(ok, -1.0), parameter_error);
}

TEST_CASE("complex-original inversion") {
    // L^{-1}[1/(s - i); t] = exp(i t)
    auto img = make_image([](complex_t s) { return 1.0 / (s - complex_t(0.0, 1.0)); });
    const auto v = invert_laplace_complex(img, 1.0);
    CHECK(std::abs(v - std::exp(complex_t(0.0, 1.0))) < 1e-7);
}

TEST_CASE("bromwich line fallback agrees with closed forms") {
    auto ls = make_image([](complex_t s) { return std::exp(-std::sqrt(s)); });
    CHECK(detail::bromwich_line(ls, 1.0) == doctest::Approx(levy_smirnov(1.0)).epsilon(1e-11));
    // L^{-1}[e^{-xi sqrt(s)}; t] = xi exp(-xi^2/(4t)) / (2 sqrt(pi) t^{3/2})
    auto ls2 = make_image([](complex_t s) { return std::exp(-2.0 * std::sqrt(s)); });
    CHECK(detail::bromwich_line(ls2, 1.0) ==
          doctest::Approx(2.0 * std::exp(-1.0) / (2.0 * std::sqrt(pi))).epsilon(1e-11));
}

TEST_CASE("density-image inversion falls back where the contour blows up") {
    // f(1/2; xi, t): exact Gaussian-in-xi closed form at every xi
    for (double xi : {0.5, 2.0, 6.0, 9.0}) {
        auto img = make_image(
            [xi](complex_t s) { return std::exp(-0.5 * std::log(s)) * std::exp(-xi * std::sqrt(s)); });
        const double ref = std::exp(-xi * xi / 4.0) / std::sqrt(pi);
        CHECK(detail::invert_density_image(img, 1.0, 24) ==
              doctest::Approx(ref).epsilon(1e-9));
    }
}
