#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "torusdyn/bump_profiles.hpp"
#include "torusdyn/torus_core.hpp"

using namespace torusdyn;

namespace {
const ToralAutomorphism A = linear_model();
const double lam = A.lambda;
const double mu = A.mu;
const double slope_lo = lam * lam - lam;
const double slope_hi = std::sqrt(mu) - lam;

OddRamp default_alpha(double h = 1.0942352531273661e-06) {
    return build_alpha(h, lam, slope_lo, slope_hi, 1.5, 0.5);
}

// central finite differences as the independent derivative oracle
template <class F>
double fd(const F& f, double t, double h) {
    return (f(t + h) - f(t - h)) / (2.0 * h);
}
}  // namespace

TEST_CASE("odd ramp basic shape") {
    const OddRamp a = default_alpha();
    CHECK(a.value(0.0) == 0.0);
    CHECK(a.flip > 0.0);
    CHECK(a.flip < a.half_support);

    // oddness is exact by construction
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(0.0, 1.2 * a.half_support);
    for (int i = 0; i < 10000; ++i) {
        const double t = U(rng);
        CHECK(a.value(-t) == -a.value(t));
        CHECK(a.derivative(-t) == a.derivative(t));
    }

    // hard zero at and beyond the support
    CHECK(a.value(a.half_support) == 0.0);
    CHECK(a.value(-a.half_support) == 0.0);
    CHECK(a.value(1.7 * a.half_support) == 0.0);
    CHECK(a.derivative(a.half_support) == 0.0);
}

TEST_CASE("odd ramp slope window") {
    const OddRamp a = default_alpha();
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= 100000; ++i) {
        const double t = a.half_support * (2.0 * i / 100000.0 - 1.0);
        const double d = a.derivative(t);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    CHECK(hi < slope_hi);          // < sqrt(mu) - lambda ~ 2.4721
    CHECK(lo > slope_lo);          // > lambda^2 - lambda ~ -0.1246
    CHECK(hi == Catch::Approx(1.5 - lam).margin(1e-12));
    CHECK(lo == Catch::Approx(a.tail_slope).margin(1e-12));
}

TEST_CASE("exactly three fixed points of the 1-D surgered map") {
    const OddRamp a = default_alpha();
    CHECK(count_interior_fixed_points(a, 100000) == 3);

    // the flip point satisfies alpha(s) + lambda s = s to 1e-12 (relative to
    // the support scale)
    const double s = a.flip;
    CHECK(std::fabs(a.value(s) + lam * s - s) < 1e-12 * a.half_support);
    CHECK(std::fabs(a.value(-s) + lam * (-s) + s) < 1e-12 * a.half_support);

    // map slopes at the three fixed points
    CHECK(lam + a.derivative(0.0) == Catch::Approx(1.5).margin(1e-12));
    CHECK(lam + a.derivative(s) == Catch::Approx(0.5).margin(1e-12));
    CHECK(lam + a.derivative(-s) == Catch::Approx(0.5).margin(1e-12));

    // the derivative is constant on a neighborhood of the flips
    CHECK(a.derivative(s - 0.5 * a.plateau_half) == a.derivative(s));
    CHECK(a.derivative(s + 0.5 * a.plateau_half) == a.derivative(s));
}

TEST_CASE("derivative matches finite differences") {
    const OddRamp a = default_alpha();
    const double h = 1e-6 * a.half_support;
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> U(-a.half_support, a.half_support);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double t = U(rng);
        const double exact = a.derivative(t);
        const double approx = fd([&](double s) { return a.value(s); }, t, h);
        worst = std::max(worst, std::fabs(exact - approx) /
                                    std::max(1.0, std::fabs(exact)));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("infeasible ramp targets are rejected with the violated inequality") {
    // both targets on the same side of 1: no source/sink split
    CHECK_THROWS_AS(build_alpha(1.0, lam, slope_lo, slope_hi, 1.5, 1.2),
                    std::invalid_argument);
    // slope at zero outside the window
    CHECK_THROWS_AS(build_alpha(1.0, lam, slope_lo, slope_hi, 2.8, 0.5),
                    std::invalid_argument);
    try {
        build_alpha(1.0, lam, slope_lo, slope_hi, 2.8, 0.5);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("slope window") != std::string::npos);
    }
    // degenerate support
    CHECK_THROWS_AS(build_alpha(0.0, lam, slope_lo, slope_hi, 1.5, 0.5),
                    std::invalid_argument);
}

TEST_CASE("second-stage polarity (sink at zero, sources at the flips)") {
    const OddRamp a2 = build_alpha(1.0, mu, 0.8 - mu, 1.0, 0.85, 1.15);
    CHECK(mu + a2.derivative(0.0) == Catch::Approx(0.85).margin(1e-12));
    CHECK(mu + a2.derivative(a2.flip) == Catch::Approx(1.15).margin(1e-12));
    CHECK(count_interior_fixed_points(a2, 100000) == 3);
    // everywhere above the domination floor for any cutoff value in [0,1]
    for (int i = 0; i <= 20000; ++i) {
        const double t = 2.0 * i / 20000.0 - 1.0;
        CHECK(mu + a2.derivative(t) > 0.8);
    }
}

TEST_CASE("plateau bump") {
    const double h2 = 0.9 * 5e-3;
    const PlateauBump b = build_beta(h2, h2 / 8.0);
    CHECK(b.value(0.0) == 1.0);
    CHECK(b.value(h2) == 0.0);
    CHECK(b.value(-h2) == 0.0);
    CHECK(b.value(0.5 * b.plateau_half_width) == 1.0);
    CHECK(b.derivative(0.5 * b.plateau_half_width) == 0.0);

    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> U(0.0, 1.1 * h2);
    for (int i = 0; i < 10000; ++i) {
        const double t = U(rng);
        CHECK(b.value(-t) == b.value(t));  // even by construction
        CHECK(b.value(t) >= 0.0);
        CHECK(b.value(t) <= 1.0);
    }

    double mb = 0.0;
    for (int i = 0; i <= 100000; ++i)
        mb = std::max(mb, std::fabs(b.derivative(h2 * (2.0 * i / 100000.0 - 1.0))));
    CHECK(mb < 3.0 / (2.0 * h2));

    // derivative vs finite differences
    const double step = 1e-6 * h2;
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double t = U(rng);
        const double exact = b.derivative(t);
        const double approx = fd([&](double s) { return b.value(s); }, t, step);
        worst = std::max(worst,
                         std::fabs(exact - approx) / std::max(1.0 / h2, std::fabs(exact)));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("plateau too wide is rejected") {
    CHECK_THROWS_AS(build_beta(1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(build_beta(1.0, 0.25), std::invalid_argument);
    CHECK_NOTHROW(build_beta(1.0, 0.125));
}

TEST_CASE("profile validation") {
    const double eps = 5e-3;
    const double h2 = 0.9 * eps;
    const double h1 = 0.5 * (eps / (3.0 * mu)) * (2.0 * h2);
    const OddRamp a = build_alpha(h1, lam, slope_lo, slope_hi, 1.5, 0.5);
    const PlateauBump b = build_beta(h2, h2 / 8.0);

    const ValidationReport rep = validate_profiles(a, b, eps, mu);
    for (const auto& item : rep.items) {
        INFO(item.name << " measured " << item.measured << " bound " << item.bound);
        CHECK(item.pass);
    }
    CHECK(rep.pass());

    // max|alpha| <= (sqrt(mu)-lambda) * l(I1) / 2
    CHECK(a.max_abs <= (std::sqrt(mu) - lam) * (2.0 * h1) / 2.0);

    // doubling l(I1) with l(I2) fixed must fail the length-ratio item
    const OddRamp a2 = build_alpha(2.0 * h1, lam, slope_lo, slope_hi, 1.5, 0.5);
    const ValidationReport rep2 = validate_profiles(a2, b, eps, mu);
    CHECK_FALSE(rep2.pass());
    bool ratio_failed = false;
    for (const auto& item : rep2.items)
        if (item.name == "length_ratio" && !item.pass) ratio_failed = true;
    CHECK(ratio_failed);
}
