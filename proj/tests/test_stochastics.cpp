#include "racreach/stochastics.hpp"

#include "doctest.h"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

using namespace racreach;

namespace {

/// Composite Simpson on [a, b]; the reference for masses without closed forms.
double simpson(const DistributionSpec& d, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = pdf(d, a) + pdf(d, b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * pdf(d, a + i * h);
    return s * h / 3.0;
}

const double phi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);

}  // namespace

TEST_CASE("pdf values") {
    CHECK(pdf(Exponential{1.0}, 0.0) == 1.0);
    CHECK(pdf(Exponential{2.0}, 0.0) == 2.0);
    CHECK(pdf(FoldedNormal{0.0, 1.0}, 0.0) == doctest::Approx(2.0 * phi0).epsilon(1e-14));
    CHECK(pdf(FoldedNormal{0.0, 1.0}, 0.0) == doctest::Approx(0.7978845608).epsilon(1e-10));
    CHECK(pdf(Uniform{2.0, 5.0}, 3.0) == doctest::Approx(1.0 / 3.0));
    CHECK(pdf(Uniform{2.0, 5.0}, 1.0) == 0.0);
    CHECK(pdf(Exponential{1.0}, -1.0) == 0.0);
    CHECK(pdf(FoldedNormal{6.0, 3.0}, -0.5) == 0.0);
}

TEST_CASE("interval masses") {
    CHECK(interval_mass(Exponential{1.0}, 0.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    CHECK(interval_mass(Exponential{1.0}, 0.0, 1.0) == doctest::Approx(0.6321205588).epsilon(1e-10));
    CHECK(interval_mass(Uniform{2.0, 5.0}, 0.0, 4.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    for (const DistributionSpec& d : {DistributionSpec{Exponential{0.3}}, DistributionSpec{FoldedNormal{1.5, 2.0}},
                                      DistributionSpec{Uniform{1.0, 3.0}}}) {
        CHECK(interval_mass(d, 1.7, 1.7) == 0.0);
        CHECK(interval_mass(d, 0.0, INFINITY) == doctest::Approx(1.0).epsilon(1e-14));
    }
    // far tail keeps its relative accuracy
    CHECK(interval_mass(Exponential{1.0}, 40.0, INFINITY) == doctest::Approx(std::exp(-40.0)).epsilon(1e-12));
    // half-normal: P(|Z| <= 1) = erf(1/sqrt 2)
    CHECK(interval_mass(FoldedNormal{0.0, 1.0}, 0.0, 1.0) == doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-14));
}

TEST_CASE("folded normal masses agree with quadrature") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mu(0.0, 8.0), sigma(0.2, 4.0), x(0.0, 15.0);
    for (int i = 0; i < 30; ++i) {
        const FoldedNormal f{mu(rng), sigma(rng)};
        double a = x(rng), b = x(rng);
        if (a > b) std::swap(a, b);
        CHECK(interval_mass(f, a, b) == doctest::Approx(simpson(f, a, b)).epsilon(1e-9));
    }
}

TEST_CASE("normalization") {
    const FoldedNormal f{6.0, 3.0};
    CHECK(interval_mass(f, 0.0, 60 * f.sigma + f.mu) == doctest::Approx(1.0).epsilon(1e-10));
    const Exponential e{0.025};
    CHECK(interval_mass(e, 0.0, 100.0 / e.lambda) == doctest::Approx(1.0).epsilon(1e-10));
    const Uniform u{2.0, 5.0};
    CHECK(interval_mass(u, 0.0, u.b) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("pdf is the derivative of the cdf") {
    const std::array<DistributionSpec, 4> ds{FoldedNormal{6.0, 3.0}, FoldedNormal{0.5, 0.75}, Exponential{2.0},
                                             Uniform{1.0, 4.0}};
    const double h = 1e-5;
    for (const auto& d : ds) {
        for (double x = 0.05; x < 12.0; x += 0.173) {
            if (std::holds_alternative<Uniform>(d) && (std::abs(x - 1.0) < 2 * h || std::abs(x - 4.0) < 2 * h)) continue;
            const double num = (interval_mass(d, 0.0, x + h) - interval_mass(d, 0.0, x - h)) / (2 * h);
            CHECK(std::abs(num - pdf(d, x)) <= 1e-6);
        }
    }
}

TEST_CASE("tightened exponential bound") {
    const BoundPair b = tighten_bounds(Exponential{1.0}, 100.0);
    CHECK(b.lo < 1e-15);  // the bisection may step past a sliver of mass <= tau
    CHECK(b.hi == doctest::Approx(54.0 * std::numbers::ln2).epsilon(1e-9));
    CHECK(std::abs(b.hi - 37.4296) < 0.01);
    CHECK(interval_mass(Exponential{1.0}, b.hi, 100.0) <= default_tau);
}

TEST_CASE("tightened uniform bound") {
    const BoundPair b = tighten_bounds(Uniform{2.0, 5.0}, 4.0);
    CHECK(b.lo == 2.0);
    CHECK(b.hi == 4.0);
}

TEST_CASE("tightened folded normal bound") {
    const FoldedNormal f{6.0, 3.0};
    const BoundPair b = tighten_bounds(f, 12.0);
    CHECK(b.lo == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(b.lo >= 0.0);
    CHECK(b.hi == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(b.hi <= 12.0);
    CHECK(interval_mass(f, 0.0, b.lo) <= default_tau);

    // wide t_int: the right tail is cut well before it
    const BoundPair w = tighten_bounds(FoldedNormal{2.0, 0.75}, 100.0);
    CHECK(w.hi < 20.0);
    CHECK(interval_mass(FoldedNormal{2.0, 0.75}, w.hi, 100.0) <= default_tau);
}

TEST_CASE("tightening discards at most 2 tau") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(0.0, 10.0), scale(0.1, 5.0), tint(1.0, 120.0);
    std::uniform_int_distribution<int> pick(0, 2);
    const std::array<double, 3> taus{default_tau, 1e-9, 1e-3};
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        DistributionSpec d;
        switch (pick(rng)) {
            case 0: d = FoldedNormal{pos(rng), scale(rng)}; break;
            case 1: d = Exponential{scale(rng)}; break;
            default: {
                const double a = pos(rng);
                d = Uniform{a, a + scale(rng)};
            }
        }
        const double t = tint(rng);
        for (double tau : taus) {
            BoundPair b;
            try {
                b = tighten_bounds(d, t, tau);
            } catch (const DegenerateBoundsError&) {
                CHECK(interval_mass(d, 0.0, t) <= 2 * tau);
                continue;
            }
            CHECK(b.lo >= 0.0);
            CHECK(b.hi <= t);
            CHECK(b.lo < b.hi);
            // each discarded side carries <= tau; the total is compared with a
            // few ulps of slack since tau = 2^-54 sits below the rounding of 1
            CHECK(interval_mass(d, 0.0, b.lo) <= tau);
            CHECK(interval_mass(d, b.hi, t) <= tau);
            CHECK(interval_mass(d, b.lo, b.hi) >= interval_mass(d, 0.0, t) - 2 * tau - 4e-16);
            ++checked;
        }
    }
    CHECK(checked > 800);
}

TEST_CASE("smaller tau never narrows the bounds") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pos(0.0, 10.0), scale(0.1, 5.0);
    for (int i = 0; i < 60; ++i) {
        const std::array<DistributionSpec, 2> ds{FoldedNormal{pos(rng), scale(rng)}, Exponential{scale(rng)}};
        for (const auto& d : ds) {
            const BoundPair loose = tighten_bounds(d, 50.0, 1e-3);
            const BoundPair tight = tighten_bounds(d, 50.0, 1e-12);
            CHECK(tight.lo <= loose.lo);
            CHECK(tight.hi >= loose.hi);
        }
    }
}

TEST_CASE("tightening errors") {
    CHECK_THROWS_AS(tighten_bounds(Exponential{1.0}, 10.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(tighten_bounds(Exponential{1.0}, 10.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(tighten_bounds(Exponential{1.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(tighten_bounds(Exponential{-1.0}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(tighten_bounds(Uniform{20.0, 30.0}, 10.0), DegenerateBoundsError);
    CHECK_THROWS_AS(tighten_bounds(Uniform{10.0, 30.0}, 10.0), DegenerateBoundsError);
}

TEST_CASE("joint density is the product of factors") {
    const std::array<DistributionSpec, 2> ee{Exponential{1.0}, Exponential{1.0}};
    const std::array<double, 2> zero{0.0, 0.0};
    CHECK(joint_density(ee, zero) == 1.0);
    const std::array<DistributionSpec, 2> e12{Exponential{1.0}, Exponential{2.0}};
    CHECK(joint_density(e12, zero) == 2.0);
    const std::array<DistributionSpec, 2> ef{Exponential{1.0}, FoldedNormal{0.0, 1.0}};
    const std::array<double, 2> s{1.0, 0.0};
    CHECK(joint_density(ef, s) == doctest::Approx(std::exp(-1.0) * 2.0 * phi0).epsilon(1e-14));
    CHECK(joint_density(ef, s) == doctest::Approx(0.29352).epsilon(1e-4));
    const std::array<double, 1> one{1.0};
    CHECK_THROWS_AS(joint_density(ef, one), std::invalid_argument);
}
