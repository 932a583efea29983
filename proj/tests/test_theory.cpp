#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ralp/theory.hpp"

using namespace ralp;

namespace {

// Composite-Simpson quadrature of the Gamma(shape, scale) density on
// [0, z]; independent of the implementation under test.
double gamma_cdf_quadrature(double z, int shape, double scale) {
    auto density = [&](double t) {
        if (t <= 0.0) return shape == 1 ? 1.0 / scale : 0.0;
        return std::exp((shape - 1) * std::log(t) - t / scale -
                        std::lgamma(static_cast<double>(shape)) - shape * std::log(scale));
    };
    const int steps = 20000;  // even
    const double h = z / steps;
    double sum = density(0.0) + density(z);
    for (int i = 1; i < steps; ++i) sum += density(i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

}  // namespace

TEST_CASE("gamma_cdf basic values") {
    CHECK(gamma_cdf(0.0, 3, 1.0) == 0.0);
    CHECK(gamma_cdf(-1.0, 3, 1.0) == 0.0);
    // shape 1 is the exponential distribution
    CHECK(gamma_cdf(3.0, 1, 2.0) == doctest::Approx(1.0 - std::exp(-1.5)).epsilon(1e-14));
    // shape 3, scale 2 at z = 4: 1 - 5 e^-2
    CHECK(gamma_cdf(4.0, 3, 2.0) == doctest::Approx(0.3233235838169365).epsilon(1e-13));
}

TEST_CASE("gamma_cdf agrees with quadrature") {
    struct Case {
        int shape;
        double scale;
    };
    for (const Case c : {Case{1, 1.0}, Case{2, 0.5}, Case{5, 3.0}, Case{10, 4.06}, Case{30, 2.0}}) {
        for (double frac : {0.3, 1.0, 2.0}) {
            const double z = frac * c.shape * c.scale;
            CAPTURE(c.shape);
            CAPTURE(c.scale);
            CAPTURE(z);
            CHECK(gamma_cdf(z, c.shape, c.scale) ==
                  doctest::Approx(gamma_cdf_quadrature(z, c.shape, c.scale)).epsilon(1e-8));
        }
    }
}

TEST_CASE("gamma_cdf extremes and monotonicity") {
    CHECK(gamma_cdf(1e6, 10, 1.0) == 1.0);
    CHECK(gamma_cdf(1e-12, 10, 1.0) >= 0.0);
    CHECK(gamma_cdf(1e-12, 10, 1.0) < 1e-9);
    double prev = -1.0;
    for (double z = 0.0; z <= 80.0; z += 0.5) {
        const double f = gamma_cdf(z, 10, 4.0);
        CHECK(f >= prev);
        prev = f;
    }
    CHECK_THROWS_AS(gamma_cdf(1.0, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gamma_cdf(1.0, 3, 0.0), std::invalid_argument);
}

TEST_CASE("interference_power") {
    CHECK(interference_power(0, 1.0, 13, 2.5) == 2.5);
    // k2 = 10, p2 = 6 dB, n = 13, n0 = 1
    CHECK(interference_power(10, std::pow(10.0, 0.6), 13, 1.0) ==
          doctest::Approx(4.06236285041152).epsilon(1e-14));
    CHECK_THROWS_AS(interference_power(-1, 1.0, 13, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(interference_power(1, 0.0, 13, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(interference_power(1, 1.0, 13, 0.0), std::invalid_argument);
}

TEST_CASE("poisson_tail_mean closed forms at m = 1") {
    // P(Poisson(nu) >= 1) = 1 - e^-nu
    CHECK(poisson_tail_mean(1, 0.01) == doctest::Approx(-std::log(0.99)).epsilon(1e-10));
    CHECK(poisson_tail_mean(1, 0.99) == doctest::Approx(-std::log(0.01)).epsilon(1e-10));
}

TEST_CASE("poisson_tail_mean frozen values") {
    // Independently computed by scanning/bisection against a reference
    // Gamma CDF implementation.
    CHECK(poisson_tail_mean(10, 1e-2) == doctest::Approx(4.13019916627).epsilon(1e-9));
    CHECK(poisson_tail_mean(16, 1e-2) == doctest::Approx(8.18110777383).epsilon(1e-9));
    CHECK_THROWS_AS(poisson_tail_mean(0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(poisson_tail_mean(3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(poisson_tail_mean(3, 1.0), std::invalid_argument);
}

TEST_CASE("threshold calibration round-trips through the CDF") {
    const double p1 = std::pow(10.0, 1.2);
    const double i2 = 4.06236285041152;
    for (int m : {1, 2, 5, 10, 33, 64}) {
        for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
            const double tau = calibrate_activity_threshold(m, eps, p1, i2);
            CAPTURE(m);
            CAPTURE(eps);
            CHECK(std::abs(gamma_cdf(tau, m, p1 + i2) - eps) < 1e-10);
        }
        const double tau_c = calibrate_collision_threshold(m, 1e-3, p1, i2);
        CHECK(std::abs((1.0 - gamma_cdf(tau_c, m, p1 + i2)) - 1e-3) < 1e-10);
        CHECK(calibrate_activity_threshold(m, 1e-2, p1, i2) < tau_c);
    }
    CHECK_THROWS_AS(calibrate_activity_threshold(10, 1e-2, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(calibrate_collision_threshold(10, 1e-3, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("error budget at the reference operating point") {
    TheoryParams tp;
    tp.m = 10;
    tp.p1 = std::pow(10.0, 1.2);
    tp.p2 = std::pow(10.0, 0.6);
    tp.n0 = 1.0;
    tp.k2 = 10;
    const double i2 = interference_power(tp.k2, tp.p2, 13, tp.n0);
    const double tau_a = calibrate_activity_threshold(tp.m, 1e-2, tp.p1, i2);
    const double tau_c = calibrate_collision_threshold(tp.m, 1e-3, tp.p1, i2);
    const ErrorBudget b = error_budget(tau_a, tau_c, tp, 13);

    // Calibration identities hold exactly.
    CHECK(b.missed_detection == doctest::Approx(1e-2).epsilon(1e-8));
    CHECK(b.single_as_collision == doctest::Approx(1e-3).epsilon(1e-8));
    // Frozen independently computed false-alarm probability.
    CHECK(b.false_alarm == doctest::Approx(0.00433205675066).epsilon(1e-9));
    CHECK(b.collision_as_single > 0.0);
    CHECK(b.collision_as_single < 1.0);

    CHECK_THROWS_AS(error_budget(tau_c, tau_a, tp, 13), std::invalid_argument);
    TheoryParams bad = tp;
    bad.collision_multiplicity = 1;
    CHECK_THROWS_AS(error_budget(tau_a, tau_c, bad, 13), std::invalid_argument);
}

TEST_CASE("collision statistics shift with the multiplicity") {
    TheoryParams tp;
    tp.m = 10;
    tp.p1 = std::pow(10.0, 1.2);
    tp.p2 = std::pow(10.0, 0.6);
    tp.n0 = 1.0;
    tp.k2 = 10;
    const double i2 = interference_power(tp.k2, tp.p2, 13, tp.n0);
    const double tau_a = calibrate_activity_threshold(tp.m, 1e-2, tp.p1, i2);
    const double tau_c = calibrate_collision_threshold(tp.m, 1e-3, tp.p1, i2);
    const ErrorBudget b2 = error_budget(tau_a, tau_c, tp, 13);
    tp.collision_multiplicity = 3;
    const ErrorBudget b3 = error_budget(tau_a, tau_c, tp, 13);
    // More colliding devices push the statistic up, so de-escalation to a
    // single verdict becomes rarer.
    CHECK(b3.collision_as_single < b2.collision_as_single);
    // The single-preamble probabilities do not depend on the multiplicity.
    CHECK(b3.missed_detection == b2.missed_detection);
    CHECK(b3.false_alarm == b2.false_alarm);
}

TEST_CASE("kl_divergence closed-form values and monotonicity") {
    CHECK(kl_divergence(1.0, 1.0) == doctest::Approx(0.3068528194400547).epsilon(1e-14));
    CHECK(kl_divergence(std::exp(1.0) - 1.0, 1.0) ==
          doctest::Approx(std::exp(1.0) - 2.0).epsilon(1e-14));
    CHECK(kl_divergence(2.0, 1.0) == doctest::Approx(0.9013877113318902).epsilon(1e-14));
    // The divergence is scale-free in (p1, i2).
    CHECK(kl_divergence(6.0, 3.0) == doctest::Approx(kl_divergence(2.0, 1.0)).epsilon(1e-14));
    double prev = 0.0;
    for (double r = 0.1; r <= 10.0; r += 0.1) {
        const double kl = kl_divergence(r, 1.0);
        CHECK(kl > prev);
        prev = kl;
    }
    CHECK_THROWS_AS(kl_divergence(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(kl_divergence(1.0, 0.0), std::invalid_argument);
}
