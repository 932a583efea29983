#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ralp/theory.hpp"
#include "ralp/type1_detector.hpp"

using namespace ralp;

namespace {

// Two-sided Kolmogorov-Smirnov statistic of `samples` against `cdf`.
template <typename Cdf>
double ks_statistic(std::vector<double> samples, Cdf cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - f));
    }
    return d;
}

}  // namespace

TEST_CASE("correlate picks out the active preamble exactly") {
    const auto pool = PreamblePool::build(13, 65);
    Rng rng(11);
    Eigen::VectorXcd fading(6);
    for (int a = 0; a < 6; ++a) fading[a] = rng.complex_normal();
    const double p = 7.3;
    const ReceivedSignal y = std::sqrt(p) * fading * pool.vector(4).adjoint();
    const Eigen::MatrixXcd g = correlate(y, pool);
    REQUIRE(g.rows() == 6);
    REQUIRE(g.cols() == 13);
    CHECK((g.col(4) - std::sqrt(p) * fading).cwiseAbs().maxCoeff() < 1e-12);
    for (int l = 0; l < 13; ++l) {
        if (l == 4) continue;
        CHECK(g.col(l).norm() < 1e-12);  // layer 1 is orthonormal
    }
}

TEST_CASE("layer-2 leakage through the correlator has magnitude 1/sqrt(n)") {
    const auto pool = PreamblePool::build(13, 65);
    Rng rng(12);
    Eigen::VectorXcd fading(4);
    for (int a = 0; a < 4; ++a) fading[a] = rng.complex_normal();
    const ReceivedSignal y = fading * pool.vector(13 + 20).adjoint();
    const Eigen::MatrixXcd g = correlate(y, pool);
    const double expected = fading.squaredNorm() / 13.0;
    for (int l = 0; l < 13; ++l)
        CHECK(g.col(l).squaredNorm() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("correlate validates the signal length") {
    const auto pool = PreamblePool::build(13, 65);
    const ReceivedSignal y = ReceivedSignal::Zero(4, 12);
    CHECK_THROWS_AS(correlate(y, pool), std::invalid_argument);
}

TEST_CASE("classify maps energies to verdicts") {
    // Columns with squared norms 0.5, 2 and 10 against thresholds (1, 5).
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(1, 3);
    g(0, 0) = std::sqrt(0.5);
    g(0, 1) = std::sqrt(2.0);
    g(0, 2) = std::sqrt(10.0);
    const Type1Decision d = classify(g, Thresholds{1.0, 5.0});
    CHECK(d.statistics[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(d.statistics[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(d.statistics[2] == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(d.verdicts[0] == Verdict::Idle);
    CHECK(d.verdicts[1] == Verdict::Single);
    CHECK(d.verdicts[2] == Verdict::Collision);
    CHECK(d.detected == std::vector<int>{1, 2});
    CHECK(d.thresholds.activity == 1.0);
}

TEST_CASE("thresholds validation") {
    CHECK_THROWS_AS((Thresholds{0.0, 1.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((Thresholds{2.0, 2.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((Thresholds{2.0, 1.0}).validate(), std::invalid_argument);
    const Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(1, 3);
    CHECK_THROWS_AS(classify(g, Thresholds{-1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("verdicts are invariant under joint scaling") {
    Rng rng(77);
    Eigen::MatrixXcd g(5, 13);
    for (int c = 0; c < 13; ++c)
        for (int r = 0; r < 5; ++r) g(r, c) = 2.0 * rng.complex_normal();
    const Thresholds base{4.0, 11.0};
    const double s = 3.7;
    const Type1Decision d1 = classify(g, base);
    const Type1Decision d2 = classify(s * g, Thresholds{s * s * 4.0, s * s * 11.0});
    CHECK(d1.verdicts == d2.verdicts);
    CHECK(d1.detected == d2.detected);
}

TEST_CASE("idle statistic follows Gamma(m, i2) exactly") {
    // Layer-2 interferers plus noise only; every layer-1 preamble is idle
    // and its energy should be Gamma(m, k2 p2 / n + n0) distributed.
    const auto pool = PreamblePool::build(13, 65);
    ChannelConfig cfg;
    cfg.m = 10;
    cfg.p1 = std::pow(10.0, 1.2);
    cfg.p2 = std::pow(10.0, 0.6);
    cfg.n0 = 1.0;
    cfg.k1 = 0;
    cfg.k2 = 10;
    const double i2 = interference_power(cfg.k2, cfg.p2, 13, cfg.n0);
    Rng rng(1001);
    std::vector<double> samples;
    samples.reserve(10000);
    const Thresholds thr{1.0, 2.0};  // irrelevant; we only read statistics
    for (int t = 0; t < 10000; ++t) {
        const ReceivedSignal y = synthesize(pool, draw_activity(pool, cfg, rng), cfg, rng);
        const Type1Decision d = classify(correlate(y, pool), thr);
        samples.push_back(d.statistics[4]);
    }
    const double d = ks_statistic(samples, [&](double z) { return gamma_cdf(z, cfg.m, i2); });
    CHECK(d < 1.6276 / std::sqrt(10000.0));  // 1% critical value
}

TEST_CASE("single-device statistic follows Gamma(m, p1 + i2) exactly") {
    const auto pool = PreamblePool::build(13, 65);
    ChannelConfig cfg;
    cfg.m = 10;
    cfg.p1 = std::pow(10.0, 1.2);
    cfg.p2 = std::pow(10.0, 0.6);
    cfg.n0 = 1.0;
    cfg.k1 = 1;
    cfg.k2 = 10;
    const double i2 = interference_power(cfg.k2, cfg.p2, 13, cfg.n0);
    Rng rng(1002);
    std::vector<double> samples;
    samples.reserve(10000);
    const Thresholds thr{1.0, 2.0};
    long misses = 0;
    const double eps = 0.05;
    const double tau = calibrate_activity_threshold(cfg.m, eps, cfg.p1, i2);
    for (int t = 0; t < 10000; ++t) {
        const ActivityMap map = draw_activity(pool, cfg, rng);
        const ReceivedSignal y = synthesize(pool, map, cfg, rng);
        const Type1Decision d = classify(correlate(y, pool), thr);
        const double z = d.statistics[map.type1_choices[0]];
        samples.push_back(z);
        misses += z < tau;
    }
    const double d =
        ks_statistic(samples, [&](double z) { return gamma_cdf(z, cfg.m, cfg.p1 + i2); });
    CHECK(d < 1.6276 / std::sqrt(10000.0));
    // The calibrated threshold delivers the designed miss rate.
    CHECK(static_cast<double>(misses) / 10000.0 == doctest::Approx(eps).epsilon(0.2));
}
