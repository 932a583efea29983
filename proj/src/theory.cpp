#include "ralp/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ralp {

namespace {

// P(Poisson(nu) <= m - 1) as a finite sum.  Terms are generated by stable
// ratio recurrences from the largest term outward (the Poisson pmf is
// unimodal) and accumulated with Neumaier compensation, keeping the
// absolute error at a few ulp even when m is large and the terms span many
// orders of magnitude.
double poisson_below(int m, double nu) {
    if (nu == 0.0) return 1.0;
    const int peak = std::min(m - 1, static_cast<int>(nu));
    const double log_peak =
        -nu + static_cast<double>(peak) * std::log(nu) - std::lgamma(static_cast<double>(peak) + 1.0);
    if (log_peak < -745.0) return 0.0;  // whole sum underflows

    double sum = 0.0;
    double comp = 0.0;
    auto add = [&](double term) {
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    };

    double t_down = std::exp(log_peak);  // term at index `down`
    int down = peak;
    double t_up = down + 1 <= m - 1 ? t_down * nu / (down + 1) : 0.0;
    int up = peak + 1;
    while (down >= 0 || up <= m - 1) {
        const bool take_down = down >= 0 && (up > m - 1 || t_down >= t_up);
        if (take_down) {
            add(t_down);
            t_down *= static_cast<double>(down) / nu;  // ratio to index down-1
            --down;
        } else {
            add(t_up);
            ++up;
            t_up *= nu / static_cast<double>(up);
        }
    }
    return sum + comp;
}

}  // namespace

double gamma_cdf(double z, int shape, double scale) {
    if (shape < 1) throw std::invalid_argument("gamma_cdf: shape must be a positive integer");
    if (!(scale > 0.0)) throw std::invalid_argument("gamma_cdf: scale must be > 0");
    if (z <= 0.0) return 0.0;
    const double cdf = 1.0 - poisson_below(shape, z / scale);
    return std::clamp(cdf, 0.0, 1.0);
}

double interference_power(int k2, double p2, int n, double n0) {
    if (k2 < 0) throw std::invalid_argument("interference_power: k2 must be >= 0");
    if (k2 > 0 && !(p2 > 0.0)) throw std::invalid_argument("interference_power: p2 must be > 0");
    if (n < 1) throw std::invalid_argument("interference_power: n must be >= 1");
    if (!(n0 > 0.0)) throw std::invalid_argument("interference_power: n0 must be > 0");
    return static_cast<double>(k2) * p2 / static_cast<double>(n) + n0;
}

double poisson_tail_mean(int m, double tail) {
    if (m < 1) throw std::invalid_argument("poisson_tail_mean: m must be >= 1");
    if (!(tail > 0.0) || !(tail < 1.0))
        throw std::invalid_argument("poisson_tail_mean: tail must be in (0, 1)");
    auto tail_at = [m](double nu) { return 1.0 - poisson_below(m, nu); };

    double lo = 0.0;
    double hi = static_cast<double>(m);
    while (tail_at(hi) < tail) {
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("poisson_tail_mean: failed to bracket");
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (tail_at(mid) < tail ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double calibrate_activity_threshold(int m, double eps, double p1, double i2) {
    if (!(p1 > 0.0) || !(i2 > 0.0))
        throw std::invalid_argument("calibrate_activity_threshold: p1 and i2 must be > 0");
    return poisson_tail_mean(m, eps) * (p1 + i2);
}

double calibrate_collision_threshold(int m, double eps_c, double p1, double i2) {
    if (!(p1 > 0.0) || !(i2 > 0.0))
        throw std::invalid_argument("calibrate_collision_threshold: p1 and i2 must be > 0");
    return poisson_tail_mean(m, 1.0 - eps_c) * (p1 + i2);
}

ErrorBudget error_budget(double tau_activity, double tau_collision, const TheoryParams& params,
                         int n) {
    if (!(tau_activity > 0.0) || !(tau_collision > tau_activity))
        throw std::invalid_argument("error_budget: need 0 < tau_activity < tau_collision");
    if (params.m < 1) throw std::invalid_argument("error_budget: m must be >= 1");
    if (!(params.p1 > 0.0)) throw std::invalid_argument("error_budget: p1 must be > 0");
    if (params.collision_multiplicity < 2)
        throw std::invalid_argument("error_budget: collision_multiplicity must be >= 2");

    const double i2 = interference_power(params.k2, params.p2, n, params.n0);
    const double theta_idle = i2;
    const double theta_single = params.p1 + i2;
    const double theta_coll = params.collision_multiplicity * params.p1 + i2;

    ErrorBudget out;
    out.missed_detection = gamma_cdf(tau_activity, params.m, theta_single);
    out.false_alarm = 1.0 - gamma_cdf(tau_activity, params.m, theta_idle);
    out.single_as_collision = 1.0 - gamma_cdf(tau_collision, params.m, theta_single);
    out.collision_as_single =
        gamma_cdf(tau_collision, params.m, theta_coll) - gamma_cdf(tau_activity, params.m, theta_coll);
    return out;
}

double kl_divergence(double p1, double i2) {
    if (!(p1 > 0.0) || !(i2 > 0.0))
        throw std::invalid_argument("kl_divergence: p1 and i2 must be > 0");
    const double r = p1 / i2;
    return r - std::log1p(r);
}

}  // namespace ralp
