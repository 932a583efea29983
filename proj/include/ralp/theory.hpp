#pragma once

namespace ralp {

// Closed-form statistics of the layer-1 energy detector.  With m antennas
// and every off-target preamble pair having squared coherence 1/n, the test
// statistic Z_l is exactly Gamma-distributed:
//
//     idle:            Z ~ Gamma(m, i2)
//     single device:   Z ~ Gamma(m, p1 + i2)
//     c-fold collision:Z ~ Gamma(m, c*p1 + i2)
//
// where i2 = k2*p2/n + n0 aggregates layer-2 leakage plus noise.

// CDF of Gamma(shape, scale) at z, shape a positive integer.  Evaluated
// through the Poisson-tail identity P(Gamma <= z) = P(Poisson(z/scale) >=
// shape); the finite Poisson sum is accumulated from its largest term
// outward with compensated summation, so the result is accurate to a few
// ulp for every (z, shape) used here.
double gamma_cdf(double z, int shape, double scale);

// Effective per-sample interference-plus-noise power seen by the layer-1
// correlator: k2*p2/n + n0.
double interference_power(int k2, double p2, int n, double n0);

// Solves P(Poisson(nu) >= m) = tail for nu by bisection.  tail in (0, 1).
double poisson_tail_mean(int m, double tail);

// Activity threshold with idle-side margin chosen so a single active
// device is missed with probability exactly eps:
//     P(Z < tau | single) = eps  =>  tau = poisson_tail_mean(m, eps) * (p1 + i2).
double calibrate_activity_threshold(int m, double eps, double p1, double i2);

// Collision threshold such that a single device is escalated to a
// collision verdict with probability eps_c:
//     P(Z > tau | single) = eps_c.
double calibrate_collision_threshold(int m, double eps_c, double p1, double i2);

struct TheoryParams {
    int m = 1;
    double p1 = 1.0;
    double p2 = 1.0;
    double n0 = 1.0;
    int k2 = 0;
    int collision_multiplicity = 2;  // devices assumed in a collision, >= 2
};

// The four single-preamble error probabilities of the two-threshold rule.
struct ErrorBudget {
    double missed_detection;      // active (single) read as idle
    double false_alarm;           // idle read as active
    double single_as_collision;   // single escalated to collision
    double collision_as_single;   // collision de-escalated to single
};

ErrorBudget error_budget(double tau_activity, double tau_collision,
                         const TheoryParams& params, int n);

// Kullback-Leibler divergence rate between the single-device and idle
// statistics per antenna: with r = p1/i2 this is r - ln(1 + r).  It is the
// asymptotic (large-m) exponential decay rate of the false-alarm
// probability at fixed miss level.
double kl_divergence(double p1, double i2);

}  // namespace ralp
