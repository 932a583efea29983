#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "ralp/preamble_pool.hpp"
#include "ralp/sic.hpp"

namespace ralp {

// Multiple-measurement sparse recovery problem for the layer-2 preambles,
// expressed in the coordinates that survive layer-1 cancellation.  With d
// undetected layer-1 directions,
//
//     phi = C_u^H C2          (d x l2,  sensing matrix)
//     z   = C_u^H residual^H  (d x m,   one column per antenna)
//
// and each layer-2 column carries an i.i.d. CN(0, alpha) row of symbols,
// alpha = p2 * sigma_s_sq, against CN(0, n0) noise.
struct MmvProblem {
    Eigen::MatrixXcd phi;
    Eigen::MatrixXcd z;
    double alpha = 1.0;
    double n0 = 1.0;
};

// Projects the residual onto the undetected layer-1 directions.  Throws
// std::invalid_argument if the report removed every direction.
MmvProblem build_mmv(const ProjectionReport& report, const PreamblePool& pool,
                     double sigma_s_sq, double p2, double n0);

// Mean symbol energy of a layer-2 device given that at least one device
// picked its preamble, when the number of contenders per preamble is
// Poisson with mean lambda2 / l2_size:  x / (1 - e^-x) at x = lambda2 /
// l2_size, which tends to 1 as the pool becomes lightly loaded.
double sigma_s_sq(double lambda2, int l2_size);

// Variational state over the layer-2 support.  mu holds the per-preamble
// activity posteriors; sigma_inv and log_det track the inverse and
// log-determinant of the marginal covariance
//
//     Sigma(mu) = n0 I + alpha * phi diag(mu) phi^H.
struct CaviState {
    Eigen::VectorXd mu;
    Eigen::MatrixXcd sigma_inv;
    double log_det = 0.0;
    int sweeps_done = 0;
};

struct Type2Decision {
    std::vector<int> detected;    // ascending layer-2 indices
    Eigen::VectorXd posteriors;   // mu after the final sweep
};

// Initializes mu to the prior activity probability and factorizes.
CaviState cavi_init(const MmvProblem& problem, double prior_active);

// One coordinate-ascent pass over all layer-2 columns.  Each column's
// posterior is refreshed against the cavity covariance (its own
// contribution removed) via rank-one Sherman-Morrison updates of
// sigma_inv; the state is re-factorized from scratch at the end of the
// pass, which also asserts that Sigma keeps a minimum eigenvalue of at
// least n0 / 2 and that the tracked log-determinant has not drifted.
void cavi_sweep(CaviState& state, const MmvProblem& problem, double prior_active);

// Runs `sweeps` coordinate-ascent passes from the prior and selects the
// support: the k2 largest posteriors when k2 is given (ties broken toward
// the lower index), otherwise every posterior above 1/2.
Type2Decision cavi_detect(const MmvProblem& problem, double prior_active, int sweeps,
                          std::optional<int> k2 = std::nullopt);

}  // namespace ralp
