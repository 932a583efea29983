#include "ralp/type2_detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ralp {

namespace {

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Posteriors live in the open interval (0, 1); keep them there even when
// the logit saturates in floating point, so downstream cavity downdates
// never see an exactly unit weight.
double clamp_open_unit(double x) {
    const double hi = std::nextafter(1.0, 0.0);
    return std::clamp(x, 1e-300, hi);
}

// Rebuilds sigma_inv and log_det from mu by Cholesky factorization.
// Asserts the model floor lambda_min(Sigma) >= n0 / 2 and (optionally)
// that the incrementally tracked log-determinant has not drifted.
void factorize(CaviState& state, const MmvProblem& problem, bool check_drift) {
    const auto d = problem.phi.rows();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
    const Eigen::MatrixXcd scaled =
        problem.phi * state.mu.cast<std::complex<double>>().asDiagonal();
    Eigen::MatrixXcd sigma = problem.alpha * (scaled * problem.phi.adjoint());
    sigma += problem.n0 * id;
    sigma = 0.5 * (sigma + sigma.adjoint().eval());  // kill roundoff skew

    const Eigen::LLT<Eigen::MatrixXcd> margin((sigma - 0.5 * problem.n0 * id).eval());
    if (margin.info() != Eigen::Success)
        throw std::runtime_error("cavi: covariance lost its n0/2 eigenvalue floor");

    const Eigen::LLT<Eigen::MatrixXcd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("cavi: covariance factorization failed");
    const double fresh_log_det =
        2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
    if (check_drift && std::abs(state.log_det - fresh_log_det) >
                           1e-6 * std::max(1.0, std::abs(fresh_log_det)))
        throw std::runtime_error("cavi: tracked log-determinant drifted from refactorization");

    state.sigma_inv = llt.solve(id);
    state.log_det = fresh_log_det;
}

void check_problem(const MmvProblem& problem) {
    if (problem.phi.rows() < 1 || problem.phi.cols() < 1)
        throw std::invalid_argument("cavi: empty sensing matrix");
    if (problem.z.rows() != problem.phi.rows())
        throw std::invalid_argument("cavi: measurement rows do not match the sensing matrix");
    if (!(problem.alpha > 0.0) || !(problem.n0 > 0.0))
        throw std::invalid_argument("cavi: alpha and n0 must be > 0");
}

void check_prior(double prior_active) {
    if (!(prior_active > 0.0) || !(prior_active < 1.0))
        throw std::invalid_argument("cavi: prior_active must be in (0, 1)");
}

}  // namespace

MmvProblem build_mmv(const ProjectionReport& report, const PreamblePool& pool,
                     double sigma_s_sq, double p2, double n0) {
    if (report.residual.cols() != pool.n())
        throw std::invalid_argument("build_mmv: residual length does not match the pool");
    if (!(sigma_s_sq > 0.0) || !(p2 > 0.0) || !(n0 > 0.0))
        throw std::invalid_argument("build_mmv: sigma_s_sq, p2 and n0 must be > 0");

    std::vector<char> removed(static_cast<std::size_t>(pool.l1_size()), 0);
    for (int l : report.detected) {
        if (l < 0 || l >= pool.l1_size())
            throw std::invalid_argument("build_mmv: detected index outside layer 1");
        removed[static_cast<std::size_t>(l)] = 1;
    }
    std::vector<int> kept;
    for (int l = 0; l < pool.l1_size(); ++l)
        if (!removed[static_cast<std::size_t>(l)]) kept.push_back(l);
    if (kept.empty())
        throw std::invalid_argument("build_mmv: every layer-1 direction was cancelled; "
                                    "no measurement space remains");

    Eigen::MatrixXcd basis(pool.n(), static_cast<int>(kept.size()));
    for (int j = 0; j < static_cast<int>(kept.size()); ++j)
        basis.col(j) = pool.vector(kept[static_cast<std::size_t>(j)]);

    MmvProblem problem;
    problem.phi = basis.adjoint() * pool.l2_block();
    problem.z = basis.adjoint() * report.residual.adjoint();
    problem.alpha = p2 * sigma_s_sq;
    problem.n0 = n0;
    return problem;
}

double sigma_s_sq(double lambda2, int l2_size) {
    if (lambda2 < 0.0) throw std::invalid_argument("sigma_s_sq: lambda2 must be >= 0");
    if (l2_size < 1) throw std::invalid_argument("sigma_s_sq: l2_size must be >= 1");
    const double x = lambda2 / static_cast<double>(l2_size);
    if (x == 0.0) return 1.0;
    return x / (-std::expm1(-x));
}

CaviState cavi_init(const MmvProblem& problem, double prior_active) {
    check_problem(problem);
    check_prior(prior_active);
    CaviState state;
    state.mu = Eigen::VectorXd::Constant(problem.phi.cols(), prior_active);
    factorize(state, problem, /*check_drift=*/false);
    return state;
}

void cavi_sweep(CaviState& state, const MmvProblem& problem, double prior_active) {
    check_problem(problem);
    check_prior(prior_active);
    if (state.mu.size() != problem.phi.cols() || state.sigma_inv.rows() != problem.phi.rows())
        throw std::invalid_argument("cavi_sweep: state does not match the problem");

    const double logit_prior = std::log(prior_active) - std::log1p(-prior_active);
    const double alpha = problem.alpha;
    const double m = static_cast<double>(problem.z.cols());
    Eigen::VectorXcd u(problem.phi.rows());
    Eigen::VectorXcd zu(problem.z.cols());

    for (Eigen::Index l = 0; l < problem.phi.cols(); ++l) {
        const auto phi_l = problem.phi.col(l);
        u.noalias() = state.sigma_inv * phi_l;
        const double c = std::max(0.0, phi_l.dot(u).real());  // phi^H Sigma^-1 phi
        const double w = alpha * state.mu[l];
        const double den = 1.0 - w * c;
        if (den <= 1e-12)
            throw std::runtime_error(
                "cavi_sweep: cavity downdate breakdown (1 - w*c = " + std::to_string(den) +
                ") at column " + std::to_string(l) + ", sweep " +
                std::to_string(state.sweeps_done + 1));

        // Cavity quantities with column l's own contribution removed:
        // q = phi^H Sigma_-l^-1 phi, r = ||Z^H Sigma_-l^-1 phi||^2.
        const double q = c / den;
        zu.noalias() = problem.z.adjoint() * u;
        const double r = zu.squaredNorm() / (den * den);

        const double logit = logit_prior - m * std::log1p(alpha * q) +
                             alpha * r / (1.0 + alpha * q);
        const double mu_new = clamp_open_unit(stable_sigmoid(logit));
        const double w_new = alpha * mu_new;

        // Combined downdate-plus-update of Sigma^-1: both rank-one terms
        // share the direction u = Sigma^-1 phi.
        const double gamma = 1.0 / den;
        const double coeff = w * gamma - w_new * gamma * gamma / (1.0 + w_new * q);
        state.sigma_inv.noalias() += coeff * (u * u.adjoint());
        state.log_det += std::log(den) + std::log1p(w_new * q);
        state.mu[l] = mu_new;
    }
    ++state.sweeps_done;
    factorize(state, problem, /*check_drift=*/true);
}

Type2Decision cavi_detect(const MmvProblem& problem, double prior_active, int sweeps,
                          std::optional<int> k2) {
    if (sweeps < 0) throw std::invalid_argument("cavi_detect: sweeps must be >= 0");
    CaviState state = cavi_init(problem, prior_active);
    for (int s = 0; s < sweeps; ++s) cavi_sweep(state, problem, prior_active);

    Type2Decision decision;
    decision.posteriors = state.mu;
    const int l2 = static_cast<int>(state.mu.size());
    if (k2.has_value()) {
        if (*k2 < 0 || *k2 > l2)
            throw std::invalid_argument("cavi_detect: k2 must be in [0, l2_size]");
        std::vector<int> order(static_cast<std::size_t>(l2));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return state.mu[a] > state.mu[b]; });
        decision.detected.assign(order.begin(), order.begin() + *k2);
        std::sort(decision.detected.begin(), decision.detected.end());
    } else {
        for (int l = 0; l < l2; ++l)
            if (state.mu[l] > 0.5) decision.detected.push_back(l);
    }
    return decision;
}

}  // namespace ralp
