#include "ralp/sic.hpp"

#include <algorithm>
#include <stdexcept>

namespace ralp {

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end())
        throw std::invalid_argument("project_out: detected indices must be distinct");
    return v;
}

}  // namespace

ProjectionReport project_out(const ReceivedSignal& y, const std::vector<int>& detected,
                             const PreamblePool& pool) {
    if (y.cols() != pool.n())
        throw std::invalid_argument("project_out: signal length does not match the pool");
    ProjectionReport report;
    report.detected = sorted_unique(detected);
    report.residual = y;
    Eigen::VectorXcd g(y.rows());
    for (int l : report.detected) {
        if (l < 0 || l >= pool.l1_size())
            throw std::invalid_argument("project_out: index outside layer 1");
        const auto v = pool.vector(l);
        // Layer 1 is orthonormal, so removing each direction in turn
        // composes to the joint orthogonal projector.
        g.noalias() = report.residual * v;
        report.residual.noalias() -= g * v.adjoint();
    }
    report.removed_rank = static_cast<int>(report.detected.size());
    return report;
}

std::vector<int> inject_detection_error(const std::vector<int>& detected,
                                        const std::vector<int>& active_type1, int l1_size,
                                        InjectedError mode, Rng& rng) {
    std::vector<char> in_detected(static_cast<std::size_t>(l1_size), 0);
    for (int l : detected) {
        if (l < 0 || l >= l1_size)
            throw std::invalid_argument("inject_detection_error: index outside layer 1");
        in_detected[static_cast<std::size_t>(l)] = 1;
    }
    std::vector<char> is_active(static_cast<std::size_t>(l1_size), 0);
    for (int l : active_type1) {
        if (l < 0 || l >= l1_size)
            throw std::invalid_argument("inject_detection_error: active index outside layer 1");
        is_active[static_cast<std::size_t>(l)] = 1;
    }

    std::vector<int> eligible;
    for (int l = 0; l < l1_size; ++l) {
        const bool det = in_detected[static_cast<std::size_t>(l)];
        const bool act = is_active[static_cast<std::size_t>(l)];
        if (mode == InjectedError::ForcedFalseAlarm ? (!det && !act) : (det && act))
            eligible.push_back(l);
    }
    if (eligible.empty())
        throw std::invalid_argument("inject_detection_error: no eligible preamble to perturb");

    const int pick = eligible[static_cast<std::size_t>(rng.uniform_int(
        static_cast<int>(eligible.size())))];
    std::vector<int> out;
    out.reserve(detected.size() + 1);
    for (int l = 0; l < l1_size; ++l) {
        const bool det = in_detected[static_cast<std::size_t>(l)];
        if (mode == InjectedError::ForcedFalseAlarm ? (det || l == pick) : (det && l != pick))
            out.push_back(l);
    }
    return out;
}

}  // namespace ralp
