#include "ralp/type1_detector.hpp"

#include <stdexcept>

namespace ralp {

void Thresholds::validate() const {
    if (!(activity > 0.0) || !(collision > activity))
        throw std::invalid_argument("Thresholds: need 0 < activity < collision");
}

Eigen::MatrixXcd correlate(const ReceivedSignal& y, const PreamblePool& pool) {
    if (y.cols() != pool.n())
        throw std::invalid_argument("correlate: signal length does not match the pool");
    return y * pool.l1_block();
}

Type1Decision classify(const Eigen::MatrixXcd& correlator_output, const Thresholds& thresholds) {
    thresholds.validate();
    const int n = static_cast<int>(correlator_output.cols());
    Type1Decision decision;
    decision.thresholds = thresholds;
    decision.statistics.resize(n);
    decision.verdicts.resize(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        const double z = correlator_output.col(l).squaredNorm();
        decision.statistics[l] = z;
        Verdict v = Verdict::Single;
        if (z < thresholds.activity)
            v = Verdict::Idle;
        else if (z > thresholds.collision)
            v = Verdict::Collision;
        decision.verdicts[static_cast<std::size_t>(l)] = v;
        if (v != Verdict::Idle) decision.detected.push_back(l);
    }
    return decision;
}

}  // namespace ralp
