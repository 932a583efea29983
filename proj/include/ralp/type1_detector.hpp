#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ralp/channel.hpp"
#include "ralp/preamble_pool.hpp"

namespace ralp {

// Per-preamble verdict of the energy detector.
enum class Verdict { Idle, Single, Collision };

// Decision thresholds on the correlator energy Z_l = ||Y x_l||^2:
// Z < activity -> Idle, Z > collision -> Collision, otherwise Single.
struct Thresholds {
    double activity = 0.0;
    double collision = 0.0;

    // Throws std::invalid_argument unless 0 < activity < collision.
    void validate() const;
};

struct Type1Decision {
    Eigen::VectorXd statistics;     // Z_l for each layer-1 preamble
    std::vector<Verdict> verdicts;  // same indexing
    std::vector<int> detected;      // ascending indices with verdict != Idle
    Thresholds thresholds;
};

// Matched-filter bank against the layer-1 preambles: returns the m x n
// matrix G with column l equal to Y x_l.
Eigen::MatrixXcd correlate(const ReceivedSignal& y, const PreamblePool& pool);

// Applies the two-threshold rule to each correlator column.
Type1Decision classify(const Eigen::MatrixXcd& correlator_output, const Thresholds& thresholds);

}  // namespace ralp
