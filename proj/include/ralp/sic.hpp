#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ralp/channel.hpp"
#include "ralp/preamble_pool.hpp"
#include "ralp/rng.hpp"

namespace ralp {

// Result of cancelling the detected layer-1 preambles out of the received
// block.  Because layer 1 is orthonormal the per-preamble rank-one
// subtractions compose to the exact orthogonal projector onto the
// complement of the detected subspace.
struct ProjectionReport {
    ReceivedSignal residual;    // m x n, annihilates every removed preamble
    std::vector<int> detected;  // ascending layer-1 indices removed
    int removed_rank = 0;       // == detected.size()
};

// residual = y * (I - sum_l x_l x_l^H) over the detected layer-1 indices.
// Indices must be distinct and in [0, pool.l1_size()).
ProjectionReport project_out(const ReceivedSignal& y, const std::vector<int>& detected,
                             const PreamblePool& pool);

// Stage-1 error injected before cancellation, for error-propagation
// studies.
enum class InjectedError {
    ForcedFalseAlarm,       // add one idle layer-1 preamble to the set
    ForcedMissedDetection,  // drop one genuinely active preamble from the set
};

// Returns a copy of `detected` with exactly one injected error, sampled
// uniformly over the eligible preambles.  `active_type1` is the ground
// truth.  Throws std::invalid_argument when no eligible preamble exists
// (nothing idle left to add, or no true detection to drop).
std::vector<int> inject_detection_error(const std::vector<int>& detected,
                                        const std::vector<int>& active_type1, int l1_size,
                                        InjectedError mode, Rng& rng);

}  // namespace ralp
