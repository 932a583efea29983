#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ralp/preamble_pool.hpp"
#include "ralp/rng.hpp"

namespace ralp {

// Received baseband block: m antennas by n symbols, so each active device
// contributes the rank-one term sqrt(power) * fading * preamble^H.
using ReceivedSignal = Eigen::MatrixXcd;

// Static uplink parameters for one synthesis call.  Powers are linear
// (not dB); n0 is the total noise variance per complex sample.
struct ChannelConfig {
    int m = 1;        // receive antennas
    double p1 = 1.0;  // layer-1 (high-power class) receive power
    double p2 = 1.0;  // layer-2 (low-power class) receive power
    double n0 = 1.0;  // noise variance per entry
    int k1 = 0;       // active layer-1 devices
    int k2 = 0;       // active layer-2 devices

    // Throws std::invalid_argument unless m >= 1, p1 > p2 > 0, n0 > 0 and
    // the device counts fit the pool's two layers.
    void validate(const PreamblePool& pool) const;
};

// One realization of device activity: which preambles are in use and the
// fading vector of each device.  Layer-1 choices index [0, n); layer-2
// choices index [0, l2_size) within the layer-2 block.
struct ActivityMap {
    std::vector<int> type1_choices;
    std::vector<int> type2_choices;
    Eigen::MatrixXcd type1_fading;  // m x k1, iid CN(0,1) entries
    Eigen::MatrixXcd type2_fading;  // m x k2
};

// Draws preamble choices (distinct within each layer, i.e. no intra-class
// preamble collisions) and fading.  Draw order is fixed: layer-1 choices,
// layer-2 choices, layer-1 fading column-major, layer-2 fading
// column-major, so a seed pins the whole map.
ActivityMap draw_activity(const PreamblePool& pool, const ChannelConfig& config, Rng& rng);

// Superimposes all active devices plus noise:
//
//     Y = sum_j sqrt(p1) c_j s_j^H + sum_t sqrt(p2) c_t s_t^H + W,
//
// W iid CN(0, n0).  Noise is drawn column-major after the activity map has
// been consumed.
ReceivedSignal synthesize(const PreamblePool& pool, const ActivityMap& activity,
                          const ChannelConfig& config, Rng& rng);

}  // namespace ralp
