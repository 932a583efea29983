#include "ralp/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ralp {

void ChannelConfig::validate(const PreamblePool& pool) const {
    if (m < 1) throw std::invalid_argument("ChannelConfig: m must be >= 1");
    if (!(p2 > 0.0) || !(p1 > p2))
        throw std::invalid_argument("ChannelConfig: need p1 > p2 > 0 (power-domain layering)");
    if (!(n0 > 0.0)) throw std::invalid_argument("ChannelConfig: n0 must be > 0");
    if (k1 < 0 || k1 > pool.l1_size())
        throw std::invalid_argument("ChannelConfig: k1 must be in [0, " +
                                    std::to_string(pool.l1_size()) + "]");
    if (k2 < 0 || k2 > pool.l2_size())
        throw std::invalid_argument("ChannelConfig: k2 must be in [0, " +
                                    std::to_string(pool.l2_size()) + "]");
}

ActivityMap draw_activity(const PreamblePool& pool, const ChannelConfig& config, Rng& rng) {
    config.validate(pool);
    ActivityMap map;
    map.type1_choices = rng.sample_distinct(config.k1, pool.l1_size());
    map.type2_choices = rng.sample_distinct(config.k2, pool.l2_size());
    map.type1_fading.resize(config.m, config.k1);
    for (int j = 0; j < config.k1; ++j)
        for (int a = 0; a < config.m; ++a) map.type1_fading(a, j) = rng.complex_normal();
    map.type2_fading.resize(config.m, config.k2);
    for (int j = 0; j < config.k2; ++j)
        for (int a = 0; a < config.m; ++a) map.type2_fading(a, j) = rng.complex_normal();
    return map;
}

ReceivedSignal synthesize(const PreamblePool& pool, const ActivityMap& activity,
                          const ChannelConfig& config, Rng& rng) {
    config.validate(pool);
    if (static_cast<int>(activity.type1_choices.size()) != config.k1 ||
        static_cast<int>(activity.type2_choices.size()) != config.k2 ||
        activity.type1_fading.rows() != config.m || activity.type2_fading.rows() != config.m)
        throw std::invalid_argument("synthesize: activity map does not match config");

    ReceivedSignal y = ReceivedSignal::Zero(config.m, pool.n());
    const double a1 = std::sqrt(config.p1);
    const double a2 = std::sqrt(config.p2);
    for (int j = 0; j < config.k1; ++j) {
        y.noalias() +=
            a1 * activity.type1_fading.col(j) * pool.vector(activity.type1_choices[j]).adjoint();
    }
    for (int t = 0; t < config.k2; ++t) {
        const int col = pool.l1_size() + activity.type2_choices[t];
        y.noalias() += a2 * activity.type2_fading.col(t) * pool.vector(col).adjoint();
    }
    const double sigma = std::sqrt(config.n0);
    for (int c = 0; c < y.cols(); ++c)
        for (int r = 0; r < y.rows(); ++r) y(r, c) += sigma * rng.complex_normal();
    return y;
}

}  // namespace ralp
