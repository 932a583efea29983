#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ralp/channel.hpp"
#include "ralp/preamble_pool.hpp"
#include "ralp/sic.hpp"
#include "ralp/type1_detector.hpp"

namespace ralp {

enum class SweepVariable { K2, M, P1Db, P2Db, L2Size };

enum class ErrorInjection { None, ForcedFalseAlarm, ForcedMissedDetection };

// Full description of one Monte Carlo experiment: a base operating point,
// an optional sweep over one variable, and the trial/seed bookkeeping.
// Powers are linear here; the config file layer converts *_db keys.
struct ExperimentConfig {
    int n = 13;
    int l2_size = 65;
    int m = 10;
    double p1 = 15.848931924611133;  // 12 dB
    double p2 = 3.9810717055349722;  // 6 dB
    double n0 = 1.0;
    int k1 = 2;
    int k2 = 5;

    double eps = 1e-2;    // calibrated miss level for the activity threshold
    double eps_c = 1e-3;  // single-to-collision escalation level
    int cavi_sweeps = 5;
    bool run_type2 = true;
    // When set, stage 2 starts from the true layer-1 support instead of the
    // detector output, isolating layer-2 behaviour from organic stage-1
    // errors; injected errors then perturb that ideal set.
    bool perfect_sic = false;
    ErrorInjection injection = ErrorInjection::None;

    SweepVariable sweep_variable = SweepVariable::K2;
    std::vector<double> sweep_values;  // empty -> single point at the base values

    long trials = 10000;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 -> hardware concurrency
    std::string label;

    // Throws std::invalid_argument on an inconsistent setup (bad pool
    // dimensions, non-integral sweep values for integer variables, ...).
    void validate() const;
};

// Everything precomputed for one grid point: the pool, the resolved
// channel, calibrated thresholds and the layer-2 model constants.
struct PointRuntime {
    ExperimentConfig config;  // sweep variable substituted
    PreamblePool pool;
    ChannelConfig channel;
    Thresholds thresholds;
    double i2 = 0.0;
    double sigma_s = 1.0;     // layer-2 symbol energy given activity
    double prior = 0.0;       // layer-2 per-preamble activity prior
    double theory_md = 0.0;   // closed-form layer-1 miss probability
    double theory_fa = 0.0;   // closed-form layer-1 false-alarm probability
};

PointRuntime prepare_point(const ExperimentConfig& config, double sweep_value);

// Error counters accumulated over trials.  Layer-1 events are counted per
// preamble (k1 active and n - k1 idle observations per trial); layer-2
// misses are counted per active device.
struct TrialOutcome {
    long t1_md = 0;
    long t1_fa = 0;
    long t1_active_obs = 0;
    long t1_idle_obs = 0;
    long t2_md = 0;
    long t2_active_obs = 0;

    TrialOutcome& operator+=(const TrialOutcome& other);
};

// One end-to-end trial: draw activity, synthesize, detect layer 1, then
// (optionally) cancel, inject the configured stage-1 error and run the
// layer-2 detector.  Fully determined by rt and trial_seed.
TrialOutcome run_trial(const PointRuntime& rt, std::uint64_t trial_seed);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

// Wilson 95% score interval for events/observations.
Interval wilson_interval(long events, long observations);

struct GridPointStats {
    double sweep_value = 0.0;
    long trials = 0;
    TrialOutcome counts;
    double theory_md = 0.0;
    double theory_fa = 0.0;

    double t1_md_rate() const;
    double t1_fa_rate() const;
    double t2_md_rate() const;
    Interval t1_md_interval() const;
    Interval t1_fa_interval() const;
    Interval t2_md_interval() const;
};

struct ErrorStats {
    std::vector<GridPointStats> points;
};

// Runs every grid point (the base point when sweep_values is empty).
// Trials are distributed over worker threads; each trial draws from a seed
// derived as (seed, point index, trial index), and only integer counters
// are reduced, so results are identical for any thread count.
ErrorStats run_experiment(const ExperimentConfig& config);

// Long-format CSV, one row per (point, metric):
// sweep_var,value,metric,estimate,ci_lo,ci_hi,theory,trials.
// Deterministic formatting: same config and seed give identical bytes.
void write_csv(const ErrorStats& stats, const ExperimentConfig& config, std::ostream& out);

// JSON run manifest describing the configuration, grid and raw counters.
void write_manifest(const ErrorStats& stats, const ExperimentConfig& config,
                    const std::string& csv_name, std::ostream& out);

const char* to_string(SweepVariable v);
const char* to_string(ErrorInjection e);

}  // namespace ralp
