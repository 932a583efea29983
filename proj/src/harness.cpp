#include "ralp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include <json.hpp>

#include "ralp/theory.hpp"
#include "ralp/type2_detector.hpp"

namespace ralp {

namespace {

double base_sweep_value(const ExperimentConfig& c) {
    switch (c.sweep_variable) {
        case SweepVariable::K2: return c.k2;
        case SweepVariable::M: return c.m;
        case SweepVariable::P1Db: return 10.0 * std::log10(c.p1);
        case SweepVariable::P2Db: return 10.0 * std::log10(c.p2);
        case SweepVariable::L2Size: return c.l2_size;
    }
    throw std::logic_error("base_sweep_value: unhandled sweep variable");
}

bool is_integral(double v) { return std::floor(v) == v; }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

const char* to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::K2: return "k2";
        case SweepVariable::M: return "m";
        case SweepVariable::P1Db: return "p1_db";
        case SweepVariable::P2Db: return "p2_db";
        case SweepVariable::L2Size: return "l2_size";
    }
    return "?";
}

const char* to_string(ErrorInjection e) {
    switch (e) {
        case ErrorInjection::None: return "none";
        case ErrorInjection::ForcedFalseAlarm: return "forced_fa";
        case ErrorInjection::ForcedMissedDetection: return "forced_md";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (n < 5 || !is_prime(n))
        throw std::invalid_argument("ExperimentConfig: n must be a prime >= 5");
    if (l2_size < 1 || l2_size > n * (n - 1))
        throw std::invalid_argument("ExperimentConfig: l2_size must be in [1, n*(n-1)]");
    if (m < 1) throw std::invalid_argument("ExperimentConfig: m must be >= 1");
    if (!(p2 > 0.0) || !(p1 > p2))
        throw std::invalid_argument("ExperimentConfig: need p1 > p2 > 0");
    if (!(n0 > 0.0)) throw std::invalid_argument("ExperimentConfig: n0 must be > 0");
    if (k1 < 0 || k1 > n) throw std::invalid_argument("ExperimentConfig: k1 must be in [0, n]");
    if (k2 < 0 || k2 > l2_size)
        throw std::invalid_argument("ExperimentConfig: k2 must be in [0, l2_size]");
    if (!(eps > 0.0) || !(eps < 1.0) || !(eps_c > 0.0) || !(eps_c < 1.0))
        throw std::invalid_argument("ExperimentConfig: eps and eps_c must be in (0, 1)");
    if (cavi_sweeps < 0) throw std::invalid_argument("ExperimentConfig: cavi_sweeps must be >= 0");
    if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
    if (threads < 0) throw std::invalid_argument("ExperimentConfig: threads must be >= 0");
    for (double v : sweep_values) {
        switch (sweep_variable) {
            case SweepVariable::K2:
                if (!is_integral(v) || v < 0.0)
                    throw std::invalid_argument("ExperimentConfig: k2 sweep values must be "
                                                "non-negative integers");
                break;
            case SweepVariable::M:
                if (!is_integral(v) || v < 1.0)
                    throw std::invalid_argument("ExperimentConfig: m sweep values must be "
                                                "positive integers");
                break;
            case SweepVariable::L2Size:
                if (!is_integral(v) || v < 1.0)
                    throw std::invalid_argument("ExperimentConfig: l2_size sweep values must be "
                                                "positive integers");
                break;
            case SweepVariable::P1Db:
            case SweepVariable::P2Db:
                if (!std::isfinite(v))
                    throw std::invalid_argument("ExperimentConfig: dB sweep values must be finite");
                break;
        }
    }
}

PointRuntime prepare_point(const ExperimentConfig& config, double sweep_value) {
    ExperimentConfig at = config;
    switch (config.sweep_variable) {
        case SweepVariable::K2: at.k2 = static_cast<int>(sweep_value); break;
        case SweepVariable::M: at.m = static_cast<int>(sweep_value); break;
        case SweepVariable::P1Db: at.p1 = std::pow(10.0, sweep_value / 10.0); break;
        case SweepVariable::P2Db: at.p2 = std::pow(10.0, sweep_value / 10.0); break;
        case SweepVariable::L2Size: at.l2_size = static_cast<int>(sweep_value); break;
    }
    at.sweep_values.clear();
    at.validate();

    PointRuntime rt{at, PreamblePool::build(at.n, at.l2_size), ChannelConfig{}, Thresholds{}};
    rt.channel.m = at.m;
    rt.channel.p1 = at.p1;
    rt.channel.p2 = at.p2;
    rt.channel.n0 = at.n0;
    rt.channel.k1 = at.k1;
    rt.channel.k2 = at.k2;
    rt.channel.validate(rt.pool);

    rt.i2 = interference_power(at.k2, at.p2, at.n, at.n0);
    rt.thresholds.activity = calibrate_activity_threshold(at.m, at.eps, at.p1, rt.i2);
    rt.thresholds.collision = calibrate_collision_threshold(at.m, at.eps_c, at.p1, rt.i2);
    rt.thresholds.validate();

    rt.sigma_s = sigma_s_sq(at.k2, at.l2_size);
    rt.prior = -std::expm1(-static_cast<double>(at.k2) / static_cast<double>(at.l2_size));

    TheoryParams tp;
    tp.m = at.m;
    tp.p1 = at.p1;
    tp.p2 = at.p2;
    tp.n0 = at.n0;
    tp.k2 = at.k2;
    const ErrorBudget budget = error_budget(rt.thresholds.activity, rt.thresholds.collision, tp, at.n);
    rt.theory_md = budget.missed_detection;
    rt.theory_fa = budget.false_alarm;
    return rt;
}

TrialOutcome& TrialOutcome::operator+=(const TrialOutcome& other) {
    t1_md += other.t1_md;
    t1_fa += other.t1_fa;
    t1_active_obs += other.t1_active_obs;
    t1_idle_obs += other.t1_idle_obs;
    t2_md += other.t2_md;
    t2_active_obs += other.t2_active_obs;
    return *this;
}

TrialOutcome run_trial(const PointRuntime& rt, std::uint64_t trial_seed) {
    Rng rng(trial_seed);
    const ChannelConfig& ch = rt.channel;
    const int n = rt.pool.l1_size();

    const ActivityMap activity = draw_activity(rt.pool, ch, rng);
    const ReceivedSignal y = synthesize(rt.pool, activity, ch, rng);
    const Type1Decision decision = classify(correlate(y, rt.pool), rt.thresholds);

    std::vector<char> active1(static_cast<std::size_t>(n), 0);
    for (int l : activity.type1_choices) active1[static_cast<std::size_t>(l)] = 1;

    TrialOutcome out;
    out.t1_active_obs = ch.k1;
    out.t1_idle_obs = n - ch.k1;
    for (int l = 0; l < n; ++l) {
        const bool idle_verdict = decision.verdicts[static_cast<std::size_t>(l)] == Verdict::Idle;
        if (active1[static_cast<std::size_t>(l)]) {
            if (idle_verdict) ++out.t1_md;
        } else {
            if (!idle_verdict) ++out.t1_fa;
        }
    }

    if (!rt.config.run_type2 || ch.k2 == 0) return out;
    out.t2_active_obs = ch.k2;

    std::vector<int> detected;
    if (rt.config.perfect_sic) {
        detected = activity.type1_choices;
        std::sort(detected.begin(), detected.end());
    } else {
        detected = decision.detected;
    }
    if (rt.config.injection != ErrorInjection::None) {
        // Only perturb when an eligible preamble exists; without
        // perfect_sic an organic error may already have consumed it.
        long overlap = 0, covered = 0;
        {
            std::vector<char> det(static_cast<std::size_t>(n), 0);
            for (int l : detected) det[static_cast<std::size_t>(l)] = 1;
            for (int l = 0; l < n; ++l) {
                const bool d = det[static_cast<std::size_t>(l)];
                const bool a = active1[static_cast<std::size_t>(l)];
                overlap += d && a;
                covered += d || a;
            }
        }
        const bool eligible = rt.config.injection == ErrorInjection::ForcedFalseAlarm
                                  ? covered < n
                                  : overlap > 0;
        if (eligible) {
            const InjectedError mode = rt.config.injection == ErrorInjection::ForcedFalseAlarm
                                           ? InjectedError::ForcedFalseAlarm
                                           : InjectedError::ForcedMissedDetection;
            detected = inject_detection_error(detected, activity.type1_choices, n, mode, rng);
        }
    }

    if (static_cast<int>(detected.size()) == n) {
        // Nothing left to measure against; every layer-2 device is missed.
        out.t2_md = ch.k2;
        return out;
    }

    const ProjectionReport report = project_out(y, detected, rt.pool);
    const MmvProblem problem = build_mmv(report, rt.pool, rt.sigma_s, ch.p2, ch.n0);
    const Type2Decision dec2 =
        cavi_detect(problem, rt.prior, rt.config.cavi_sweeps, rt.config.k2);

    std::vector<char> found(static_cast<std::size_t>(rt.pool.l2_size()), 0);
    for (int l : dec2.detected) found[static_cast<std::size_t>(l)] = 1;
    for (int t : activity.type2_choices)
        if (!found[static_cast<std::size_t>(t)]) ++out.t2_md;
    return out;
}

Interval wilson_interval(long events, long observations) {
    if (observations <= 0) return {0.0, 1.0};
    const double z = 1.959963984540054;  // 97.5% normal quantile
    const double nn = static_cast<double>(observations);
    const double p = static_cast<double>(events) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    // Clamp so the interval always contains the point estimate (rounding
    // can otherwise push a boundary value out by one ulp).
    return {std::min(p, std::max(0.0, center - half)), std::max(p, std::min(1.0, center + half))};
}

double GridPointStats::t1_md_rate() const {
    return counts.t1_active_obs ? static_cast<double>(counts.t1_md) / counts.t1_active_obs : 0.0;
}
double GridPointStats::t1_fa_rate() const {
    return counts.t1_idle_obs ? static_cast<double>(counts.t1_fa) / counts.t1_idle_obs : 0.0;
}
double GridPointStats::t2_md_rate() const {
    return counts.t2_active_obs ? static_cast<double>(counts.t2_md) / counts.t2_active_obs : 0.0;
}
Interval GridPointStats::t1_md_interval() const {
    return wilson_interval(counts.t1_md, counts.t1_active_obs);
}
Interval GridPointStats::t1_fa_interval() const {
    return wilson_interval(counts.t1_fa, counts.t1_idle_obs);
}
Interval GridPointStats::t2_md_interval() const {
    return wilson_interval(counts.t2_md, counts.t2_active_obs);
}

ErrorStats run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::vector<double> values = config.sweep_values;
    if (values.empty()) values.push_back(base_sweep_value(config));

    ErrorStats stats;
    for (std::size_t pt = 0; pt < values.size(); ++pt) {
        const PointRuntime rt = prepare_point(config, values[pt]);
        const std::uint64_t point_seed = derive_seed(config.seed, pt);

        long requested = config.threads > 0
                             ? config.threads
                             : std::max(1u, std::thread::hardware_concurrency());
        const long workers = std::max(1L, std::min(requested, config.trials));

        std::vector<TrialOutcome> partial(static_cast<std::size_t>(workers));
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        auto work = [&](long w) {
            try {
                const long begin = config.trials * w / workers;
                const long end = config.trials * (w + 1) / workers;
                TrialOutcome local;
                for (long t = begin; t < end; ++t)
                    local += run_trial(rt, derive_seed(point_seed, static_cast<std::uint64_t>(t)));
                partial[static_cast<std::size_t>(w)] = local;
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool_threads;
            pool_threads.reserve(static_cast<std::size_t>(workers));
            for (long w = 0; w < workers; ++w) pool_threads.emplace_back(work, w);
            for (auto& th : pool_threads) th.join();
        }
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);

        GridPointStats gp;
        gp.sweep_value = values[pt];
        gp.trials = config.trials;
        for (const auto& p : partial) gp.counts += p;
        gp.theory_md = rt.theory_md;
        gp.theory_fa = rt.theory_fa;
        stats.points.push_back(gp);
    }
    return stats;
}

void write_csv(const ErrorStats& stats, const ExperimentConfig& config, std::ostream& out) {
    out << "sweep_var,value,metric,estimate,ci_lo,ci_hi,theory,trials\n";
    const char* var = to_string(config.sweep_variable);
    auto row = [&](const GridPointStats& gp, const char* metric, double est, Interval ci,
                   double theory, bool has_theory) {
        out << var << ',' << fmt(gp.sweep_value) << ',' << metric << ',' << fmt(est) << ','
            << fmt(ci.lo) << ',' << fmt(ci.hi) << ',';
        if (has_theory) out << fmt(theory);
        out << ',' << gp.trials << '\n';
    };
    for (const auto& gp : stats.points) {
        row(gp, "type1_md", gp.t1_md_rate(), gp.t1_md_interval(), gp.theory_md, true);
        row(gp, "type1_fa", gp.t1_fa_rate(), gp.t1_fa_interval(), gp.theory_fa, true);
        if (gp.counts.t2_active_obs > 0)
            row(gp, "type2_md", gp.t2_md_rate(), gp.t2_md_interval(), 0.0, false);
    }
}

void write_manifest(const ErrorStats& stats, const ExperimentConfig& config,
                    const std::string& csv_name, std::ostream& out) {
    nlohmann::json j;
    j["label"] = config.label;
    j["csv"] = csv_name;
    j["pool"] = {{"n", config.n}, {"l2_size", config.l2_size}};
    j["channel"] = {{"m", config.m}, {"p1", config.p1}, {"p2", config.p2},
                    {"n0", config.n0}, {"k1", config.k1}, {"k2", config.k2}};
    j["detector"] = {{"eps", config.eps},
                     {"eps_c", config.eps_c},
                     {"cavi_sweeps", config.cavi_sweeps},
                     {"run_type2", config.run_type2},
                     {"perfect_sic", config.perfect_sic},
                     {"error_injection", to_string(config.injection)}};
    j["sweep"] = {{"variable", to_string(config.sweep_variable)},
                  {"values", config.sweep_values}};
    j["run"] = {{"trials", config.trials}, {"seed", config.seed}, {"threads", config.threads}};
    j["points"] = nlohmann::json::array();
    for (const auto& gp : stats.points) {
        j["points"].push_back({{"value", gp.sweep_value},
                               {"t1_md", gp.counts.t1_md},
                               {"t1_fa", gp.counts.t1_fa},
                               {"t1_active_obs", gp.counts.t1_active_obs},
                               {"t1_idle_obs", gp.counts.t1_idle_obs},
                               {"t2_md", gp.counts.t2_md},
                               {"t2_active_obs", gp.counts.t2_active_obs},
                               {"theory_md", gp.theory_md},
                               {"theory_fa", gp.theory_fa}});
    }
    out << j.dump(2) << '\n';
}

}  // namespace ralp
