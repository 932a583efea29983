#include "ralp/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>

namespace ralp {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double to_double(const std::string& key, const std::string& raw) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" + raw + "'");
    }
}

long to_long(const std::string& key, const std::string& raw) {
    const double v = to_double(key, raw);
    if (std::floor(v) != v)
        throw ConfigError("config: key '" + key + "' must be an integer, got '" + raw + "'");
    return static_cast<long>(v);
}

bool to_bool(const std::string& key, const std::string& raw) {
    const std::string v = lower(raw);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError("config: key '" + key + "' has non-boolean value '" + raw + "'");
}

// Sectioned key/value store with consume-on-read semantics so that any key
// left at the end can be reported as unknown.
class KeyStore {
public:
    void insert(const std::string& key, const std::string& value, int line_no) {
        if (map_.count(key))
            throw ConfigError("config: duplicate key '" + key + "' (line " +
                              std::to_string(line_no) + ")");
        map_[key] = value;
    }
    std::optional<std::string> take(const std::string& key) {
        auto it = map_.find(key);
        if (it == map_.end()) return std::nullopt;
        std::string v = it->second;
        map_.erase(it);
        return v;
    }
    std::vector<std::string> remaining() const {
        std::vector<std::string> keys;
        for (const auto& [k, v] : map_) keys.push_back(k);
        return keys;
    }

private:
    std::map<std::string, std::string> map_;
};

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Reads `section.key` either directly or through its `_db` companion.
void read_power(KeyStore& store, const std::string& key, double& target) {
    const auto linear = store.take(key);
    const auto db = store.take(key + "_db");
    if (linear && db)
        throw ConfigError("config: give either '" + key + "' or '" + key + "_db', not both");
    if (linear) target = to_double(key, *linear);
    if (db) target = db_to_linear(to_double(key + "_db", *db));
}

SweepVariable parse_sweep_variable(const std::string& raw) {
    const std::string v = lower(raw);
    if (v == "k2") return SweepVariable::K2;
    if (v == "m") return SweepVariable::M;
    if (v == "p1_db") return SweepVariable::P1Db;
    if (v == "p2_db") return SweepVariable::P2Db;
    if (v == "l2_size") return SweepVariable::L2Size;
    throw ConfigError("config: unknown sweep variable '" + raw +
                      "' (expected k2, m, p1_db, p2_db or l2_size)");
}

ErrorInjection parse_injection(const std::string& raw) {
    const std::string v = lower(raw);
    if (v == "none") return ErrorInjection::None;
    if (v == "forced_fa") return ErrorInjection::ForcedFalseAlarm;
    if (v == "forced_md") return ErrorInjection::ForcedMissedDetection;
    throw ConfigError("config: unknown error_injection '" + raw +
                      "' (expected none, forced_fa or forced_md)");
}

std::vector<double> parse_values(const std::string& key, const std::string& raw) {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("config: empty entry in '" + key + "' list");
        out.push_back(to_double(key, item));
    }
    if (out.empty()) throw ConfigError("config: '" + key + "' list is empty");
    return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
    KeyStore store;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(line_no));
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (section.empty())
                throw ConfigError("config: empty section name at line " + std::to_string(line_no));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'key = value' at line " + std::to_string(line_no));
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: empty key or value at line " + std::to_string(line_no));
        store.insert(section.empty() ? key : section + "." + key, value, line_no);
    }

    ExperimentConfig cfg;
    if (auto v = store.take("pool.n")) cfg.n = static_cast<int>(to_long("pool.n", *v));
    // Default pool loading tracks n: five layer-2 preambles per layer-1 one.
    cfg.l2_size = 5 * cfg.n;
    if (auto v = store.take("pool.l2_size"))
        cfg.l2_size = static_cast<int>(to_long("pool.l2_size", *v));

    if (auto v = store.take("channel.m")) cfg.m = static_cast<int>(to_long("channel.m", *v));
    read_power(store, "channel.p1", cfg.p1);
    read_power(store, "channel.p2", cfg.p2);
    read_power(store, "channel.n0", cfg.n0);
    if (auto v = store.take("channel.k1")) cfg.k1 = static_cast<int>(to_long("channel.k1", *v));
    if (auto v = store.take("channel.k2")) cfg.k2 = static_cast<int>(to_long("channel.k2", *v));

    if (auto v = store.take("detector.eps")) cfg.eps = to_double("detector.eps", *v);
    if (auto v = store.take("detector.eps_c")) cfg.eps_c = to_double("detector.eps_c", *v);
    if (auto v = store.take("detector.cavi_sweeps"))
        cfg.cavi_sweeps = static_cast<int>(to_long("detector.cavi_sweeps", *v));
    if (auto v = store.take("detector.run_type2"))
        cfg.run_type2 = to_bool("detector.run_type2", *v);
    if (auto v = store.take("detector.perfect_sic"))
        cfg.perfect_sic = to_bool("detector.perfect_sic", *v);

    if (auto v = store.take("sweep.variable")) cfg.sweep_variable = parse_sweep_variable(*v);
    if (auto v = store.take("sweep.values")) cfg.sweep_values = parse_values("sweep.values", *v);

    if (auto v = store.take("run.trials")) cfg.trials = to_long("run.trials", *v);
    if (auto v = store.take("run.seed")) {
        try {
            cfg.seed = std::stoull(*v);
        } catch (const std::exception&) {
            throw ConfigError("config: key 'run.seed' has non-integer value '" + *v + "'");
        }
    }
    if (auto v = store.take("run.threads"))
        cfg.threads = static_cast<int>(to_long("run.threads", *v));
    if (auto v = store.take("run.error_injection")) cfg.injection = parse_injection(*v);
    if (auto v = store.take("run.label")) cfg.label = *v;

    const auto leftover = store.remaining();
    if (!leftover.empty()) {
        std::string msg = "config: unknown key(s):";
        for (const auto& k : leftover) msg += " '" + k + "'";
        throw ConfigError(msg);
    }

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse_experiment_config(in);
}

namespace {

ExperimentConfig study_base() {
    ExperimentConfig c;
    c.n = 13;
    c.l2_size = 65;
    c.m = 10;
    c.p1 = db_to_linear(12.0);
    c.p2 = db_to_linear(6.0);
    c.n0 = 1.0;
    c.k1 = 2;
    c.k2 = 5;
    c.eps = 1e-2;
    c.eps_c = 1e-3;
    c.cavi_sweeps = 5;
    return c;
}

// The three stage-1 conditions of the error-propagation studies.  These
// run from the true layer-1 support so that exactly one injected error
// separates the arms.
std::vector<PresetRun> propagation_arms(const std::string& name, ExperimentConfig base) {
    base.run_type2 = true;
    base.perfect_sic = true;
    std::vector<PresetRun> runs;
    for (ErrorInjection mode : {ErrorInjection::None, ErrorInjection::ForcedFalseAlarm,
                                ErrorInjection::ForcedMissedDetection}) {
        ExperimentConfig arm = base;
        arm.injection = mode;
        arm.label = name + "_" + to_string(mode);
        runs.push_back({arm.label, arm});
    }
    return runs;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig4", "fig5a", "fig5b", "fig6a", "fig6b", "fig7a", "fig7b", "fig8", "fig9", "fig10"};
}

std::vector<PresetRun> figure_preset(const std::string& name) {
    ExperimentConfig base = study_base();

    if (name == "fig4") {
        // Layer-1 miss/false-alarm rates against the closed form as the
        // layer-2 load grows.
        base.run_type2 = false;
        base.sweep_variable = SweepVariable::K2;
        base.sweep_values = {0, 2, 4, 6, 8, 10, 12};
        base.trials = 100000;
        std::vector<PresetRun> runs;
        for (double eps : {1e-2, 1e-3}) {
            ExperimentConfig arm = base;
            arm.eps = eps;
            arm.label = eps == 1e-2 ? "fig4_eps1e-2" : "fig4_eps1e-3";
            runs.push_back({arm.label, arm});
        }
        return runs;
    }
    if (name == "fig5a" || name == "fig5b") {
        // False-alarm decay with the antenna count, against the
        // Kullback-Leibler rate.
        base.run_type2 = false;
        if (name == "fig5b") {
            base.n = 37;
            base.l2_size = 185;
            base.k2 = 30;
        } else {
            base.k2 = 10;
        }
        base.sweep_variable = SweepVariable::M;
        base.sweep_values = {4, 6, 8, 10, 12, 14, 16};
        base.trials = 200000;
        base.label = name;
        return {{name, base}};
    }
    if (name == "fig6a" || name == "fig6b") {
        // Threshold robustness in the two class powers.
        base.run_type2 = false;
        base.trials = 100000;
        if (name == "fig6a") {
            base.sweep_variable = SweepVariable::P1Db;
            base.sweep_values = {8, 9, 10, 11, 12, 13, 14, 15, 16};
        } else {
            base.sweep_variable = SweepVariable::P2Db;
            base.sweep_values = {0, 2, 4, 6, 8, 10};
        }
        base.label = name;
        return {{name, base}};
    }
    if (name == "fig7a" || name == "fig7b") {
        // Layer-2 misses against the layer-2 load, one arm per stage-1
        // condition.
        if (name == "fig7b") {
            base.n = 37;
            base.l2_size = 185;
            base.sweep_values = {5, 10, 15, 20, 25, 30};
        } else {
            base.sweep_values = {1, 3, 5, 7, 9, 11, 13};
        }
        base.sweep_variable = SweepVariable::K2;
        base.trials = 3000;
        return propagation_arms(name, base);
    }
    if (name == "fig8") {
        base.sweep_variable = SweepVariable::M;
        base.sweep_values = {4, 6, 8, 10, 12, 14, 16};
        base.trials = 3000;
        return propagation_arms(name, base);
    }
    if (name == "fig9") {
        base.sweep_variable = SweepVariable::P1Db;
        base.sweep_values = {8, 10, 12, 14, 16};
        base.trials = 3000;
        return propagation_arms(name, base);
    }
    if (name == "fig10") {
        base.sweep_variable = SweepVariable::L2Size;
        base.sweep_values = {26, 39, 52, 65, 78, 91};
        base.trials = 3000;
        return propagation_arms(name, base);
    }
    throw ConfigError("unknown preset '" + name + "'; valid presets: fig4 fig5a fig5b fig6a "
                      "fig6b fig7a fig7b fig8 fig9 fig10");
}

}  // namespace ralp
