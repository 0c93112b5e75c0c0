#include "tcltb/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace tcltb {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool valid_key(const std::string& k) {
    if (k.empty() || k.front() == '.' || k.back() == '.') return false;
    for (char c : k) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'))
            return false;
    }
    return true;
}

std::optional<double> to_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

}  // namespace

KeyTree KeyTree::parse_text(const std::string& text, const std::string& name) {
    KeyTree tree;
    tree.name_ = name;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name, lineno, "expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (!valid_key(key))
            throw ConfigError(name, lineno, "invalid key '" + key + "'");
        if (tree.entries_.count(key))
            throw ConfigError(name, lineno,
                              "duplicate key '" + key + "' (first at line " +
                                  std::to_string(tree.entries_[key].line) + ")");
        tree.entries_[key] = Entry{value, lineno};
    }
    return tree;
}

KeyTree KeyTree::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

const KeyTree::Entry* KeyTree::find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

bool KeyTree::has(const std::string& key) const { return find(key) != nullptr; }

int KeyTree::line_of(const std::string& key) const {
    const Entry* e = find(key);
    return e ? e->line : 0;
}

void KeyTree::fail(const std::string& key, const std::string& what) const {
    throw ConfigError(name_, line_of(key), key + ": " + what);
}

void KeyTree::bad_value(const std::string& key, const Entry& e,
                        const std::string& expected) const {
    throw ConfigError(name_, e.line,
                      key + ": expected " + expected + ", got '" + e.raw + "'");
}

std::string KeyTree::get_string(const std::string& key, const std::string& dflt) const {
    const Entry* e = find(key);
    return e ? e->raw : dflt;
}

double KeyTree::get_double(const std::string& key, double dflt) const {
    const Entry* e = find(key);
    if (!e) return dflt;
    const auto v = to_double(e->raw);
    if (!v) bad_value(key, *e, "a number");
    return *v;
}

std::int64_t KeyTree::get_int(const std::string& key, std::int64_t dflt) const {
    const Entry* e = find(key);
    if (!e) return dflt;
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(e->raw.data(), e->raw.data() + e->raw.size(), v);
    if (ec != std::errc() || p != e->raw.data() + e->raw.size())
        bad_value(key, *e, "an integer");
    return v;
}

bool KeyTree::get_bool(const std::string& key, bool dflt) const {
    const Entry* e = find(key);
    if (!e) return dflt;
    std::string s = e->raw;
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    bad_value(key, *e, "a boolean");
}

std::vector<double> KeyTree::get_list(const std::string& key,
                                      const std::vector<double>& dflt) const {
    const Entry* e = find(key);
    if (!e) return dflt;
    std::vector<double> out;
    for (const auto& part : split(e->raw, ',')) {
        const auto v = to_double(part);
        if (!v) bad_value(key, *e, "a comma-separated list of numbers");
        out.push_back(*v);
    }
    return out;
}

std::vector<std::pair<double, double>> KeyTree::get_pairs(
    const std::string& key, const std::vector<std::pair<double, double>>& dflt) const {
    const Entry* e = find(key);
    if (!e) return dflt;
    std::vector<std::pair<double, double>> out;
    for (const auto& part : split(e->raw, ',')) {
        const auto pieces = split(part, ':');
        if (pieces.size() != 2) bad_value(key, *e, "'time:value' pairs");
        const auto t = to_double(pieces[0]);
        const auto v = to_double(pieces[1]);
        if (!t || !v) bad_value(key, *e, "'time:value' pairs");
        out.emplace_back(*t, *v);
    }
    return out;
}

std::vector<std::string> KeyTree::keys() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [k, _] : entries_) out.push_back(k);
    return out;
}

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::FixedSetpoint: return "fixed_setpoint";
        case Scenario::HeatSweep: return "heat_sweep";
        case Scenario::FhmSweep: return "fhm_sweep";
        case Scenario::AmbientSweep: return "ambient_sweep";
        case Scenario::SquareWave: return "square_wave";
        case Scenario::ReleaseTest: return "release_test";
        case Scenario::Serve: return "serve";
    }
    return "?";
}

namespace {

// Every addressable key; parsing is strict so typos fail loudly.
const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "scenario",
        "fleet.n_houses", "fleet.seed",
        "fleet.tank_20gal_j_per_c", "fleet.tank_30gal_j_per_c",
        "fleet.jitter.u_a", "fleet.jitter.h_m", "fleet.jitter.q_fixed",
        "fleet.jitter.f_hm", "fleet.jitter.c_r", "fleet.jitter.h_1",
        "fleet.jitter.thirty_gal_fraction",
        "house.c_w", "house.c_r", "house.c_1", "house.c_2",
        "house.u_a", "house.h_m", "house.h_1", "house.h_2",
        "house.a_comp", "house.l_over_r", "house.gamma", "house.w_fric",
        "house.f_hm", "house.q_fixed",
        "house.setpoint_c", "house.deadband_c", "house.lockout_s", "house.min_on_s",
        "schedule.kind", "schedule.base_w", "schedule.perturb_amplitude_w",
        "schedule.correlation_time_s", "schedule.profile",
        "ambient.t_c", "ambient.profile",
        "run.duration_s", "run.warmup_cycles", "run.warmup_s",
        "run.latch_dt_s", "run.output_dir",
        "integrator.dt_s", "integrator.event_tol_s",
        "sweep.q_w", "sweep.f_hm", "sweep.t_amb",
        "square_wave.period_s", "square_wave.duty_pct",
        "server.host", "server.port", "server.mode", "server.timeout_s",
        "server.pacing", "server.max_steps",
        "telemetry.power_factor", "telemetry.voltage_v", "telemetry.freq_hz",
        "telemetry.inrush_dump",
        "inrush.peak_multiplier", "inrush.decay_time_s", "inrush.line_freq_hz",
    };
    return keys;
}

Scenario scenario_from_string(const KeyTree& t, const std::string& s) {
    if (s == "fixed_setpoint") return Scenario::FixedSetpoint;
    if (s == "heat_sweep") return Scenario::HeatSweep;
    if (s == "fhm_sweep") return Scenario::FhmSweep;
    if (s == "ambient_sweep") return Scenario::AmbientSweep;
    if (s == "square_wave") return Scenario::SquareWave;
    if (s == "release_test") return Scenario::ReleaseTest;
    if (s == "serve") return Scenario::Serve;
    t.fail("scenario", "unknown scenario '" + s + "'");
}

ExperimentConfig from_tree(const KeyTree& t) {
    for (const auto& k : t.keys()) {
        if (!known_keys().count(k))
            throw ConfigError(t.name(), t.line_of(k), "unknown key '" + k + "'");
    }

    ExperimentConfig cfg;
    cfg.scenario = scenario_from_string(t, t.get_string("scenario", "fixed_setpoint"));

    HouseParams& hp = cfg.fleet.base;
    hp.c_w = t.get_double("house.c_w", hp.c_w);
    hp.c_r = t.get_double("house.c_r", hp.c_r);
    hp.c_1 = t.get_double("house.c_1", hp.c_1);
    hp.c_2 = t.get_double("house.c_2", hp.c_2);
    hp.u_a = t.get_double("house.u_a", hp.u_a);
    hp.h_m = t.get_double("house.h_m", hp.h_m);
    hp.h_1 = t.get_double("house.h_1", hp.h_1);
    hp.h_2 = t.get_double("house.h_2", hp.h_2);
    hp.a_comp = t.get_double("house.a_comp", hp.a_comp);
    hp.l_over_r = t.get_double("house.l_over_r", hp.l_over_r);
    hp.gamma = t.get_double("house.gamma", hp.gamma);
    hp.w_fric = t.get_double("house.w_fric", hp.w_fric);
    hp.f_hm = t.get_double("house.f_hm", hp.f_hm);
    hp.q_fixed = t.get_double("house.q_fixed", hp.q_fixed);
    hp.setpoint = t.get_double("house.setpoint_c", hp.setpoint);
    hp.deadband_width = t.get_double("house.deadband_c", hp.deadband_width);
    hp.lockout_s = t.get_double("house.lockout_s", hp.lockout_s);
    hp.min_on_s = t.get_double("house.min_on_s", hp.min_on_s);

    cfg.fleet.n_houses = static_cast<int>(t.get_int("fleet.n_houses", 20));
    cfg.fleet.rng_seed = static_cast<std::uint64_t>(t.get_int("fleet.seed", 1));
    cfg.fleet.c_w_20gal = t.get_double("fleet.tank_20gal_j_per_c", cfg.fleet.c_w_20gal);
    cfg.fleet.c_w_30gal = t.get_double("fleet.tank_30gal_j_per_c", cfg.fleet.c_w_30gal);
    cfg.fleet.jitter.u_a = t.get_double("fleet.jitter.u_a", 0.0);
    cfg.fleet.jitter.h_m = t.get_double("fleet.jitter.h_m", 0.0);
    cfg.fleet.jitter.q_fixed = t.get_double("fleet.jitter.q_fixed", 0.0);
    cfg.fleet.jitter.f_hm = t.get_double("fleet.jitter.f_hm", 0.0);
    cfg.fleet.jitter.c_r = t.get_double("fleet.jitter.c_r", 0.0);
    cfg.fleet.jitter.h_1 = t.get_double("fleet.jitter.h_1", 0.0);
    cfg.fleet.jitter.thirty_gal_fraction =
        t.get_double("fleet.jitter.thirty_gal_fraction", 0.0);

    HeatSchedule sched;
    const std::string kind = t.get_string("schedule.kind", "constant");
    if (kind == "constant") sched.kind = ScheduleKind::Constant;
    else if (kind == "random_perturbed") sched.kind = ScheduleKind::RandomPerturbed;
    else if (kind == "profile") sched.kind = ScheduleKind::Profile;
    else t.fail("schedule.kind", "unknown schedule kind '" + kind + "'");
    sched.base_w = t.get_double("schedule.base_w", sched.base_w);
    sched.perturb_amplitude_w =
        t.get_double("schedule.perturb_amplitude_w", sched.perturb_amplitude_w);
    sched.correlation_time_s =
        t.get_double("schedule.correlation_time_s", sched.correlation_time_s);
    sched.profile = t.get_pairs("schedule.profile", {});
    cfg.fleet.schedules = {sched};

    cfg.fleet.ambient.constant_c = t.get_double("ambient.t_c", 25.0);
    cfg.fleet.ambient.profile = t.get_pairs("ambient.profile", {});

    cfg.duration_s = t.get_double("run.duration_s", cfg.duration_s);
    cfg.warmup_cycles = static_cast<int>(t.get_int("run.warmup_cycles", cfg.warmup_cycles));
    cfg.warmup_s = t.get_double("run.warmup_s", 0.0);
    cfg.latch_dt_s = t.get_double("run.latch_dt_s", cfg.latch_dt_s);
    cfg.output_dir = t.get_string("run.output_dir", cfg.output_dir);

    cfg.integrator.dt_s = t.get_double("integrator.dt_s", cfg.integrator.dt_s);
    cfg.integrator.event_time_tol_s =
        t.get_double("integrator.event_tol_s", cfg.integrator.event_time_tol_s);

    cfg.sweep_q_w = t.get_list("sweep.q_w", {});
    cfg.sweep_f_hm = t.get_list("sweep.f_hm", {0.0, 0.25, 0.5, 0.75, 0.9});
    cfg.sweep_t_amb = t.get_list("sweep.t_amb", {20.0, 23.0, 26.0, 29.0, 32.0});

    cfg.square_period_s = t.get_double("square_wave.period_s", cfg.square_period_s);
    cfg.square_duty_pct = t.get_double("square_wave.duty_pct", cfg.square_duty_pct);

    cfg.server.host = t.get_string("server.host", cfg.server.host);
    cfg.server.port = static_cast<std::uint16_t>(t.get_int("server.port", cfg.server.port));
    const std::string smode = t.get_string("server.mode", "free_run");
    if (smode == "free_run") cfg.server.mode = ServeMode::FreeRun;
    else if (smode == "lockstep") cfg.server.mode = ServeMode::Lockstep;
    else t.fail("server.mode", "expected free_run or lockstep, got '" + smode + "'");
    cfg.server.request_timeout_s = t.get_double("server.timeout_s", cfg.server.request_timeout_s);
    cfg.server.realtime_pacing = t.get_bool("server.pacing", false);
    cfg.server.max_steps = t.get_int("server.max_steps", -1);
    cfg.server.latch_dt_s = cfg.latch_dt_s;

    cfg.telemetry.power_factor = t.get_double("telemetry.power_factor", 0.95);
    cfg.telemetry.voltage_v = t.get_double("telemetry.voltage_v", 120.0);
    cfg.telemetry.freq_hz = t.get_double("telemetry.freq_hz", 60.0);
    cfg.write_inrush_dump = t.get_bool("telemetry.inrush_dump", false);

    cfg.inrush.peak_multiplier = t.get_double("inrush.peak_multiplier", cfg.inrush.peak_multiplier);
    cfg.inrush.decay_time_s = t.get_double("inrush.decay_time_s", cfg.inrush.decay_time_s);
    cfg.inrush.line_freq_hz = t.get_double("inrush.line_freq_hz", cfg.inrush.line_freq_hz);

    // Semantic validation, with line-precise blame where a key is present.
    if (cfg.duration_s <= cfg.warmup_s)
        throw ConfigError(t.name(),
                          t.line_of(t.has("run.warmup_s") ? "run.warmup_s" : "run.duration_s"),
                          "run.duration_s must exceed the warm-up");
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(t.name(), 0, e.what());
    }
    return cfg;
}

}  // namespace

void ExperimentConfig::validate() const {
    fleet.validate();
    inrush.validate();
    if (!(duration_s > 0.0)) throw std::invalid_argument("run.duration_s must be > 0");
    if (warmup_cycles < 0) throw std::invalid_argument("run.warmup_cycles must be >= 0");
    if (warmup_s < 0.0) throw std::invalid_argument("run.warmup_s must be >= 0");
    if (duration_s <= warmup_s)
        throw std::invalid_argument("run.duration_s must exceed the warm-up");
    if (!(latch_dt_s > 0.0)) throw std::invalid_argument("run.latch_dt_s must be > 0");
    if (!(integrator.dt_s > 0.0)) throw std::invalid_argument("integrator.dt_s must be > 0");
    if (!(integrator.event_time_tol_s > 0.0))
        throw std::invalid_argument("integrator.event_tol_s must be > 0");
    if (!(telemetry.power_factor > 0.0 && telemetry.power_factor <= 1.0))
        throw std::invalid_argument("telemetry.power_factor must be in (0, 1]");
    if (scenario == Scenario::HeatSweep && sweep_q_w.empty())
        throw std::invalid_argument("heat_sweep requires sweep.q_w grid");
    if (scenario == Scenario::FhmSweep && sweep_f_hm.empty())
        throw std::invalid_argument("fhm_sweep requires sweep.f_hm grid");
    if (scenario == Scenario::AmbientSweep && sweep_t_amb.empty())
        throw std::invalid_argument("ambient_sweep requires sweep.t_amb grid");
    for (double v : sweep_q_w)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("sweep.q_w values must be finite and >= 0");
    for (double v : sweep_f_hm)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("sweep.f_hm values must be in [0, 1]");
    for (double v : sweep_t_amb)
        if (!std::isfinite(v)) throw std::invalid_argument("sweep.t_amb values must be finite");
    if (scenario == Scenario::SquareWave) {
        if (!(square_period_s > 0.0))
            throw std::invalid_argument("square_wave.period_s must be > 0");
        if (!(square_duty_pct >= 0.0 && square_duty_pct <= 100.0))
            throw std::invalid_argument("square_wave.duty_pct must be in [0, 100]");
    }
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return from_tree(KeyTree::parse_file(path));
}

ExperimentConfig experiment_config_from_text(const std::string& text,
                                             const std::string& name) {
    return from_tree(KeyTree::parse_text(text, name));
}

}  // namespace tcltb
