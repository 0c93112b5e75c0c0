#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tcltb/fleet.hpp"
#include "tcltb/server.hpp"
#include "tcltb/telemetry.hpp"

namespace tcltb {

class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string file, int line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
          file(std::move(file)),
          line(line) {}
    std::string file;
    int line;
};

/// Flat key-tree document: one "dotted.key = value" per line, '#'
/// comments. Values are scalars, comma lists, or "time:value" pair lists.
/// Unknown keys are rejected against the shipped schema. See
/// docs/config.md for the grammar.
class KeyTree {
  public:
    static KeyTree parse_file(const std::string& path);
    static KeyTree parse_text(const std::string& text, const std::string& name);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& dflt) const;
    double get_double(const std::string& key, double dflt) const;
    std::int64_t get_int(const std::string& key, std::int64_t dflt) const;
    bool get_bool(const std::string& key, bool dflt) const;
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& dflt) const;
    std::vector<std::pair<double, double>> get_pairs(
        const std::string& key, const std::vector<std::pair<double, double>>& dflt) const;

    /// Line of a key, for error reporting (0 if absent).
    int line_of(const std::string& key) const;
    [[noreturn]] void fail(const std::string& key, const std::string& what) const;

    const std::string& name() const { return name_; }
    std::vector<std::string> keys() const;

  private:
    struct Entry {
        std::string raw;
        int line = 0;
    };
    const Entry* find(const std::string& key) const;
    [[noreturn]] void bad_value(const std::string& key, const Entry& e,
                                const std::string& expected) const;

    std::string name_;
    std::map<std::string, Entry> entries_;
};

enum class Scenario {
    FixedSetpoint,
    HeatSweep,
    FhmSweep,
    AmbientSweep,
    SquareWave,
    ReleaseTest,
    Serve,
};

const char* to_string(Scenario s);

struct ExperimentConfig {
    FleetSpec fleet;
    Scenario scenario = Scenario::FixedSetpoint;

    double duration_s = 7200.0;
    int warmup_cycles = 3;
    double warmup_s = 0.0;  // optional absolute warm-up, must stay < duration
    double latch_dt_s = 1.0;
    std::string output_dir = "out";

    // Sweep grids.
    std::vector<double> sweep_q_w;
    std::vector<double> sweep_f_hm;
    std::vector<double> sweep_t_amb;

    // SQUARE_WAVE / RELEASE_TEST.
    double square_period_s = 600.0;
    double square_duty_pct = 50.0;

    ServerConfig server;
    TelemetryConfig telemetry;
    IntegrateOptions integrator;
    bool write_inrush_dump = false;
    InrushParams inrush;

    void validate() const;  // throws std::invalid_argument
};

/// Loads and validates an experiment configuration; every HouseParams,
/// FleetSpec and scenario field is addressable. Errors carry file:line.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig experiment_config_from_text(const std::string& text,
                                             const std::string& name = "<config>");

}  // namespace tcltb
