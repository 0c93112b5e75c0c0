#pragma once

#include <string>
#include <vector>

#include "tcltb/analysis.hpp"
#include "tcltb/config.hpp"

namespace tcltb {

/// In-memory result of one simulated run (also written to CSV files).
struct RunResult {
    std::vector<MeterSample> meter;
    std::vector<TempSample> temps;
    SwitchLog switches;
    double duration_s = 0.0;
    double fleet_electrical_j = 0.0;  // internally accumulated, for checks
};

/// Simulates one fleet for duration_s with 1 Hz sampling and optional
/// per-latch external requests supplied by the driver callback.
class RunDriver {
  public:
    virtual ~RunDriver() = default;
    /// Requests for the latch step starting at t_s; applied in order.
    virtual std::vector<SwitchRequest> requests(const Fleet& fleet, double t_s) {
        (void)fleet;
        (void)t_s;
        return {};
    }
};

RunResult simulate(Fleet& fleet, double duration_s, const TelemetryConfig& tel,
                   double latch_dt_s = 1.0, RunDriver* driver = nullptr);

/// Runs the configured scenario and writes its artifact CSVs under
/// cfg.output_dir. Returns the list of files written.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg);

struct SweepRow {
    double grid_value = 0.0;
    double duty_pct = 0.0;
    double mean_on_s = 0.0;
    double mean_off_s = 0.0;
    double mean_cycle_s = 0.0;
    double mean_on_power_w = 0.0;
};

/// Fleet-average steady-cycle statistics for one operating point; runs
/// until every house logs warmup + measure complete cycles (capped at
/// max_sim_s).
SweepRow measure_operating_point(const ExperimentConfig& cfg, const FleetSpec& spec,
                                 double grid_value, int measure_cycles = 5,
                                 double max_sim_s = 2.0e5);

}  // namespace tcltb
