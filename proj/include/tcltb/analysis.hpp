#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tcltb/fleet.hpp"

namespace tcltb {

/// 1 Hz record of the thermostat-relevant temperatures of one house.
struct TempSample {
    double timestamp_s = 0.0;
    int house_id = 0;
    double t_therm_c = 0.0;
    double t_a_c = 0.0;
    double t_w_c = 0.0;
    Mode mode = Mode::Off;
};

struct DutyCycleResult {
    double percent = 0.0;
    int complete_cycles = 0;
    bool insufficient = false;  // no complete cycle after warm-up
};

/// Duty cycle: 100 * ON duration / full-cycle duration, averaged over
/// complete cycles after discarding warmup_cycles cycles.
/// An always-ON (or always-OFF) log yields insufficient = true with the
/// observed occupancy as percent.
DutyCycleResult duty_cycle(const SwitchLog& log, int house_id,
                           double run_end_s, int warmup_cycles = 0);

struct CycleStats {
    int house_id = 0;
    double mean_on_s = 0.0;
    double mean_off_s = 0.0;
    double mean_cycle_s = 0.0;  // consecutive same-direction switch interval
    int complete_cycles = 0;
    bool insufficient = false;
};

/// Per-house ON/OFF/full-cycle durations from matched OFF->ON->OFF
/// triples after warm-up.
std::vector<CycleStats> cycle_durations(const SwitchLog& log, int n_houses,
                                        int warmup_cycles = 0);

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;

    double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
    /// Fraction of counted mass with value in [a, b).
    double mass_between(double a, double b) const;
};

/// Counts of (house, second) samples per t_therm bin over [lo, hi),
/// filtered by compressor mode. Throws std::invalid_argument for zero
/// bins or an empty trace.
Histogram temperature_histogram(const std::vector<TempSample>& trace, Mode mode_filter,
                                int bins, double lo, double hi);

struct PowerTempFit {
    double slope_w_per_c = 0.0;
    double slope_pct_per_c = 0.0;  // normalized by power at the mean ambient
    double reference_power_w = 0.0;
    double reference_ambient_c = 0.0;
    std::int64_t n_samples = 0;
};

/// Least-squares slope of ON-state real power versus ambient temperature,
/// discarding the first on_discard_s of every ON interval. ON intervals
/// are detected from the power level (> on_threshold_w). Throws
/// std::invalid_argument for degenerate input (fewer than two distinct
/// ambients).
PowerTempFit power_temperature_fit(const std::vector<double>& times_s,
                                   const std::vector<int>& house_ids,
                                   const std::vector<double>& power_w,
                                   const std::vector<double>& ambient_c,
                                   double on_threshold_w,
                                   double on_discard_s = 60.0);

struct DephasingPoint {
    int cycle_index = 0;
    double circular_variance = 0.0;  // 1 - |mean unit phasor|
    int houses = 0;
};

/// Circular variance of switch-ON phases per cycle index after a release
/// time, each house's events mapped to phases of its own mean period.
/// Returns an empty vector when fewer than 2 houses have 2+ ON events.
std::vector<DephasingPoint> dephasing_metric(const SwitchLog& log, int n_houses,
                                             double release_time_s, int max_cycles);

/// Plain least squares y = a + b x; helper shared by analyses and tests.
std::pair<double, double> linear_fit(const std::vector<double>& x,
                                     const std::vector<double>& y);

}  // namespace tcltb
