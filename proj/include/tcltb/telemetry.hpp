#pragma once

#include <iosfwd>
#include <vector>

#include "tcltb/fleet.hpp"

namespace tcltb {

struct MeterSample {
    double timestamp_s = 0.0;
    int house_id = 0;
    double real_w = 0.0;
    double apparent_va = 0.0;
    double voltage_v = 0.0;
    double freq_hz = 0.0;
};

struct TelemetryConfig {
    double power_factor = 0.95;
    double voltage_v = 120.0;
    double freq_hz = 60.0;
};

/// One sample per house at time t_s (a latch boundary). Real power is the
/// compressor draw plus the fixed pump/fan load when ON, the fixed load
/// alone when OFF.
std::vector<MeterSample> sample(const Fleet& fleet, double t_s,
                                const TelemetryConfig& cfg = {});

struct InrushParams {
    double peak_multiplier = 5.5;
    double decay_time_s = 0.025;
    double line_freq_hz = 60.0;

    void validate() const;
};

/// Motor-start current envelope, as a multiple of the steady current:
/// steady * (1 + (peak - 1) * exp(-t/decay)). Separate from the 1 Hz
/// meter channel, which undersamples it.
double inrush_waveform(double t_since_on_s, double steady_current_a,
                       const InrushParams& p);

/// Superposes the inrush envelopes of ON events inside the window and
/// returns peak aggregate current over aggregate steady current. Event
/// steady currents default to 1 (the ratio is scale-free for identical
/// houses).
double coincident_inrush(const std::vector<double>& on_times_s, double window_s,
                         const InrushParams& p,
                         const std::vector<double>& steady_currents_a = {});

/// Meter CSV: "timestamp,house_id,real_w,apparent_va,voltage_v,freq_hz".
void write_meter_header(std::ostream& os);
void write_meter_rows(std::ostream& os, const std::vector<MeterSample>& rows);

}  // namespace tcltb
