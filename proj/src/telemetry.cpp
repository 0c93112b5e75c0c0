#include "tcltb/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "tcltb/csv.hpp"

namespace tcltb {

void InrushParams::validate() const {
    if (!(peak_multiplier >= 1.0))
        throw std::invalid_argument("inrush peak_multiplier must be >= 1");
    if (!(decay_time_s > 0.0))
        throw std::invalid_argument("inrush decay_time must be > 0");
    if (!(line_freq_hz > 0.0))
        throw std::invalid_argument("line frequency must be > 0");
}

std::vector<MeterSample> sample(const Fleet& fleet, double t_s,
                                const TelemetryConfig& cfg) {
    std::vector<MeterSample> out;
    out.reserve(fleet.houses().size());
    for (const auto& h : fleet.houses()) {
        MeterSample m;
        m.timestamp_s = t_s;
        m.house_id = h.id;
        m.real_w = h.power_w;
        m.apparent_va = h.power_w / cfg.power_factor;
        m.voltage_v = cfg.voltage_v;
        m.freq_hz = cfg.freq_hz;
        out.push_back(m);
    }
    return out;
}

double inrush_waveform(double t_since_on_s, double steady_current_a,
                       const InrushParams& p) {
    if (t_since_on_s < 0.0)
        throw std::invalid_argument("inrush: t_since_on must be >= 0");
    return steady_current_a *
           (1.0 + (p.peak_multiplier - 1.0) * std::exp(-t_since_on_s / p.decay_time_s));
}

double coincident_inrush(const std::vector<double>& on_times_s, double window_s,
                         const InrushParams& p,
                         const std::vector<double>& steady_currents_a) {
    if (!(window_s > 0.0)) throw std::invalid_argument("window must be > 0");
    if (on_times_s.empty()) return 0.0;
    if (!steady_currents_a.empty() && steady_currents_a.size() != on_times_s.size())
        throw std::invalid_argument("steady currents must match event count");

    const double t0 = *std::min_element(on_times_s.begin(), on_times_s.end());
    std::vector<std::pair<double, double>> events;  // (time, steady)
    double steady_total = 0.0;
    for (std::size_t i = 0; i < on_times_s.size(); ++i) {
        if (on_times_s[i] - t0 > window_s) continue;
        const double steady = steady_currents_a.empty() ? 1.0 : steady_currents_a[i];
        events.emplace_back(on_times_s[i], steady);
        steady_total += steady;
    }
    if (steady_total <= 0.0) return 0.0;

    auto aggregate_at = [&](double t) {
        double sum = 0.0;
        for (const auto& [te, steady] : events)
            if (t >= te) sum += inrush_waveform(t - te, steady, p);
        return sum;
    };

    // The aggregate envelope is piecewise decreasing between ON events, so
    // the peak lies at one of the event instants; the grid pass is a
    // safety net for mixed steady currents.
    double peak = 0.0;
    for (const auto& [te, steady] : events) peak = std::max(peak, aggregate_at(te));
    const double t_end = events.back().first + 10.0 * p.decay_time_s;
    const double dt = p.decay_time_s / 20.0;
    if ((t_end - t0) / dt < 2e6)
        for (double t = t0; t <= t_end; t += dt) peak = std::max(peak, aggregate_at(t));

    return peak / steady_total;
}

void write_meter_header(std::ostream& os) {
    os << "timestamp,house_id,real_w,apparent_va,voltage_v,freq_hz\n";
}

void write_meter_rows(std::ostream& os, const std::vector<MeterSample>& rows) {
    for (const auto& m : rows) {
        csv::write_row(os, {csv::format_double(m.timestamp_s), std::to_string(m.house_id),
                            csv::format_double(m.real_w), csv::format_double(m.apparent_va),
                            csv::format_double(m.voltage_v), csv::format_double(m.freq_hz)});
    }
}

}  // namespace tcltb
