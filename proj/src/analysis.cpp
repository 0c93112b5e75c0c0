#include "tcltb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace tcltb {

namespace {

struct Interval {
    double start = 0.0;
    double end = 0.0;
    Mode mode = Mode::Off;
    double len() const { return end - start; }
};

// Mode intervals of one house between its first logged switch and run end.
std::vector<Interval> house_intervals(const SwitchLog& log, int house_id,
                                      double run_end_s) {
    std::vector<Interval> out;
    bool have = false;
    Interval cur;
    for (const auto& ev : log) {
        if (ev.house_id != house_id) continue;
        if (have) {
            cur.end = ev.time_s;
            if (cur.len() > 0.0) out.push_back(cur);
        }
        cur.start = ev.time_s;
        cur.mode = ev.new_mode;
        have = true;
    }
    if (have && run_end_s > cur.start) {
        cur.end = run_end_s;
        out.push_back(cur);  // trailing, possibly incomplete interval
    }
    return out;
}

}  // namespace

DutyCycleResult duty_cycle(const SwitchLog& log, int house_id, double run_end_s,
                           int warmup_cycles) {
    const auto intervals = house_intervals(log, house_id, run_end_s);

    // Complete cycles: ON interval followed by a completed OFF interval
    // (i.e. the next ON switch exists). The trailing interval is never
    // complete.
    std::vector<double> duties;
    for (std::size_t i = 0; i + 2 < intervals.size(); ++i) {
        if (intervals[i].mode != Mode::On) continue;
        const double on = intervals[i].len();
        const double off = intervals[i + 1].len();
        duties.push_back(100.0 * on / (on + off));
    }
    if (static_cast<int>(duties.size()) > warmup_cycles)
        duties.erase(duties.begin(), duties.begin() + warmup_cycles);
    else
        duties.clear();

    DutyCycleResult res;
    res.complete_cycles = static_cast<int>(duties.size());
    if (duties.empty()) {
        // No complete cycle: report raw ON occupancy with the caveat flag.
        double on = 0.0, total = 0.0;
        for (const auto& iv : intervals) {
            total += iv.len();
            if (iv.mode == Mode::On) on += iv.len();
        }
        res.insufficient = true;
        res.percent = total > 0.0 ? 100.0 * on / total : 0.0;
        return res;
    }
    double sum = 0.0;
    for (double d : duties) sum += d;
    res.percent = sum / static_cast<double>(duties.size());
    return res;
}

std::vector<CycleStats> cycle_durations(const SwitchLog& log, int n_houses,
                                        int warmup_cycles) {
    std::vector<CycleStats> out;
    out.reserve(static_cast<std::size_t>(n_houses));
    // The trailing partial interval must not contribute, so cut at the
    // last switch of each house.
    for (int id = 0; id < n_houses; ++id) {
        double last_switch = 0.0;
        for (const auto& ev : log)
            if (ev.house_id == id) last_switch = ev.time_s;
        const auto intervals = house_intervals(log, id, last_switch);

        CycleStats cs;
        cs.house_id = id;
        std::vector<double> on_durs, off_durs, cycles;
        for (std::size_t i = 0; i + 1 < intervals.size(); ++i) {
            if (intervals[i].mode == Mode::On) {
                on_durs.push_back(intervals[i].len());
                // Full cycle: consecutive same-direction switch interval.
                cycles.push_back(intervals[i].len() + intervals[i + 1].len());
            } else {
                off_durs.push_back(intervals[i].len());
            }
        }
        auto drop_warmup = [warmup_cycles](std::vector<double>& v) {
            if (static_cast<int>(v.size()) > warmup_cycles)
                v.erase(v.begin(), v.begin() + warmup_cycles);
            else
                v.clear();
        };
        drop_warmup(on_durs);
        drop_warmup(off_durs);
        drop_warmup(cycles);

        auto mean = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return v.empty() ? 0.0 : s / static_cast<double>(v.size());
        };
        cs.complete_cycles = static_cast<int>(cycles.size());
        cs.insufficient = cycles.empty();
        cs.mean_on_s = mean(on_durs);
        cs.mean_off_s = mean(off_durs);
        cs.mean_cycle_s = mean(cycles);
        out.push_back(cs);
    }
    return out;
}

double Histogram::mass_between(double a, double b) const {
    if (total == 0) return 0.0;
    const double w = bin_width();
    double m = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double bin_lo = lo + static_cast<double>(i) * w;
        const double bin_hi = bin_lo + w;
        const double ov = std::max(0.0, std::min(b, bin_hi) - std::max(a, bin_lo));
        if (ov > 0.0) m += static_cast<double>(counts[i]) * (ov / w);
    }
    return m / static_cast<double>(total);
}

Histogram temperature_histogram(const std::vector<TempSample>& trace, Mode mode_filter,
                                int bins, double lo, double hi) {
    if (bins <= 0) throw std::invalid_argument("histogram: bins must be > 0");
    if (!(hi > lo)) throw std::invalid_argument("histogram: empty range");
    if (trace.empty()) throw std::invalid_argument("histogram: empty trace");

    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    const double w = (hi - lo) / bins;
    for (const auto& s : trace) {
        if (s.mode != mode_filter) continue;
        if (s.t_therm_c < lo || s.t_therm_c >= hi) continue;
        const auto idx = static_cast<std::size_t>((s.t_therm_c - lo) / w);
        ++h.counts[std::min(idx, h.counts.size() - 1)];
        ++h.total;
    }
    return h;
}

std::pair<double, double> linear_fit(const std::vector<double>& x,
                                     const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need >= 2 paired points");
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12 * std::max(1.0, sxx))
        throw std::invalid_argument("linear_fit: degenerate abscissa");
    const double b = (n * sxy - sx * sy) / denom;
    const double a = (sy - b * sx) / n;
    return {a, b};
}

PowerTempFit power_temperature_fit(const std::vector<double>& times_s,
                                   const std::vector<int>& house_ids,
                                   const std::vector<double>& power_w,
                                   const std::vector<double>& ambient_c,
                                   double on_threshold_w, double on_discard_s) {
    const std::size_t n = times_s.size();
    if (house_ids.size() != n || power_w.size() != n || ambient_c.size() != n)
        throw std::invalid_argument("power_temperature_fit: column sizes differ");

    // ON intervals per house from the power level; drop each interval's
    // first on_discard_s of samples.
    std::map<int, double> on_since;  // house -> ON start time
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < n; ++i) {
        const int id = house_ids[i];
        const bool on = power_w[i] > on_threshold_w;
        const auto it = on_since.find(id);
        if (on) {
            if (it == on_since.end()) {
                on_since[id] = times_s[i];
            } else if (times_s[i] - it->second >= on_discard_s) {
                xs.push_back(ambient_c[i]);
                ys.push_back(power_w[i]);
            }
        } else if (it != on_since.end()) {
            on_since.erase(it);
        }
    }
    if (xs.size() < 2)
        throw std::invalid_argument("power_temperature_fit: not enough ON samples");
    const double amb_min = *std::min_element(xs.begin(), xs.end());
    const double amb_max = *std::max_element(xs.begin(), xs.end());
    if (amb_max - amb_min < 1e-9)
        throw std::invalid_argument(
            "power_temperature_fit: need at least two distinct ambient temperatures");

    const auto [a, b] = linear_fit(xs, ys);
    PowerTempFit fit;
    fit.n_samples = static_cast<std::int64_t>(xs.size());
    fit.slope_w_per_c = b;
    double sx = 0.0;
    for (double x : xs) sx += x;
    fit.reference_ambient_c = sx / static_cast<double>(xs.size());
    fit.reference_power_w = a + b * fit.reference_ambient_c;
    if (fit.reference_power_w <= 0.0)
        throw std::invalid_argument("power_temperature_fit: nonpositive reference power");
    fit.slope_pct_per_c = 100.0 * b / fit.reference_power_w;
    return fit;
}

std::vector<DephasingPoint> dephasing_metric(const SwitchLog& log, int n_houses,
                                             double release_time_s, int max_cycles) {
    if (n_houses < 2)
        throw std::invalid_argument("dephasing_metric: need at least 2 houses");

    // Per house: switch-ON times after release, and the house's own mean
    // ON->ON period.
    std::vector<std::vector<double>> on_times(static_cast<std::size_t>(n_houses));
    for (const auto& ev : log) {
        if (ev.new_mode != Mode::On || ev.time_s < release_time_s) continue;
        if (ev.house_id < 0 || ev.house_id >= n_houses) continue;
        on_times[static_cast<std::size_t>(ev.house_id)].push_back(ev.time_s);
    }

    std::vector<double> period(static_cast<std::size_t>(n_houses), 0.0);
    int usable = 0;
    for (std::size_t i = 0; i < on_times.size(); ++i) {
        const auto& ts = on_times[i];
        if (ts.size() < 2) continue;
        period[i] = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
        if (period[i] > 0.0) ++usable;
    }
    if (usable < 2) return {};  // insufficient data

    // Phase of house i at cycle k: its k-th switch-ON offset from the
    // fleet-mean k-th switch-ON, in units of the house's own period,
    // embedded on the circle. Synchronized identical houses give zero at
    // every k; heterogeneous periods fan the phases out cycle by cycle.
    std::vector<DephasingPoint> out;
    for (int k = 0; k < max_cycles; ++k) {
        double t_mean = 0.0;
        int houses = 0;
        for (std::size_t i = 0; i < on_times.size(); ++i) {
            if (period[i] <= 0.0) continue;
            if (static_cast<std::size_t>(k) >= on_times[i].size()) continue;
            t_mean += on_times[i][static_cast<std::size_t>(k)];
            ++houses;
        }
        if (houses < 2) break;
        t_mean /= static_cast<double>(houses);

        double cx = 0.0, cy = 0.0;
        for (std::size_t i = 0; i < on_times.size(); ++i) {
            if (period[i] <= 0.0) continue;
            if (static_cast<std::size_t>(k) >= on_times[i].size()) continue;
            const double phase = 2.0 * M_PI *
                                 (on_times[i][static_cast<std::size_t>(k)] - t_mean) /
                                 period[i];
            cx += std::cos(phase);
            cy += std::sin(phase);
        }
        DephasingPoint p;
        p.cycle_index = k;
        p.houses = houses;
        p.circular_variance =
            1.0 - std::sqrt(cx * cx + cy * cy) / static_cast<double>(houses);
        out.push_back(p);
    }
    return out;
}

}  // namespace tcltb
