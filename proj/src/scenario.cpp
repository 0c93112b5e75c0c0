#include "tcltb/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <stdexcept>

#include "tcltb/client.hpp"
#include "tcltb/csv.hpp"
#include "tcltb/telemetry.hpp"
#include "tcltb/thermal.hpp"

namespace tcltb {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& dir, const std::string& name,
                       std::vector<std::string>& written) {
    const fs::path p = dir / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    written.push_back(p.string());
    return os;
}

void append_samples(RunResult& rr, const Fleet& fleet, double t,
                    const TelemetryConfig& tel) {
    auto meter = sample(fleet, t, tel);
    rr.meter.insert(rr.meter.end(), meter.begin(), meter.end());
    for (const auto& h : fleet.houses()) {
        TempSample ts;
        ts.timestamp_s = t;
        ts.house_id = h.id;
        ts.t_therm_c = thermostat_temperature(h.state, h.params);
        ts.t_a_c = h.state.t_a;
        ts.t_w_c = h.state.t_w;
        ts.mode = h.state.mode;
        rr.temps.push_back(ts);
    }
}

void write_switch_log(std::ostream& os, const SwitchLog& log) {
    os << "time_s,house_id,new_mode,cause\n";
    for (const auto& ev : log)
        csv::write_row(os, {csv::format_double(ev.time_s), std::to_string(ev.house_id),
                            to_string(ev.new_mode), to_string(ev.cause)});
}

void write_temps(std::ostream& os, const std::vector<TempSample>& temps) {
    os << "timestamp,house_id,t_therm_c,t_a_c,t_w_c,mode\n";
    for (const auto& t : temps)
        csv::write_row(os, {csv::format_double(t.timestamp_s), std::to_string(t.house_id),
                            csv::format_double(t.t_therm_c), csv::format_double(t.t_a_c),
                            csv::format_double(t.t_w_c), to_string(t.mode)});
}

void write_run_analyses(const ExperimentConfig& cfg, const RunResult& rr,
                        const fs::path& dir, std::vector<std::string>& written) {
    {
        auto os = open_out(dir, "duty.csv", written);
        os << "house_id,duty_pct,complete_cycles,insufficient\n";
        for (int id = 0; id < cfg.fleet.n_houses; ++id) {
            const auto d =
                duty_cycle(rr.switches, id, rr.duration_s, cfg.warmup_cycles);
            csv::write_row(os, {std::to_string(id), csv::format_double(d.percent),
                                std::to_string(d.complete_cycles),
                                d.insufficient ? "1" : "0"});
        }
    }
    {
        auto os = open_out(dir, "cycles.csv", written);
        os << "house_id,mean_on_s,mean_off_s,mean_cycle_s,complete_cycles\n";
        for (const auto& cs :
             cycle_durations(rr.switches, cfg.fleet.n_houses, cfg.warmup_cycles)) {
            csv::write_row(os, {std::to_string(cs.house_id), csv::format_double(cs.mean_on_s),
                                csv::format_double(cs.mean_off_s),
                                csv::format_double(cs.mean_cycle_s),
                                std::to_string(cs.complete_cycles)});
        }
    }
    const HouseParams& hp = cfg.fleet.base;
    for (const Mode mode : {Mode::On, Mode::Off}) {
        // Warm-up discarded by time: skip the first third of the run or
        // warmup_s, whichever is larger.
        const double cut = std::max(cfg.warmup_s, rr.duration_s / 3.0);
        std::vector<TempSample> post;
        for (const auto& t : rr.temps)
            if (t.timestamp_s >= cut) post.push_back(t);
        if (post.empty()) continue;
        try {
            const Histogram h = temperature_histogram(post, mode, 50, hp.t_minus(),
                                                      hp.t_plus());
            auto os = open_out(dir,
                               mode == Mode::On ? "histogram_on.csv" : "histogram_off.csv",
                               written);
            os << "bin_lo_c,bin_hi_c,count\n";
            for (std::size_t i = 0; i < h.counts.size(); ++i) {
                const double lo = h.lo + h.bin_width() * static_cast<double>(i);
                csv::write_row(os, {csv::format_double(lo),
                                    csv::format_double(lo + h.bin_width()),
                                    std::to_string(h.counts[i])});
            }
        } catch (const std::invalid_argument&) {
            // Empty trace for this mode; no histogram file.
        }
    }
}

void write_run_artifacts(const ExperimentConfig& cfg, const RunResult& rr,
                         const fs::path& dir, std::vector<std::string>& written) {
    {
        auto os = open_out(dir, "meter.csv", written);
        write_meter_header(os);
        write_meter_rows(os, rr.meter);
    }
    {
        auto os = open_out(dir, "ambient.csv", written);
        os << "timestamp,t_amb_c\n";
        for (double t = 0.0; t <= rr.duration_s; t += cfg.latch_dt_s)
            csv::write_row(os, {csv::format_double(t),
                                csv::format_double(cfg.fleet.ambient.at(t))});
    }
    {
        auto os = open_out(dir, "switch_log.csv", written);
        write_switch_log(os, rr.switches);
    }
    {
        auto os = open_out(dir, "temps.csv", written);
        write_temps(os, rr.temps);
    }
    write_run_analyses(cfg, rr, dir, written);
}

Fleet build_fleet_for(const ExperimentConfig& cfg) {
    Fleet fleet = Fleet::build(cfg.fleet);
    fleet.set_integrator(cfg.integrator);
    return fleet;
}

}  // namespace

RunResult simulate(Fleet& fleet, double duration_s, const TelemetryConfig& tel,
                   double latch_dt_s, RunDriver* driver) {
    RunResult rr;
    rr.duration_s = duration_s;
    const auto steps = static_cast<std::int64_t>(std::llround(duration_s / latch_dt_s));
    for (std::int64_t i = 0; i < steps; ++i) {
        const double t = fleet.clock_s();
        append_samples(rr, fleet, t, tel);
        if (driver) {
            for (const auto& req : driver->requests(fleet, t)) fleet.apply_request(req);
        }
        fleet.advance(latch_dt_s);
    }
    append_samples(rr, fleet, fleet.clock_s(), tel);
    rr.switches = fleet.switch_log();
    for (const auto& h : fleet.houses()) rr.fleet_electrical_j += h.electrical_j;
    return rr;
}

SweepRow measure_operating_point(const ExperimentConfig& cfg, const FleetSpec& spec,
                                 double grid_value, int measure_cycles,
                                 double max_sim_s) {
    Fleet fleet = Fleet::build(spec);
    fleet.set_integrator(cfg.integrator);
    const int needed = cfg.warmup_cycles + measure_cycles + 1;

    std::vector<int> on_events(static_cast<std::size_t>(spec.n_houses), 0);
    std::size_t scanned = 0;
    std::vector<double> on_power_sum(static_cast<std::size_t>(spec.n_houses), 0.0);
    std::vector<std::int64_t> on_power_n(static_cast<std::size_t>(spec.n_houses), 0);

    while (fleet.clock_s() < max_sim_s) {
        fleet.advance(cfg.latch_dt_s);
        const auto& log = fleet.switch_log();
        for (; scanned < log.size(); ++scanned) {
            if (log[scanned].new_mode == Mode::On)
                ++on_events[static_cast<std::size_t>(log[scanned].house_id)];
        }
        bool done = true;
        for (int id = 0; id < spec.n_houses; ++id) {
            const auto i = static_cast<std::size_t>(id);
            const auto& h = fleet.house(id);
            if (h.state.mode == Mode::On && on_events[i] > cfg.warmup_cycles) {
                on_power_sum[i] += h.power_w;
                ++on_power_n[i];
            }
            done = done && on_events[i] >= needed;
        }
        if (done) break;
    }

    SweepRow row;
    row.grid_value = grid_value;
    double duty_sum = 0.0, on_sum = 0.0, off_sum = 0.0, cyc_sum = 0.0;
    int duty_n = 0, cyc_n = 0;
    for (int id = 0; id < spec.n_houses; ++id) {
        const auto d = duty_cycle(fleet.switch_log(), id, fleet.clock_s(),
                                  cfg.warmup_cycles);
        duty_sum += d.percent;
        ++duty_n;
    }
    for (const auto& cs :
         cycle_durations(fleet.switch_log(), spec.n_houses, cfg.warmup_cycles)) {
        if (cs.insufficient) continue;
        on_sum += cs.mean_on_s;
        off_sum += cs.mean_off_s;
        cyc_sum += cs.mean_cycle_s;
        ++cyc_n;
    }
    row.duty_pct = duty_n ? duty_sum / duty_n : 0.0;
    if (cyc_n) {
        row.mean_on_s = on_sum / cyc_n;
        row.mean_off_s = off_sum / cyc_n;
        row.mean_cycle_s = cyc_sum / cyc_n;
    }
    double psum = 0.0;
    std::int64_t pn = 0;
    for (std::size_t i = 0; i < on_power_sum.size(); ++i) {
        psum += on_power_sum[i];
        pn += on_power_n[i];
    }
    row.mean_on_power_w = pn ? psum / static_cast<double>(pn) : 0.0;
    return row;
}

namespace {

void write_sweep_rows(std::ostream& os, const std::string& grid_name,
                      const std::vector<SweepRow>& rows) {
    os << grid_name << ",duty_pct,mean_on_s,mean_off_s,mean_cycle_s,mean_on_power_w\n";
    for (const auto& r : rows)
        csv::write_row(os, {csv::format_double(r.grid_value), csv::format_double(r.duty_pct),
                            csv::format_double(r.mean_on_s), csv::format_double(r.mean_off_s),
                            csv::format_double(r.mean_cycle_s),
                            csv::format_double(r.mean_on_power_w)});
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg,
                                const std::vector<double>& grid,
                                void (*apply)(FleetSpec&, double)) {
    std::vector<std::future<SweepRow>> futures;
    futures.reserve(grid.size());
    for (const double v : grid) {
        futures.push_back(std::async(std::launch::async, [&cfg, v, apply] {
            FleetSpec spec = cfg.fleet;
            apply(spec, v);
            return measure_operating_point(cfg, spec, v);
        }));
    }
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (auto& f : futures) rows.push_back(f.get());
    return rows;
}

struct ReleaseDriver : RunDriver {
    std::vector<SwitchRequest> requests(const Fleet& fleet, double t_s) override {
        std::vector<SwitchRequest> reqs;
        if (t_s == 0.0) {
            for (const auto& h : fleet.houses())
                reqs.push_back(SwitchRequest{h.id, Mode::On, t_s});
        }
        return reqs;
    }
};

}  // namespace

std::vector<std::string> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::exists(dir))
        throw std::runtime_error("cannot create output directory " + dir.string());

    std::vector<std::string> written;

    switch (cfg.scenario) {
        case Scenario::FixedSetpoint: {
            Fleet fleet = build_fleet_for(cfg);
            RunResult rr = simulate(fleet, cfg.duration_s, cfg.telemetry, cfg.latch_dt_s);
            write_run_artifacts(cfg, rr, dir, written);
            break;
        }
        case Scenario::HeatSweep: {
            auto rows = run_sweep(cfg, cfg.sweep_q_w, [](FleetSpec& s, double v) {
                for (auto& sched : s.schedules) sched.base_w = v;
            });
            auto os = open_out(dir, "heat_sweep.csv", written);
            write_sweep_rows(os, "q_w_w", rows);
            break;
        }
        case Scenario::FhmSweep: {
            auto rows = run_sweep(cfg, cfg.sweep_f_hm,
                                  [](FleetSpec& s, double v) { s.base.f_hm = v; });
            auto os = open_out(dir, "fhm_sweep.csv", written);
            write_sweep_rows(os, "f_hm", rows);
            break;
        }
        case Scenario::AmbientSweep: {
            // Pooled ON-power versus ambient across fixed-duration runs.
            std::vector<double> fit_t, fit_p, fit_amb;
            std::vector<int> fit_id;
            auto os = open_out(dir, "ambient_sweep.csv", written);
            os << "t_amb_c,mean_on_power_w,n_on_samples\n";
            double t_offset = 0.0;
            for (const double t_amb : cfg.sweep_t_amb) {
                ExperimentConfig point = cfg;
                point.fleet.ambient.constant_c = t_amb;
                point.fleet.ambient.profile.clear();
                Fleet fleet = build_fleet_for(point);
                RunResult rr =
                    simulate(fleet, cfg.duration_s, cfg.telemetry, cfg.latch_dt_s);

                // Per-house warm-up cutoff: the (warmup_cycles+1)-th ON event.
                std::vector<double> cutoff(static_cast<std::size_t>(point.fleet.n_houses),
                                           rr.duration_s);
                std::vector<int> ons(static_cast<std::size_t>(point.fleet.n_houses), 0);
                for (const auto& ev : rr.switches) {
                    if (ev.new_mode != Mode::On) continue;
                    const auto i = static_cast<std::size_t>(ev.house_id);
                    if (++ons[i] == cfg.warmup_cycles + 1)
                        cutoff[i] = std::min(cutoff[i], ev.time_s);
                }
                double psum = 0.0;
                std::int64_t pn = 0;
                const double threshold = cfg.fleet.base.q_fixed + 50.0;
                for (const auto& m : rr.meter) {
                    if (m.timestamp_s < cutoff[static_cast<std::size_t>(m.house_id)])
                        continue;
                    // Pooled timeline stays monotone across grid runs.
                    fit_t.push_back(t_offset + m.timestamp_s);
                    fit_id.push_back(m.house_id);
                    fit_p.push_back(m.real_w);
                    fit_amb.push_back(t_amb);
                    if (m.real_w > threshold) {
                        psum += m.real_w;
                        ++pn;
                    }
                }
                t_offset += rr.duration_s + 3600.0;
                csv::write_row(os, {csv::format_double(t_amb),
                                    csv::format_double(pn ? psum / static_cast<double>(pn) : 0.0),
                                    std::to_string(pn)});
            }
            const PowerTempFit fit = power_temperature_fit(
                fit_t, fit_id, fit_p, fit_amb, cfg.fleet.base.q_fixed + 50.0);
            auto fos = open_out(dir, "fit.csv", written);
            fos << "slope_w_per_c,slope_pct_per_c,reference_power_w,reference_ambient_c,"
                   "n_samples\n";
            csv::write_row(fos, {csv::format_double(fit.slope_w_per_c),
                                 csv::format_double(fit.slope_pct_per_c),
                                 csv::format_double(fit.reference_power_w),
                                 csv::format_double(fit.reference_ambient_c),
                                 std::to_string(fit.n_samples)});
            break;
        }
        case Scenario::SquareWave: {
            Fleet fleet = build_fleet_for(cfg);
            ServerConfig scfg = cfg.server;
            scfg.mode = ServeMode::Lockstep;
            scfg.port = 0;  // ephemeral; this scenario is self-contained
            scfg.latch_dt_s = cfg.latch_dt_s;
            scfg.max_steps = static_cast<std::int64_t>(cfg.duration_s / cfg.latch_dt_s);
            ControlServer server(fleet, scfg);

            RunResult rr;
            server.on_step = [&](std::int64_t) {
                append_samples(rr, fleet, fleet.clock_s(), cfg.telemetry);
            };
            server.start();

            ExerciserOptions eopt;
            eopt.period_s = cfg.square_period_s;
            eopt.duty_pct = cfg.square_duty_pct;
            auto client_future = std::async(std::launch::async, [&] {
                return square_wave_exerciser("127.0.0.1", server.port(), eopt);
            });
            server.run();
            const ExerciserResult ex = client_future.get();

            append_samples(rr, fleet, fleet.clock_s(), cfg.telemetry);
            rr.duration_s = fleet.clock_s();
            rr.switches = fleet.switch_log();
            write_run_artifacts(cfg, rr, dir, written);

            auto os = open_out(dir, "verdicts.csv", written);
            os << "requests_sent,accepted,rejected_lockout,rejected_thermostat,"
                  "no_change\n";
            csv::write_row(os, {std::to_string(ex.requests_sent), std::to_string(ex.accepted),
                                std::to_string(ex.rejected_lockout),
                                std::to_string(ex.rejected_thermostat),
                                std::to_string(ex.no_change)});
            break;
        }
        case Scenario::ReleaseTest: {
            Fleet fleet = build_fleet_for(cfg);
            ReleaseDriver driver;
            RunResult rr =
                simulate(fleet, cfg.duration_s, cfg.telemetry, cfg.latch_dt_s, &driver);
            write_run_artifacts(cfg, rr, dir, written);

            const auto points =
                dephasing_metric(rr.switches, cfg.fleet.n_houses, 0.0, 16);
            auto os = open_out(dir, "dephasing.csv", written);
            os << "cycle_index,circular_variance,houses\n";
            for (const auto& p : points)
                csv::write_row(os, {std::to_string(p.cycle_index),
                                    csv::format_double(p.circular_variance),
                                    std::to_string(p.houses)});
            break;
        }
        case Scenario::Serve: {
            Fleet fleet = build_fleet_for(cfg);
            ServerConfig scfg = cfg.server;
            scfg.latch_dt_s = cfg.latch_dt_s;
            if (scfg.max_steps < 0)
                scfg.max_steps = static_cast<std::int64_t>(cfg.duration_s / cfg.latch_dt_s);
            ControlServer server(fleet, scfg);
            RunResult rr;
            server.on_step = [&](std::int64_t) {
                append_samples(rr, fleet, fleet.clock_s(), cfg.telemetry);
            };
            server.start();
            server.run();
            append_samples(rr, fleet, fleet.clock_s(), cfg.telemetry);
            rr.duration_s = fleet.clock_s();
            rr.switches = fleet.switch_log();
            write_run_artifacts(cfg, rr, dir, written);
            break;
        }
    }

    if (cfg.write_inrush_dump) {
        auto os = open_out(dir, "inrush.csv", written);
        os << "t_s,current_a\n";
        const double dt = cfg.inrush.decay_time_s / 50.0;
        const double t_end = 12.0 / cfg.inrush.line_freq_hz;
        for (double t = 0.0; t <= t_end; t += dt)
            csv::write_row(os, {csv::format_double(t),
                                csv::format_double(inrush_waveform(t, 1.0, cfg.inrush))});
    }
    return written;
}

}  // namespace tcltb
