// tcltb: virtual 20-house air-conditioner testbed runner.
//
// Subcommands: run, sweep, serve, exercise, analyze. Exit codes: 0 ok,
// 1 configuration error, 2 runtime error. TCLTB_LOG=debug for verbose
// progress on stderr.

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "tcltb/analysis.hpp"
#include "tcltb/client.hpp"
#include "tcltb/config.hpp"
#include "tcltb/csv.hpp"
#include "tcltb/scenario.hpp"
#include "tcltb/telemetry.hpp"

namespace {

bool log_enabled() {
    const char* v = std::getenv("TCLTB_LOG");
    return v && std::string(v) != "" && std::string(v) != "off";
}

void logln(const std::string& s) {
    if (log_enabled()) std::cerr << "tcltb: " << s << "\n";
}

int run_config(const std::string& path, const std::string& out_override,
               bool sweep_only, bool force_serve = false) {
    tcltb::ExperimentConfig cfg = tcltb::load_experiment_config(path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (force_serve) cfg.scenario = tcltb::Scenario::Serve;
    if (sweep_only && cfg.scenario != tcltb::Scenario::HeatSweep &&
        cfg.scenario != tcltb::Scenario::FhmSweep &&
        cfg.scenario != tcltb::Scenario::AmbientSweep) {
        std::cerr << "tcltb: sweep: config scenario '" << to_string(cfg.scenario)
                  << "' is not a sweep\n";
        return 1;
    }
    logln("scenario " + std::string(to_string(cfg.scenario)));
    for (const auto& f : tcltb::run_experiment(cfg)) logln("wrote " + f);
    return 0;
}

// switch-log CSV -> SwitchLog (time_s,house_id,new_mode,cause)
tcltb::SwitchLog read_switch_log(const std::string& path, int& n_houses,
                                 double& end_s) {
    const auto rows = tcltb::csv::read_file(path);
    if (rows.empty()) throw std::runtime_error(path + ": empty switch log");
    tcltb::SwitchLog log;
    n_houses = 0;
    end_s = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() < 4)
            throw std::runtime_error(path + ": row " + std::to_string(i + 1) +
                                     ": need 4 columns");
        tcltb::SwitchEvent ev;
        ev.time_s = std::stod(r[0]);
        ev.house_id = std::stoi(r[1]);
        ev.new_mode = r[2] == "ON" ? tcltb::Mode::On : tcltb::Mode::Off;
        ev.cause = r[3] == "EXTERNAL" ? tcltb::SwitchCause::External
                                      : tcltb::SwitchCause::Thermostat;
        log.push_back(ev);
        n_houses = std::max(n_houses, ev.house_id + 1);
        end_s = std::max(end_s, ev.time_s);
    }
    return log;
}

int analyze(const std::vector<std::string>& files, const std::string& kind,
            int warmup, int bins, double window_s) {
    using namespace tcltb;
    if (kind == "duty" || kind == "cycles" || kind == "dephasing" ||
        kind == "coincident-inrush") {
        int n_houses = 0;
        double end_s = 0.0;
        SwitchLog log = read_switch_log(files.at(0), n_houses, end_s);
        if (kind == "duty") {
            std::cout << "house_id,duty_pct,complete_cycles,insufficient\n";
            for (int id = 0; id < n_houses; ++id) {
                const auto d = duty_cycle(log, id, end_s, warmup);
                std::cout << id << "," << csv::format_double(d.percent) << ","
                          << d.complete_cycles << "," << (d.insufficient ? 1 : 0) << "\n";
            }
        } else if (kind == "cycles") {
            std::cout << "house_id,mean_on_s,mean_off_s,mean_cycle_s,complete_cycles\n";
            for (const auto& cs : cycle_durations(log, n_houses, warmup))
                std::cout << cs.house_id << "," << csv::format_double(cs.mean_on_s) << ","
                          << csv::format_double(cs.mean_off_s) << ","
                          << csv::format_double(cs.mean_cycle_s) << ","
                          << cs.complete_cycles << "\n";
        } else if (kind == "dephasing") {
            std::cout << "cycle_index,circular_variance,houses\n";
            for (const auto& p : dephasing_metric(log, n_houses, 0.0, 16))
                std::cout << p.cycle_index << ","
                          << csv::format_double(p.circular_variance) << "," << p.houses
                          << "\n";
        } else {
            std::vector<double> on_times;
            for (const auto& ev : log)
                if (ev.new_mode == Mode::On) on_times.push_back(ev.time_s);
            InrushParams p;
            std::cout << "peak_over_steady\n"
                      << csv::format_double(coincident_inrush(on_times, window_s, p))
                      << "\n";
        }
        return 0;
    }
    if (kind == "histogram") {
        // temps.csv: timestamp,house_id,t_therm_c,t_a_c,t_w_c,mode
        const auto rows = csv::read_file(files.at(0));
        std::vector<TempSample> trace;
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            TempSample t;
            t.timestamp_s = std::stod(rows[i].at(0));
            t.house_id = std::stoi(rows[i].at(1));
            t.t_therm_c = std::stod(rows[i].at(2));
            t.mode = rows[i].at(5) == "ON" ? Mode::On : Mode::Off;
            trace.push_back(t);
            lo = std::min(lo, t.t_therm_c);
            hi = std::max(hi, t.t_therm_c);
        }
        for (const Mode m : {Mode::On, Mode::Off}) {
            const auto h = temperature_histogram(trace, m, bins, lo, hi + 1e-9);
            std::cout << "# mode " << to_string(m) << "\n";
            std::cout << "bin_lo_c,bin_hi_c,count\n";
            for (std::size_t i = 0; i < h.counts.size(); ++i) {
                const double blo = h.lo + h.bin_width() * static_cast<double>(i);
                std::cout << csv::format_double(blo) << ","
                          << csv::format_double(blo + h.bin_width()) << "," << h.counts[i]
                          << "\n";
            }
        }
        return 0;
    }
    if (kind == "power-temp-fit") {
        // meter.csv plus an ambient trace CSV (timestamp,t_amb_c); with a
        // single file, a constant ambient column is required inside it.
        const auto meter = csv::read_file(files.at(0));
        std::vector<double> t, p, amb;
        std::vector<int> id;
        std::map<long long, double> amb_by_ts;
        if (files.size() > 1) {
            const auto ambrows = csv::read_file(files.at(1));
            for (std::size_t i = 1; i < ambrows.size(); ++i)
                amb_by_ts[std::llround(std::stod(ambrows[i].at(0)))] =
                    std::stod(ambrows[i].at(1));
        }
        if (amb_by_ts.empty())
            throw std::runtime_error(
                "power-temp-fit needs an ambient trace CSV (timestamp,t_amb_c)");
        double q_fixed_guess = 1e300;
        for (std::size_t i = 1; i < meter.size(); ++i) {
            const double watts = std::stod(meter[i].at(2));
            q_fixed_guess = std::min(q_fixed_guess, watts);
        }
        for (std::size_t i = 1; i < meter.size(); ++i) {
            const double ts = std::stod(meter[i].at(0));
            const auto it = amb_by_ts.find(std::llround(ts));
            if (it == amb_by_ts.end()) continue;
            t.push_back(ts);
            id.push_back(std::stoi(meter[i].at(1)));
            p.push_back(std::stod(meter[i].at(2)));
            amb.push_back(it->second);
        }
        const auto fit = power_temperature_fit(t, id, p, amb, q_fixed_guess + 50.0);
        std::cout << "slope_w_per_c,slope_pct_per_c,reference_power_w,"
                     "reference_ambient_c,n_samples\n"
                  << csv::format_double(fit.slope_w_per_c) << ","
                  << csv::format_double(fit.slope_pct_per_c) << ","
                  << csv::format_double(fit.reference_power_w) << ","
                  << csv::format_double(fit.reference_ambient_c) << "," << fit.n_samples
                  << "\n";
        return 0;
    }
    std::cerr << "tcltb: analyze: unknown kind '" << kind << "'\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Virtual thermostatically-controlled-load testbed"};
    app.require_subcommand(1);

    std::string config_path, out_dir, endpoint, kind = "duty";
    std::vector<std::string> files;
    double period = 600.0, duty = 50.0, window = 1.0;
    std::int64_t steps = -1;
    bool silent = false;
    int warmup = 3, bins = 50;

    auto* run_cmd = app.add_subcommand("run", "Run a scenario from a config file");
    run_cmd->add_option("config", config_path, "config file")->required();
    run_cmd->add_option("--out", out_dir, "override output directory");

    auto* sweep_cmd = app.add_subcommand("sweep", "Run a sweep scenario");
    sweep_cmd->add_option("config", config_path, "config file")->required();
    sweep_cmd->add_option("--out", out_dir, "override output directory");

    auto* serve_cmd = app.add_subcommand("serve", "Serve the control protocol");
    serve_cmd->add_option("config", config_path, "config file")->required();
    serve_cmd->add_option("--out", out_dir, "override output directory");

    auto* ex_cmd = app.add_subcommand("exercise", "Square-wave protocol client");
    ex_cmd->add_option("endpoint", endpoint, "host:port")->required();
    ex_cmd->add_option("--period", period, "square wave period, s");
    ex_cmd->add_option("--duty", duty, "square wave duty, percent");
    ex_cmd->add_option("--steps", steps, "stop after N latch steps");
    ex_cmd->add_flag("--silent", silent, "send empty request frames only");

    auto* an_cmd = app.add_subcommand("analyze", "Analyze run CSV artifacts");
    an_cmd->add_option("files", files, "input CSV file(s)")->required();
    an_cmd->add_option("--kind", kind,
                       "duty|cycles|histogram|power-temp-fit|dephasing|coincident-inrush");
    an_cmd->add_option("--warmup", warmup, "cycles to discard");
    an_cmd->add_option("--bins", bins, "histogram bins");
    an_cmd->add_option("--window", window, "coincident-inrush window, s");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return run_config(config_path, out_dir, false);
        if (sweep_cmd->parsed()) return run_config(config_path, out_dir, true);
        if (serve_cmd->parsed()) return run_config(config_path, out_dir, false, true);
        if (ex_cmd->parsed()) {
            const auto colon = endpoint.rfind(':');
            if (colon == std::string::npos) {
                std::cerr << "tcltb: exercise: endpoint must be host:port\n";
                return 1;
            }
            tcltb::ExerciserOptions opt;
            opt.period_s = period;
            opt.duty_pct = duty;
            opt.max_steps = steps;
            opt.silent = silent;
            const auto res = tcltb::square_wave_exerciser(
                endpoint.substr(0, colon),
                static_cast<std::uint16_t>(std::stoi(endpoint.substr(colon + 1))), opt);
            std::cout << "steps," << res.steps << "\nrequests_sent," << res.requests_sent
                      << "\naccepted," << res.accepted << "\nrejected_lockout,"
                      << res.rejected_lockout << "\nrejected_thermostat,"
                      << res.rejected_thermostat << "\nno_change," << res.no_change
                      << "\n";
            return 0;
        }
        if (an_cmd->parsed()) return analyze(files, kind, warmup, bins, window);
    } catch (const tcltb::ConfigError& e) {
        std::cerr << "tcltb: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "tcltb: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "tcltb: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
