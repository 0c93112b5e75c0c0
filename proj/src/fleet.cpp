#include "tcltb/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tcltb/thermal.hpp"

namespace tcltb {

void FleetSpec::validate() const {
    if (n_houses < 1) throw std::invalid_argument("n_houses must be >= 1");
    base.validate();
    auto frac = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 0.5))
            throw std::invalid_argument(std::string(name) + " jitter must be in [0, 0.5]");
    };
    frac(jitter.u_a, "u_a");
    frac(jitter.h_m, "h_m");
    frac(jitter.q_fixed, "q_fixed");
    frac(jitter.f_hm, "f_hm");
    frac(jitter.c_r, "c_r");
    frac(jitter.h_1, "h_1");
    if (!(jitter.thirty_gal_fraction >= 0.0 && jitter.thirty_gal_fraction <= 1.0))
        throw std::invalid_argument("thirty_gal_fraction must be in [0, 1]");
    if (schedules.empty())
        throw std::invalid_argument("at least one heat schedule required");
    if (schedules.size() != 1 && static_cast<int>(schedules.size()) != n_houses)
        throw std::invalid_argument("schedules: provide one shared or one per house");
    for (const auto& s : schedules) s.validate();
    if (!(c_w_20gal > 0.0) || !(c_w_30gal > 0.0))
        throw std::invalid_argument("tank heat capacities must be > 0");
}

Fleet Fleet::build(const FleetSpec& spec) {
    spec.validate();
    Fleet fleet;
    fleet.ambient_ = spec.ambient;
    fleet.houses_.reserve(static_cast<std::size_t>(spec.n_houses));

    for (int i = 0; i < spec.n_houses; ++i) {
        RngStream draw(mix_seed(spec.rng_seed, static_cast<std::uint64_t>(i)));
        HouseParams p = spec.base;

        // Tank size choice first, then independent uniform jitter per field.
        if (spec.jitter.thirty_gal_fraction > 0.0 &&
            draw.uniform01() < spec.jitter.thirty_gal_fraction) {
            p.c_w = spec.c_w_30gal;
        } else {
            p.c_w = spec.c_w_20gal;
        }
        auto jitter = [&draw](double base, double frac) {
            return frac > 0.0 ? base * (1.0 + frac * (2.0 * draw.uniform01() - 1.0))
                              : base;
        };
        p.u_a = jitter(p.u_a, spec.jitter.u_a);
        p.h_m = jitter(p.h_m, spec.jitter.h_m);
        p.q_fixed = jitter(p.q_fixed, spec.jitter.q_fixed);
        p.f_hm = std::clamp(jitter(p.f_hm, spec.jitter.f_hm), 0.0, 1.0);
        p.c_r = jitter(p.c_r, spec.jitter.c_r);
        p.h_1 = jitter(p.h_1, spec.jitter.h_1);
        p.validate();

        const HeatSchedule& sched =
            spec.schedules.size() == 1 ? spec.schedules.front()
                                       : spec.schedules[static_cast<std::size_t>(i)];

        House h;
        h.id = i;
        h.params = p;
        h.schedule = ScheduleEvaluator(
            sched, mix_seed(spec.rng_seed ^ 0x5eedf00dULL, static_cast<std::uint64_t>(i)));

        // Mid-deadband start, compressor off and immediately switchable.
        h.state.t_w = p.setpoint;
        h.state.t_a = p.setpoint;
        h.state.t_1 = p.setpoint;
        h.state.t_2 = spec.ambient.at(0.0);
        h.state.mode = Mode::Off;
        h.state.time_in_mode = 0.0;
        h.state.time_since_off = p.lockout_s;
        h.state.clock = 0.0;
        h.power_w = house_power_w(h);

        fleet.houses_.push_back(std::move(h));
    }
    return fleet;
}

House& Fleet::house(int id) {
    if (id < 0 || id >= size()) throw std::out_of_range("unknown house id " + std::to_string(id));
    return houses_[static_cast<std::size_t>(id)];
}

const House& Fleet::house(int id) const {
    if (id < 0 || id >= size()) throw std::out_of_range("unknown house id " + std::to_string(id));
    return houses_[static_cast<std::size_t>(id)];
}

double Fleet::house_power_w(const House& h) {
    if (h.state.mode != Mode::On) return h.params.q_fixed;
    const double t1k = h.state.t_1 + kCelsiusToKelvin;
    const double t2k = h.state.t_2 + kCelsiusToKelvin;
    const double qc = cooling_power(t1k, h.params);
    return compressor_power(qc, t1k, t2k, h.params) + h.params.q_fixed;
}

double Fleet::aggregate_power_w() const {
    double sum = 0.0;
    for (const auto& h : houses_) sum += h.power_w;
    return sum;
}

void Fleet::apply_switch(House& h, Mode new_mode, SwitchCause cause,
                         SwitchLog& events) {
    if (h.state.mode == new_mode) return;
    if (h.state.mode == Mode::On && new_mode == Mode::Off)
        h.state.time_since_off = 0.0;
    h.state.mode = new_mode;
    h.state.time_in_mode = 0.0;
    events.push_back(SwitchEvent{h.state.clock, h.id, new_mode, cause});
}

Verdict Fleet::apply_request(const SwitchRequest& req) {
    House& h = house(req.house_id);  // throws for unknown ids
    SwitchLog events;
    const Verdict v = adjudicate(req, h.state, h.params);
    if (v.accepted && v.reason == VerdictReason::Applied) {
        apply_switch(h, req.desired_mode, SwitchCause::External, events);
        h.power_w = house_power_w(h);
        log_.insert(log_.end(), events.begin(), events.end());
    }
    return v;
}

void Fleet::advance_house(House& h, double dt_s, SwitchLog& events) {
    const double q_w = h.schedule.eval(h.state.clock) + h.params.q_fixed;
    double remaining = dt_s;
    int guard = 0;

    // Events-off integration for dwell holds (lockout, minimum ON).
    auto wait_hold = [&](double hold) {
        const double wait = std::min(hold, remaining);
        IntegrateOptions opt = integrate_opt_;
        opt.detect_events = false;
        EnergyLedger before = h.ledger;
        auto r = integrate_to_event(h.state, q_w, ambient_, h.params, wait, opt,
                                    &h.ledger);
        h.state = r.state;
        h.electrical_j +=
            (h.ledger - before).compressor_j + h.params.q_fixed * r.elapsed_s;
        remaining -= r.elapsed_s;
    };
    // Remaining dwell before the house may switch to `want`; sub-ns
    // remainders count as expired.
    auto dwell_remaining = [&](Mode want) {
        double hold = 0.0;
        if (want == Mode::On && h.state.time_since_off < h.params.lockout_s)
            hold = h.params.lockout_s - h.state.time_since_off;
        else if (want == Mode::Off && h.params.min_on_s > 0.0 &&
                 h.state.time_in_mode < h.params.min_on_s)
            hold = h.params.min_on_s - h.state.time_in_mode;
        return hold > 1e-9 ? hold : 0.0;
    };

    while (remaining > 1e-9) {
        if (++guard > 100000)
            throw IntegrationError("house " + std::to_string(h.id) +
                                   ": no progress within one latch step");

        // Boundary conditions the event integrator cannot see: a state
        // already at/over a limit (external flips, lockout releases).
        const double t_therm = thermostat_temperature(h.state, h.params);
        const Mode want = thermostat_decision(t_therm, h.state.mode, h.params);
        if (want != h.state.mode) {
            if (const double hold = dwell_remaining(want); hold > 0.0) {
                wait_hold(hold);
            } else {
                apply_switch(h, want, SwitchCause::Thermostat, events);
            }
            continue;
        }

        EnergyLedger before = h.ledger;
        auto r = integrate_to_event(h.state, q_w, ambient_, h.params, remaining,
                                    integrate_opt_, &h.ledger);
        h.state = r.state;
        h.electrical_j += (h.ledger - before).compressor_j +
                          h.params.q_fixed * r.elapsed_s;
        remaining -= r.elapsed_s;
        if (remaining <= 1e-9 && r.event == StepEvent::Horizon) break;

        if (r.event == StepEvent::ReachedTMinus && h.state.mode == Mode::On) {
            if (const double hold = dwell_remaining(Mode::Off); hold > 0.0)
                wait_hold(hold);
            else
                apply_switch(h, Mode::Off, SwitchCause::Thermostat, events);
        } else if (r.event == StepEvent::ReachedTPlus && h.state.mode == Mode::Off) {
            if (const double hold = dwell_remaining(Mode::On); hold > 0.0)
                wait_hold(hold);
            else
                apply_switch(h, Mode::On, SwitchCause::Thermostat, events);
        }
    }
}

void Fleet::advance(double dt_s) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("advance: dt must be > 0");

    SwitchLog step_events;
    for (auto& h : houses_) {
        try {
            advance_house(h, dt_s, step_events);
        } catch (const IntegrationError& e) {
            throw IntegrationError("house " + std::to_string(h.id) + ": " + e.what());
        }
        h.power_w = house_power_w(h);
    }
    clock_s_ += dt_s;

    // Deterministic merge across houses.
    std::stable_sort(step_events.begin(), step_events.end(),
                     [](const SwitchEvent& a, const SwitchEvent& b) {
                         if (a.time_s != b.time_s) return a.time_s < b.time_s;
                         return a.house_id < b.house_id;
                     });
    log_.insert(log_.end(), step_events.begin(), step_events.end());
}

}  // namespace tcltb
