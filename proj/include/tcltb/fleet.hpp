#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tcltb/house.hpp"
#include "tcltb/integrate.hpp"
#include "tcltb/schedule.hpp"
#include "tcltb/switching.hpp"

namespace tcltb {

/// Relative jitter fractions applied per house, each in [0, 0.5].
/// thirty_gal_fraction selects the 476 kJ/degC tank with that probability
/// (0 keeps every house on the 20 gal tank, making zero-jitter fleets
/// exactly identical).
struct ParamJitter {
    double u_a = 0.0;
    double h_m = 0.0;
    double q_fixed = 0.0;
    double f_hm = 0.0;
    double c_r = 0.0;
    double h_1 = 0.0;
    double thirty_gal_fraction = 0.0;
};

struct FleetSpec {
    int n_houses = 20;
    HouseParams base;
    ParamJitter jitter;
    std::uint64_t rng_seed = 1;
    AmbientInput ambient;
    // One entry shared by all houses, or exactly n_houses entries.
    std::vector<HeatSchedule> schedules = {HeatSchedule{}};
    double c_w_20gal = 317000.0;
    double c_w_30gal = 476000.0;

    void validate() const;
};

enum class SwitchCause { Thermostat, External };

inline const char* to_string(SwitchCause c) {
    return c == SwitchCause::Thermostat ? "THERMOSTAT" : "EXTERNAL";
}

struct SwitchEvent {
    double time_s = 0.0;
    int house_id = 0;
    Mode new_mode = Mode::Off;
    SwitchCause cause = SwitchCause::Thermostat;
};

using SwitchLog = std::vector<SwitchEvent>;

struct House {
    int id = 0;
    HouseParams params;
    HouseState state;
    ScheduleEvaluator schedule;
    double power_w = 0.0;       // instantaneous real electrical power
    EnergyLedger ledger;        // running flow integrals since t = 0
    double electrical_j = 0.0;  // compressor + fixed loads since t = 0
};

/// The ensemble of independent houses on one logical timeline. Houses
/// never read each other's state; events from one latch step are merged
/// by (time, house id).
class Fleet {
  public:
    static Fleet build(const FleetSpec& spec);

    /// Advances every house by dt_s (the latch step), applying thermostat
    /// decisions at deadband crossings and honoring lockout. Appends the
    /// step's switch events to the log and refreshes per-house power.
    void advance(double dt_s);

    /// Adjudicates one external request against the targeted house and
    /// applies it if accepted. Throws std::out_of_range for an unknown
    /// house id.
    Verdict apply_request(const SwitchRequest& req);

    double aggregate_power_w() const;
    double clock_s() const { return clock_s_; }

    std::span<const House> houses() const { return houses_; }
    House& house(int id);
    const House& house(int id) const;
    int size() const { return static_cast<int>(houses_.size()); }

    const SwitchLog& switch_log() const { return log_; }
    const AmbientInput& ambient() const { return ambient_; }
    const IntegrateOptions& integrator() const { return integrate_opt_; }
    void set_integrator(const IntegrateOptions& opt) { integrate_opt_ = opt; }

  private:
    void advance_house(House& h, double dt_s, SwitchLog& events);
    void apply_switch(House& h, Mode new_mode, SwitchCause cause, SwitchLog& events);
    static double house_power_w(const House& h);

    std::vector<House> houses_;
    AmbientInput ambient_;
    SwitchLog log_;
    IntegrateOptions integrate_opt_;
    double clock_s_ = 0.0;
};

}  // namespace tcltb
