#pragma once

#include "tcltb/house.hpp"

namespace tcltb {

struct SwitchRequest {
    int house_id = 0;
    Mode desired_mode = Mode::Off;
    double request_time_s = 0.0;
};

enum class VerdictReason { Applied, LockoutActive, ThermostatOverride, NoChange };

const char* to_string(VerdictReason r);

struct Verdict {
    bool accepted = false;
    VerdictReason reason = VerdictReason::ThermostatOverride;
};

/// Bang-bang thermostat with hysteresis on the sensed temperature:
/// at or above T_plus -> ON, at or below T_minus -> OFF, otherwise the
/// current mode is held.
Mode thermostat_decision(double t_therm, Mode current, const HouseParams& p);

/// Reconciles an external switch request with local safety. Authority
/// ordering: lockout, then thermostat limits, then the request.
/// Lockout applies only to OFF->ON; a configurable minimum ON dwell
/// (default 0) guards ON->OFF symmetrically. Requests matching the
/// current mode are accepted as NO_CHANGE.
Verdict adjudicate(const SwitchRequest& req, const HouseState& s,
                   const HouseParams& p);

}  // namespace tcltb
