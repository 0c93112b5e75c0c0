#include "tcltb/switching.hpp"

#include "tcltb/thermal.hpp"

namespace tcltb {

const char* to_string(VerdictReason r) {
    switch (r) {
        case VerdictReason::Applied: return "APPLIED";
        case VerdictReason::LockoutActive: return "LOCKOUT_ACTIVE";
        case VerdictReason::ThermostatOverride: return "THERMOSTAT_OVERRIDE";
        case VerdictReason::NoChange: return "NO_CHANGE";
    }
    return "?";
}

Mode thermostat_decision(double t_therm, Mode current, const HouseParams& p) {
    if (t_therm >= p.t_plus()) return Mode::On;
    if (t_therm <= p.t_minus()) return Mode::Off;
    return current;
}

Verdict adjudicate(const SwitchRequest& req, const HouseState& s,
                   const HouseParams& p) {
    if (req.desired_mode == s.mode) return Verdict{true, VerdictReason::NoChange};

    if (req.desired_mode == Mode::On) {
        if (s.time_since_off < p.lockout_s)
            return Verdict{false, VerdictReason::LockoutActive};
        if (thermostat_temperature(s, p) <= p.t_minus())
            return Verdict{false, VerdictReason::ThermostatOverride};
    } else {
        if (p.min_on_s > 0.0 && s.time_in_mode < p.min_on_s)
            return Verdict{false, VerdictReason::LockoutActive};
        if (thermostat_temperature(s, p) >= p.t_plus())
            return Verdict{false, VerdictReason::ThermostatOverride};
    }
    return Verdict{true, VerdictReason::Applied};
}

}  // namespace tcltb
