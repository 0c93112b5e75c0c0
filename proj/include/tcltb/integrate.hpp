#pragma once

#include <stdexcept>
#include <string>

#include "tcltb/house.hpp"
#include "tcltb/thermal.hpp"

namespace tcltb {

enum class StepEvent { Horizon, ReachedTMinus, ReachedTPlus };

inline const char* to_string(StepEvent e) {
    switch (e) {
        case StepEvent::Horizon: return "HORIZON";
        case StepEvent::ReachedTMinus: return "REACHED_T_MINUS";
        case StepEvent::ReachedTPlus: return "REACHED_T_PLUS";
    }
    return "?";
}

struct IntegrateOptions {
    double dt_s = 0.1;              // internal RK4 step
    double event_time_tol_s = 1e-3; // bisection window for crossings
    bool detect_events = true;
};

class IntegrationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Time integrals of the NodeFlows terms, J. Accumulated with the same
/// RK4 stage weights as the state update, so the per-node identities
///   c_w*dT_w = injected - water_air
///   c_r*dT_a = wall + water_air - evap_air
///   c_1*dT_1 = evap_air - cooling
///   c_2*dT_2 = cond_amb + cooling + compressor
/// hold to rounding error over any integration span.
struct EnergyLedger {
    double injected_j = 0.0;
    double wall_j = 0.0;
    double water_air_j = 0.0;
    double evap_air_j = 0.0;
    double cond_amb_j = 0.0;
    double cooling_j = 0.0;
    double compressor_j = 0.0;

    EnergyLedger& operator-=(const EnergyLedger& o);
    EnergyLedger operator-(const EnergyLedger& o) const;
};

/// Sum of c_i * (b.t_i - a.t_i) over the four nodes, J.
double stored_energy_delta(const HouseState& a, const HouseState& b,
                           const HouseParams& p);

struct IntegrateResult {
    HouseState state;
    StepEvent event = StepEvent::Horizon;
    double elapsed_s = 0.0;
};

/// Advances the house ODE with fixed-step classical RK4. While ON, a
/// T_therm crossing of T_minus ends the step (REACHED_T_MINUS); while
/// OFF, a crossing of T_plus ends it (REACHED_T_PLUS). Crossings are
/// localized by bisection to within event_time_tol_s and the returned
/// state sits on the in-band side of the limit. The compressor mode is
/// not changed here.
IntegrateResult integrate_to_event(const HouseState& start, double q_w_watts,
                                   const AmbientInput& ambient,
                                   const HouseParams& p, double horizon_s,
                                   const IntegrateOptions& opt = {},
                                   EnergyLedger* ledger = nullptr);

}  // namespace tcltb
