#pragma once

#include "tcltb/house.hpp"

namespace tcltb {

inline constexpr double kCelsiusToKelvin = 273.15;

/// Heat removal rate of the compressor loop at evaporator temperature
/// t1_kelvin: A * exp(-(L/R)/T1) / T1. Strictly increasing in T1 for
/// T1 < L/R. Throws std::domain_error for t1_kelvin <= 0.
double cooling_power(double t1_kelvin, const HouseParams& p);

/// Real electrical power of the running compressor:
/// gamma * qc * (T2 - T1)/T1 + w_fric. Temperatures in kelvin.
double compressor_power(double qc_w, double t1_kelvin, double t2_kelvin,
                        const HouseParams& p);

/// Thermostat-sensed temperature: (1 - f_hm) * t_a + f_hm * t_w.
double thermostat_temperature(const HouseState& s, const HouseParams& p);

/// Effective thermometer-water coupling from air speed past the sensor:
/// h / (rho * cp * v), clipped to [0, 1]. Monotone decreasing in v.
/// Throws std::domain_error for nonpositive inputs.
double effective_coupling(double air_speed_m_s, double h_w_m2c, double rho_kg_m3,
                          double cp_j_kgc);

struct NodeDerivatives {
    double dt_w = 0.0;
    double dt_a = 0.0;
    double dt_1 = 0.0;
    double dt_2 = 0.0;
};

/// Instantaneous boundary/internal heat flows, W. Used by the integrator
/// for per-node energy bookkeeping.
struct NodeFlows {
    double q_w = 0.0;        // injected into the water node
    double wall = 0.0;       // u_a * (t_amb - t_a), into the air node
    double water_air = 0.0;  // h_m * (t_w - t_a), water -> air
    double evap_air = 0.0;   // h_1 * (t_a - t_1), air -> evaporator
    double cond_amb = 0.0;   // h_2 * (t_amb - t_2), ambient -> condenser
    double q_c = 0.0;        // evaporator -> condenser lift (0 when OFF)
    double w_elec = 0.0;     // compressor electrical power (0 when OFF)
};

/// Right-hand side of the four-node heat flow equations. q_w_watts is the
/// total heat injected into the water (schedule plus fixed loads).
NodeDerivatives derivatives(const HouseState& s, double q_w_watts,
                            const AmbientInput& ambient, const HouseParams& p,
                            NodeFlows* flows = nullptr);

}  // namespace tcltb
