#pragma once

#include <cmath>
#include <limits>
#include <vector>
#include <utility>

namespace tcltb {

enum class Mode { Off, On };

inline const char* to_string(Mode m) { return m == Mode::On ? "ON" : "OFF"; }

/// Thermal, compressor and thermostat constants for one model house.
///
/// Temperatures are handled in degrees Celsius throughout the state
/// vector; the compressor laws convert to kelvin internally.
struct HouseParams {
    // Heat capacities, J/degC.
    double c_w = 317000.0;  // water tank (20 gal); 476000 for the 30 gal tank
    double c_r = 12000.0;   // room air node, including strongly coupled interior mass
    double c_1 = 6000.0;    // evaporator (cold heat exchanger)
    double c_2 = 2000.0;    // condenser (hot heat exchanger)

    // Conductances, W/degC.
    double u_a = 5.0;    // walls to ambient
    double h_m = 230.0;  // water <-> air heat exchanger
    double h_1 = 150.0;  // evaporator <-> air
    double h_2 = 21.0;   // condenser <-> ambient

    // Compressor law constants. a_comp is fixed by the 5000 BTU/h
    // (1465 W) nameplate at a 300 K evaporator.
    double l_over_r = 2600.0;  // K, latent heat over specific gas constant
    double a_comp = 1465.0 * 300.0 * std::exp(2600.0 / 300.0);  // W*K
    double gamma = 1.5;   // refrigerant-loop loss factor, >= 1
    double w_fric = 80.0; // W, constant friction/resistance loss

    double f_hm = 0.8;      // thermometer coupling to water, in [0,1]
    double q_fixed = 125.0; // W, always-on pump + duct fan load

    // Thermostat.
    double setpoint = 23.0;       // degC
    double deadband_width = 1.0;  // degC
    double lockout_s = 180.0;     // min OFF dwell before restart
    double min_on_s = 0.0;        // min ON dwell before external shutoff

    double t_minus() const { return setpoint - 0.5 * deadband_width; }
    double t_plus() const { return setpoint + 0.5 * deadband_width; }

    /// Throws std::invalid_argument if any invariant is violated.
    void validate() const;
};

/// Continuous temperatures plus the discrete compressor mode and timers.
struct HouseState {
    double t_w = 23.0;  // water, degC
    double t_a = 23.0;  // room air, degC
    double t_1 = 23.0;  // evaporator, degC
    double t_2 = 25.0;  // condenser, degC

    Mode mode = Mode::Off;
    double time_in_mode = 0.0;
    double time_since_off = std::numeric_limits<double>::infinity();
    double clock = 0.0;
};

/// Outside/lab temperature, constant or piecewise-linear in time.
struct AmbientInput {
    double constant_c = 25.0;
    // (time s, degC) breakpoints, strictly increasing in time; linear
    // interpolation, clamped to the end values. Empty means constant.
    std::vector<std::pair<double, double>> profile;

    double at(double t_s) const;
};

}  // namespace tcltb
