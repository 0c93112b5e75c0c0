#include "tcltb/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tcltb {

void HouseParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(name) + " must be > 0");
    };
    positive(c_w, "c_w");
    positive(c_r, "c_r");
    positive(c_1, "c_1");
    positive(c_2, "c_2");
    positive(u_a, "u_a");
    positive(h_m, "h_m");
    positive(h_1, "h_1");
    positive(h_2, "h_2");
    positive(a_comp, "a_comp");
    positive(l_over_r, "l_over_r");
    positive(deadband_width, "deadband_width");
    if (!(gamma >= 1.0)) throw std::invalid_argument("gamma must be >= 1");
    if (!(w_fric >= 0.0)) throw std::invalid_argument("w_fric must be >= 0");
    if (!(f_hm >= 0.0 && f_hm <= 1.0))
        throw std::invalid_argument("f_hm must be in [0,1]");
    if (!(q_fixed >= 0.0)) throw std::invalid_argument("q_fixed must be >= 0");
    if (!(lockout_s >= 0.0)) throw std::invalid_argument("lockout must be >= 0");
    if (!(min_on_s >= 0.0)) throw std::invalid_argument("min_on must be >= 0");
    if (!std::isfinite(setpoint)) throw std::invalid_argument("setpoint must be finite");
}

double AmbientInput::at(double t_s) const {
    if (profile.empty()) return constant_c;
    if (t_s <= profile.front().first) return profile.front().second;
    if (t_s >= profile.back().first) return profile.back().second;
    for (std::size_t i = 1; i < profile.size(); ++i) {
        if (t_s <= profile[i].first) {
            const auto& [t0, v0] = profile[i - 1];
            const auto& [t1, v1] = profile[i];
            const double u = (t_s - t0) / (t1 - t0);
            return v0 + u * (v1 - v0);
        }
    }
    return profile.back().second;
}

double cooling_power(double t1_kelvin, const HouseParams& p) {
    if (!(t1_kelvin > 0.0))
        throw std::domain_error("cooling_power: absolute temperature must be > 0 K");
    return p.a_comp * std::exp(-p.l_over_r / t1_kelvin) / t1_kelvin;
}

double compressor_power(double qc_w, double t1_kelvin, double t2_kelvin,
                        const HouseParams& p) {
    if (!(t1_kelvin > 0.0))
        throw std::domain_error("compressor_power: absolute temperature must be > 0 K");
    if (qc_w < 0.0) throw std::domain_error("compressor_power: qc must be >= 0");
    return p.gamma * qc_w * (t2_kelvin - t1_kelvin) / t1_kelvin + p.w_fric;
}

double thermostat_temperature(const HouseState& s, const HouseParams& p) {
    return (1.0 - p.f_hm) * s.t_a + p.f_hm * s.t_w;
}

double effective_coupling(double air_speed_m_s, double h_w_m2c, double rho_kg_m3,
                          double cp_j_kgc) {
    if (!(air_speed_m_s > 0.0) || !(h_w_m2c > 0.0) || !(rho_kg_m3 > 0.0) ||
        !(cp_j_kgc > 0.0))
        throw std::domain_error("effective_coupling: inputs must be > 0");
    const double f = h_w_m2c / (rho_kg_m3 * cp_j_kgc * air_speed_m_s);
    return std::clamp(f, 0.0, 1.0);
}

NodeDerivatives derivatives(const HouseState& s, double q_w_watts,
                            const AmbientInput& ambient, const HouseParams& p,
                            NodeFlows* flows) {
    const double t_amb = ambient.at(s.clock);

    double qc = 0.0;
    double w = 0.0;
    if (s.mode == Mode::On) {
        const double t1k = s.t_1 + kCelsiusToKelvin;
        const double t2k = s.t_2 + kCelsiusToKelvin;
        qc = cooling_power(t1k, p);
        w = compressor_power(qc, t1k, t2k, p);
    }

    const double wall = p.u_a * (t_amb - s.t_a);
    const double water_air = p.h_m * (s.t_w - s.t_a);
    const double evap_air = p.h_1 * (s.t_a - s.t_1);
    const double cond_amb = p.h_2 * (t_amb - s.t_2);

    if (flows)
        *flows = NodeFlows{q_w_watts, wall, water_air, evap_air, cond_amb, qc, w};

    return NodeDerivatives{
        (q_w_watts - water_air) / p.c_w,
        (wall + water_air - evap_air) / p.c_r,
        (evap_air - qc) / p.c_1,
        (cond_amb + qc + w) / p.c_2,
    };
}

}  // namespace tcltb
