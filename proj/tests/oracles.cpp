#include "oracles.hpp"

#include <cmath>

namespace tcltb::oracle {

long double cooling_power_ref(long double t1_kelvin, long double a_comp,
                              long double l_over_r) {
    return a_comp * std::exp(-l_over_r / t1_kelvin) / t1_kelvin;
}

Slopes derivatives_ref(const HouseState& s, double q_w, double t_amb,
                       const HouseParams& p) {
    const double kzero = 273.15;
    double qc = 0.0, w = 0.0;
    if (s.mode == Mode::On) {
        const double t1k = s.t_1 + kzero;
        qc = static_cast<double>(
            cooling_power_ref(static_cast<long double>(t1k), p.a_comp, p.l_over_r));
        w = p.gamma * qc * (s.t_2 - s.t_1) / t1k + p.w_fric;
    }
    Slopes d;
    d.dt_w = (p.h_m * (s.t_a - s.t_w) + q_w) / p.c_w;
    d.dt_a = (p.u_a * (t_amb - s.t_a) + p.h_m * (s.t_w - s.t_a) +
              p.h_1 * (s.t_1 - s.t_a)) /
             p.c_r;
    d.dt_1 = (p.h_1 * (s.t_a - s.t_1) - qc) / p.c_1;
    d.dt_2 = (p.h_2 * (t_amb - s.t_2) + qc + w) / p.c_2;
    return d;
}

Trajectory euler_reference(const HouseParams& p, const HouseState& init, double q_w,
                           double t_amb, double duration_s, const EulerOptions& opt) {
    const double t_minus = p.setpoint - 0.5 * p.deadband_width;
    const double t_plus = p.setpoint + 0.5 * p.deadband_width;

    Trajectory out;
    HouseState s = init;
    const auto steps = static_cast<long long>(std::llround(duration_s / opt.dt_s));
    const auto sample_every =
        static_cast<long long>(std::llround(opt.sample_dt_s / opt.dt_s));

    for (long long i = 0; i <= steps; ++i) {
        if (i % sample_every == 0) {
            out.t_w.push_back(s.t_w);
            out.t_a.push_back(s.t_a);
            out.t_1.push_back(s.t_1);
            out.t_2.push_back(s.t_2);
            out.mode.push_back(s.mode);
        }
        if (i == steps) break;

        if (opt.thermostat) {
            const double t_therm = (1.0 - p.f_hm) * s.t_a + p.f_hm * s.t_w;
            if (s.mode == Mode::On && t_therm <= t_minus) {
                s.mode = Mode::Off;
                s.time_in_mode = 0.0;
                s.time_since_off = 0.0;
                out.switches.push_back({s.clock, Mode::Off});
            } else if (s.mode == Mode::Off && t_therm >= t_plus &&
                       s.time_since_off >= p.lockout_s) {
                s.mode = Mode::On;
                s.time_in_mode = 0.0;
                out.switches.push_back({s.clock, Mode::On});
            }
        }

        const Slopes d = derivatives_ref(s, q_w, t_amb, p);
        s.t_w += opt.dt_s * d.dt_w;
        s.t_a += opt.dt_s * d.dt_a;
        s.t_1 += opt.dt_s * d.dt_1;
        s.t_2 += opt.dt_s * d.dt_2;
        s.clock += opt.dt_s;
        s.time_in_mode += opt.dt_s;
        s.time_since_off += opt.dt_s;
    }
    out.final_state = s;
    return out;
}

}  // namespace tcltb::oracle
