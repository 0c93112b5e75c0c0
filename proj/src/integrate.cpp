#include "tcltb/integrate.hpp"

#include <cmath>
#include <string>

namespace tcltb {

namespace {

struct StageAccum {
    NodeFlows sum;  // stage-weighted flow sums, W
    void add(const NodeFlows& f, double weight) {
        sum.q_w += weight * f.q_w;
        sum.wall += weight * f.wall;
        sum.water_air += weight * f.water_air;
        sum.evap_air += weight * f.evap_air;
        sum.cond_amb += weight * f.cond_amb;
        sum.q_c += weight * f.q_c;
        sum.w_elec += weight * f.w_elec;
    }
};

void apply_derivs(HouseState& s, const NodeDerivatives& d, double h) {
    s.t_w += h * d.dt_w;
    s.t_a += h * d.dt_a;
    s.t_1 += h * d.dt_1;
    s.t_2 += h * d.dt_2;
    s.clock += h;
}

// One classical RK4 step of size h from s, optionally accumulating the
// stage-weighted flows into acc (same weights as the state update).
HouseState rk4_step(const HouseState& s, double h, double q_w,
                    const AmbientInput& amb, const HouseParams& p,
                    StageAccum* acc) {
    NodeFlows f1, f2, f3, f4;
    const NodeDerivatives k1 = derivatives(s, q_w, amb, p, acc ? &f1 : nullptr);

    HouseState s2 = s;
    apply_derivs(s2, k1, 0.5 * h);
    const NodeDerivatives k2 = derivatives(s2, q_w, amb, p, acc ? &f2 : nullptr);

    HouseState s3 = s;
    apply_derivs(s3, k2, 0.5 * h);
    const NodeDerivatives k3 = derivatives(s3, q_w, amb, p, acc ? &f3 : nullptr);

    HouseState s4 = s;
    apply_derivs(s4, k3, h);
    const NodeDerivatives k4 = derivatives(s4, q_w, amb, p, acc ? &f4 : nullptr);

    HouseState out = s;
    const double w = h / 6.0;
    out.t_w += w * (k1.dt_w + 2.0 * k2.dt_w + 2.0 * k3.dt_w + k4.dt_w);
    out.t_a += w * (k1.dt_a + 2.0 * k2.dt_a + 2.0 * k3.dt_a + k4.dt_a);
    out.t_1 += w * (k1.dt_1 + 2.0 * k2.dt_1 + 2.0 * k3.dt_1 + k4.dt_1);
    out.t_2 += w * (k1.dt_2 + 2.0 * k2.dt_2 + 2.0 * k3.dt_2 + k4.dt_2);
    out.clock += h;
    out.time_in_mode += h;
    out.time_since_off += h;

    if (acc) {
        acc->add(f1, w);
        acc->add(f2, 2.0 * w);
        acc->add(f3, 2.0 * w);
        acc->add(f4, w);
    }
    return out;
}

void check_finite(const HouseState& s, const char* where) {
    if (!std::isfinite(s.t_w) || !std::isfinite(s.t_a) || !std::isfinite(s.t_1) ||
        !std::isfinite(s.t_2)) {
        throw IntegrationError(std::string("non-finite temperature during ") + where +
                               " at t=" + std::to_string(s.clock));
    }
}

// Signed distance to the watched deadband edge; crossing means g <= 0.
double event_gap(const HouseState& s, const HouseParams& p) {
    const double t = thermostat_temperature(s, p);
    return s.mode == Mode::On ? t - p.t_minus() : p.t_plus() - t;
}

void accumulate(EnergyLedger* ledger, const StageAccum& acc) {
    if (!ledger) return;
    ledger->injected_j += acc.sum.q_w;
    ledger->wall_j += acc.sum.wall;
    ledger->water_air_j += acc.sum.water_air;
    ledger->evap_air_j += acc.sum.evap_air;
    ledger->cond_amb_j += acc.sum.cond_amb;
    ledger->cooling_j += acc.sum.q_c;
    ledger->compressor_j += acc.sum.w_elec;
}

}  // namespace

EnergyLedger& EnergyLedger::operator-=(const EnergyLedger& o) {
    injected_j -= o.injected_j;
    wall_j -= o.wall_j;
    water_air_j -= o.water_air_j;
    evap_air_j -= o.evap_air_j;
    cond_amb_j -= o.cond_amb_j;
    cooling_j -= o.cooling_j;
    compressor_j -= o.compressor_j;
    return *this;
}

EnergyLedger EnergyLedger::operator-(const EnergyLedger& o) const {
    EnergyLedger r = *this;
    r -= o;
    return r;
}

double stored_energy_delta(const HouseState& a, const HouseState& b,
                           const HouseParams& p) {
    return p.c_w * (b.t_w - a.t_w) + p.c_r * (b.t_a - a.t_a) +
           p.c_1 * (b.t_1 - a.t_1) + p.c_2 * (b.t_2 - a.t_2);
}

IntegrateResult integrate_to_event(const HouseState& start, double q_w_watts,
                                   const AmbientInput& ambient,
                                   const HouseParams& p, double horizon_s,
                                   const IntegrateOptions& opt,
                                   EnergyLedger* ledger) {
    if (!(horizon_s > 0.0))
        throw IntegrationError("integrate_to_event: horizon must be > 0");
    if (!(opt.dt_s > 0.0))
        throw IntegrationError("integrate_to_event: step size must be > 0");
    if (q_w_watts < 0.0)
        throw IntegrationError("integrate_to_event: q_w must be >= 0");
    check_finite(start, "entry");

    HouseState cur = start;
    double elapsed = 0.0;

    while (elapsed < horizon_s) {
        const double h = std::min(opt.dt_s, horizon_s - elapsed);
        if (h < 1e-12) break;  // horizon reached up to rounding
        StageAccum acc;
        HouseState next = rk4_step(cur, h, q_w_watts, ambient, p,
                                   ledger ? &acc : nullptr);
        check_finite(next, "step");

        if (opt.detect_events && event_gap(next, p) <= 0.0) {
            // Bisect the substep until the crossing time is bracketed to
            // within event_time_tol_s; keep the in-band endpoint.
            double lo = 0.0;       // gap > 0 (or the segment start)
            double hi = h;         // gap <= 0
            HouseState lo_state = cur;
            StageAccum lo_acc;
            while (hi - lo > opt.event_time_tol_s) {
                const double mid = 0.5 * (lo + hi);
                StageAccum macc;
                HouseState ms = rk4_step(cur, mid, q_w_watts, ambient, p,
                                         ledger ? &macc : nullptr);
                if (event_gap(ms, p) <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    lo_state = ms;
                    lo_acc = macc;
                }
            }
            if (lo > 0.0) accumulate(ledger, lo_acc);
            const StepEvent ev = cur.mode == Mode::On ? StepEvent::ReachedTMinus
                                                      : StepEvent::ReachedTPlus;
            return IntegrateResult{lo_state, ev, elapsed + lo};
        }

        accumulate(ledger, acc);
        cur = next;
        elapsed += h;
    }
    return IntegrateResult{cur, StepEvent::Horizon, elapsed};
}

}  // namespace tcltb
