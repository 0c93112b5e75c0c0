"""Python binding smoke tests against the CMake-built extension."""

import math

import pytest

import tcltb


def test_compressor_laws():
    p = tcltb.HouseParams()
    assert tcltb.cooling_power(300.0, p) == pytest.approx(1465.0, rel=1e-12)
    assert tcltb.compressor_power(0.0, 290.0, 320.0, p) == pytest.approx(p.w_fric)
    with pytest.raises(Exception):
        tcltb.cooling_power(-1.0, p)


def test_thermostat_blend_and_decision():
    p = tcltb.HouseParams()
    s = tcltb.HouseState()
    s.t_a, s.t_w = 24.0, 30.0
    p.f_hm = 0.5
    assert tcltb.thermostat_temperature(s, p) == pytest.approx(27.0)
    assert tcltb.thermostat_decision(23.0, tcltb.Mode.OFF, p) == tcltb.Mode.OFF
    assert tcltb.thermostat_decision(p.t_plus() + 0.1, tcltb.Mode.OFF, p) == tcltb.Mode.ON


def test_integrate_event():
    p = tcltb.HouseParams()
    s = tcltb.HouseState()
    s.t_a = s.t_w = s.t_1 = p.t_minus()
    s.t_2 = 25.0
    amb = tcltb.AmbientInput()
    state, event, elapsed = tcltb.integrate_to_event(s, 375.0, amb, p, 24 * 3600.0)
    assert event == tcltb.StepEvent.REACHED_T_PLUS
    assert 0.0 < elapsed < 24 * 3600.0
    assert tcltb.thermostat_temperature(state, p) == pytest.approx(p.t_plus(), abs=5e-3)


def test_fleet_round_trip():
    spec = tcltb.FleetSpec()
    spec.n_houses = 4
    spec.rng_seed = 7
    jitter = tcltb.ParamJitter()
    jitter.q_fixed = 0.05
    jitter.thirty_gal_fraction = 0.5
    spec.jitter = jitter
    fleet = tcltb.Fleet.build(spec)
    assert fleet.size() == 4
    assert fleet.aggregate_power_w() > 0.0

    for _ in range(1800):
        fleet.advance(1.0)
    log = fleet.switch_log()
    assert len(log) > 0
    stats = tcltb.cycle_durations(log, 4, 0)
    assert len(stats) == 4

    samples = tcltb.sample(fleet, fleet.clock_s())
    assert len(samples) == 4
    assert all(m.apparent_va >= m.real_w for m in samples)


def test_adjudication_lockout():
    p = tcltb.HouseParams()
    s = tcltb.HouseState()
    s.t_a = s.t_w = p.setpoint
    s.mode = tcltb.Mode.OFF
    s.time_since_off = 10.0
    req = tcltb.SwitchRequest()
    req.house_id = 0
    req.desired_mode = tcltb.Mode.ON
    v = tcltb.adjudicate(req, s, p)
    assert not v.accepted
    assert v.reason == tcltb.VerdictReason.LOCKOUT_ACTIVE


def test_inrush():
    p = tcltb.InrushParams()
    assert tcltb.inrush_waveform(0.0, 1.0, p) == p.peak_multiplier
    assert tcltb.coincident_inrush([1.0, 1.0], 1.0, p) == p.peak_multiplier
    assert math.isclose(
        tcltb.inrush_waveform(10.0 / 60.0, 1.0, p), 1.0, rel_tol=0.01
    )


def test_protocol_probe():
    assert tcltb.protocol_version() == "tcl-testbed/1"
    assert tcltb.decode_frame_type('{"step":5,"type":"step_ack"}') == "step_ack"
    with pytest.raises(Exception):
        tcltb.decode_frame_type("not json")


def test_config_text():
    cfg = tcltb.experiment_config_from_text(
        "scenario = fixed_setpoint\nfleet.n_houses = 3\nrun.duration_s = 60\n"
    )
    assert cfg.fleet.n_houses == 3
    assert cfg.duration_s == 60.0
