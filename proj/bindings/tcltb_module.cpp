#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tcltb/analysis.hpp"
#include "tcltb/client.hpp"
#include "tcltb/config.hpp"
#include "tcltb/fleet.hpp"
#include "tcltb/integrate.hpp"
#include "tcltb/protocol.hpp"
#include "tcltb/scenario.hpp"
#include "tcltb/server.hpp"
#include "tcltb/telemetry.hpp"
#include "tcltb/thermal.hpp"

namespace py = pybind11;
using namespace tcltb;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Virtual thermostatically-controlled-load testbed core";

    py::enum_<Mode>(m, "Mode")
        .value("OFF", Mode::Off)
        .value("ON", Mode::On);

    py::class_<HouseParams>(m, "HouseParams")
        .def(py::init<>())
        .def_readwrite("c_w", &HouseParams::c_w)
        .def_readwrite("c_r", &HouseParams::c_r)
        .def_readwrite("c_1", &HouseParams::c_1)
        .def_readwrite("c_2", &HouseParams::c_2)
        .def_readwrite("u_a", &HouseParams::u_a)
        .def_readwrite("h_m", &HouseParams::h_m)
        .def_readwrite("h_1", &HouseParams::h_1)
        .def_readwrite("h_2", &HouseParams::h_2)
        .def_readwrite("a_comp", &HouseParams::a_comp)
        .def_readwrite("l_over_r", &HouseParams::l_over_r)
        .def_readwrite("gamma_loss", &HouseParams::gamma)
        .def_readwrite("w_fric", &HouseParams::w_fric)
        .def_readwrite("f_hm", &HouseParams::f_hm)
        .def_readwrite("q_fixed", &HouseParams::q_fixed)
        .def_readwrite("setpoint", &HouseParams::setpoint)
        .def_readwrite("deadband_width", &HouseParams::deadband_width)
        .def_readwrite("lockout_s", &HouseParams::lockout_s)
        .def_readwrite("min_on_s", &HouseParams::min_on_s)
        .def("t_minus", &HouseParams::t_minus)
        .def("t_plus", &HouseParams::t_plus)
        .def("validate", &HouseParams::validate);

    py::class_<HouseState>(m, "HouseState")
        .def(py::init<>())
        .def_readwrite("t_w", &HouseState::t_w)
        .def_readwrite("t_a", &HouseState::t_a)
        .def_readwrite("t_1", &HouseState::t_1)
        .def_readwrite("t_2", &HouseState::t_2)
        .def_readwrite("mode", &HouseState::mode)
        .def_readwrite("time_in_mode", &HouseState::time_in_mode)
        .def_readwrite("time_since_off", &HouseState::time_since_off)
        .def_readwrite("clock", &HouseState::clock);

    py::class_<AmbientInput>(m, "AmbientInput")
        .def(py::init<>())
        .def_readwrite("constant_c", &AmbientInput::constant_c)
        .def_readwrite("profile", &AmbientInput::profile)
        .def("at", &AmbientInput::at);

    m.def("cooling_power", &cooling_power, py::arg("t1_kelvin"), py::arg("params"));
    m.def("compressor_power", &compressor_power, py::arg("qc_w"), py::arg("t1_kelvin"),
          py::arg("t2_kelvin"), py::arg("params"));
    m.def("thermostat_temperature", &thermostat_temperature);
    m.def("effective_coupling", &effective_coupling, py::arg("air_speed_m_s"),
          py::arg("h"), py::arg("rho"), py::arg("cp"));
    m.def(
        "derivatives",
        [](const HouseState& s, double q_w, const AmbientInput& amb,
           const HouseParams& p) {
            const auto d = derivatives(s, q_w, amb, p);
            return py::make_tuple(d.dt_w, d.dt_a, d.dt_1, d.dt_2);
        },
        py::arg("state"), py::arg("q_w"), py::arg("ambient"), py::arg("params"));

    py::enum_<StepEvent>(m, "StepEvent")
        .value("HORIZON", StepEvent::Horizon)
        .value("REACHED_T_MINUS", StepEvent::ReachedTMinus)
        .value("REACHED_T_PLUS", StepEvent::ReachedTPlus);

    py::class_<IntegrateOptions>(m, "IntegrateOptions")
        .def(py::init<>())
        .def_readwrite("dt_s", &IntegrateOptions::dt_s)
        .def_readwrite("event_time_tol_s", &IntegrateOptions::event_time_tol_s)
        .def_readwrite("detect_events", &IntegrateOptions::detect_events);

    m.def(
        "integrate_to_event",
        [](const HouseState& s, double q_w, const AmbientInput& amb,
           const HouseParams& p, double horizon, const IntegrateOptions& opt) {
            const auto r = integrate_to_event(s, q_w, amb, p, horizon, opt);
            return py::make_tuple(r.state, r.event, r.elapsed_s);
        },
        py::arg("state"), py::arg("q_w"), py::arg("ambient"), py::arg("params"),
        py::arg("horizon_s"), py::arg("options") = IntegrateOptions{});

    py::enum_<VerdictReason>(m, "VerdictReason")
        .value("APPLIED", VerdictReason::Applied)
        .value("LOCKOUT_ACTIVE", VerdictReason::LockoutActive)
        .value("THERMOSTAT_OVERRIDE", VerdictReason::ThermostatOverride)
        .value("NO_CHANGE", VerdictReason::NoChange);

    py::class_<SwitchRequest>(m, "SwitchRequest")
        .def(py::init<>())
        .def_readwrite("house_id", &SwitchRequest::house_id)
        .def_readwrite("desired_mode", &SwitchRequest::desired_mode)
        .def_readwrite("request_time_s", &SwitchRequest::request_time_s);

    py::class_<Verdict>(m, "Verdict")
        .def_readonly("accepted", &Verdict::accepted)
        .def_readonly("reason", &Verdict::reason);

    m.def("thermostat_decision", &thermostat_decision, py::arg("t_therm"),
          py::arg("current"), py::arg("params"));
    m.def("adjudicate", &adjudicate, py::arg("request"), py::arg("state"),
          py::arg("params"));

    py::enum_<ScheduleKind>(m, "ScheduleKind")
        .value("CONSTANT", ScheduleKind::Constant)
        .value("RANDOM_PERTURBED", ScheduleKind::RandomPerturbed)
        .value("PROFILE", ScheduleKind::Profile);

    py::class_<HeatSchedule>(m, "HeatSchedule")
        .def(py::init<>())
        .def_readwrite("kind", &HeatSchedule::kind)
        .def_readwrite("base_w", &HeatSchedule::base_w)
        .def_readwrite("perturb_amplitude_w", &HeatSchedule::perturb_amplitude_w)
        .def_readwrite("correlation_time_s", &HeatSchedule::correlation_time_s)
        .def_readwrite("profile", &HeatSchedule::profile);

    m.def("schedule_eval", &schedule_eval, py::arg("schedule"), py::arg("t_s"),
          py::arg("stream_seed"));

    py::class_<ParamJitter>(m, "ParamJitter")
        .def(py::init<>())
        .def_readwrite("u_a", &ParamJitter::u_a)
        .def_readwrite("h_m", &ParamJitter::h_m)
        .def_readwrite("q_fixed", &ParamJitter::q_fixed)
        .def_readwrite("f_hm", &ParamJitter::f_hm)
        .def_readwrite("c_r", &ParamJitter::c_r)
        .def_readwrite("h_1", &ParamJitter::h_1)
        .def_readwrite("thirty_gal_fraction", &ParamJitter::thirty_gal_fraction);

    py::class_<FleetSpec>(m, "FleetSpec")
        .def(py::init<>())
        .def_readwrite("n_houses", &FleetSpec::n_houses)
        .def_readwrite("base", &FleetSpec::base)
        .def_readwrite("jitter", &FleetSpec::jitter)
        .def_readwrite("rng_seed", &FleetSpec::rng_seed)
        .def_readwrite("ambient", &FleetSpec::ambient)
        .def_readwrite("schedules", &FleetSpec::schedules)
        .def("validate", &FleetSpec::validate);

    py::enum_<SwitchCause>(m, "SwitchCause")
        .value("THERMOSTAT", SwitchCause::Thermostat)
        .value("EXTERNAL", SwitchCause::External);

    py::class_<SwitchEvent>(m, "SwitchEvent")
        .def_readonly("time_s", &SwitchEvent::time_s)
        .def_readonly("house_id", &SwitchEvent::house_id)
        .def_readonly("new_mode", &SwitchEvent::new_mode)
        .def_readonly("cause", &SwitchEvent::cause);

    py::class_<House>(m, "House")
        .def_readonly("id", &House::id)
        .def_readonly("params", &House::params)
        .def_readonly("state", &House::state)
        .def_readonly("power_w", &House::power_w);

    py::class_<Fleet>(m, "Fleet")
        .def_static("build", &Fleet::build, py::arg("spec"))
        .def("advance", &Fleet::advance, py::arg("dt_s"))
        .def("apply_request", &Fleet::apply_request, py::arg("request"))
        .def("aggregate_power_w", &Fleet::aggregate_power_w)
        .def("clock_s", &Fleet::clock_s)
        .def("size", &Fleet::size)
        .def("house", py::overload_cast<int>(&Fleet::house, py::const_),
             py::return_value_policy::reference_internal)
        .def("switch_log",
             [](const Fleet& f) {
                 return std::vector<SwitchEvent>(f.switch_log().begin(),
                                                 f.switch_log().end());
             })
        .def("set_integrator", &Fleet::set_integrator);

    py::class_<MeterSample>(m, "MeterSample")
        .def_readonly("timestamp_s", &MeterSample::timestamp_s)
        .def_readonly("house_id", &MeterSample::house_id)
        .def_readonly("real_w", &MeterSample::real_w)
        .def_readonly("apparent_va", &MeterSample::apparent_va)
        .def_readonly("voltage_v", &MeterSample::voltage_v)
        .def_readonly("freq_hz", &MeterSample::freq_hz);

    py::class_<TelemetryConfig>(m, "TelemetryConfig")
        .def(py::init<>())
        .def_readwrite("power_factor", &TelemetryConfig::power_factor)
        .def_readwrite("voltage_v", &TelemetryConfig::voltage_v)
        .def_readwrite("freq_hz", &TelemetryConfig::freq_hz);

    m.def("sample", &sample, py::arg("fleet"), py::arg("t_s"),
          py::arg("config") = TelemetryConfig{});

    py::class_<InrushParams>(m, "InrushParams")
        .def(py::init<>())
        .def_readwrite("peak_multiplier", &InrushParams::peak_multiplier)
        .def_readwrite("decay_time_s", &InrushParams::decay_time_s)
        .def_readwrite("line_freq_hz", &InrushParams::line_freq_hz);

    m.def("inrush_waveform", &inrush_waveform, py::arg("t_since_on_s"),
          py::arg("steady_current_a"), py::arg("params") = InrushParams{});
    m.def("coincident_inrush", &coincident_inrush, py::arg("on_times_s"),
          py::arg("window_s"), py::arg("params") = InrushParams{},
          py::arg("steady_currents_a") = std::vector<double>{});

    py::class_<DutyCycleResult>(m, "DutyCycleResult")
        .def_readonly("percent", &DutyCycleResult::percent)
        .def_readonly("complete_cycles", &DutyCycleResult::complete_cycles)
        .def_readonly("insufficient", &DutyCycleResult::insufficient);

    m.def(
        "duty_cycle",
        [](const std::vector<SwitchEvent>& log, int house_id, double run_end_s,
           int warmup) { return duty_cycle(log, house_id, run_end_s, warmup); },
        py::arg("switch_log"), py::arg("house_id"), py::arg("run_end_s"),
        py::arg("warmup_cycles") = 0);

    py::class_<CycleStats>(m, "CycleStats")
        .def_readonly("house_id", &CycleStats::house_id)
        .def_readonly("mean_on_s", &CycleStats::mean_on_s)
        .def_readonly("mean_off_s", &CycleStats::mean_off_s)
        .def_readonly("mean_cycle_s", &CycleStats::mean_cycle_s)
        .def_readonly("complete_cycles", &CycleStats::complete_cycles)
        .def_readonly("insufficient", &CycleStats::insufficient);

    m.def(
        "cycle_durations",
        [](const std::vector<SwitchEvent>& log, int n_houses, int warmup) {
            return cycle_durations(log, n_houses, warmup);
        },
        py::arg("switch_log"), py::arg("n_houses"), py::arg("warmup_cycles") = 0);

    py::class_<DephasingPoint>(m, "DephasingPoint")
        .def_readonly("cycle_index", &DephasingPoint::cycle_index)
        .def_readonly("circular_variance", &DephasingPoint::circular_variance)
        .def_readonly("houses", &DephasingPoint::houses);

    m.def(
        "dephasing_metric",
        [](const std::vector<SwitchEvent>& log, int n_houses, double release,
           int max_cycles) {
            return dephasing_metric(log, n_houses, release, max_cycles);
        },
        py::arg("switch_log"), py::arg("n_houses"), py::arg("release_time_s") = 0.0,
        py::arg("max_cycles") = 8);

    // Wire-codec probes; Python controllers speak the newline-JSON
    // protocol directly (see tcltb.client).
    m.def("decode_frame_type", [](const std::string& line) {
        return std::string(proto::frame_type(proto::decode(line)));
    });
    m.def("protocol_version", [] { return std::string(proto::kProtocolVersion); });

    m.def("load_experiment_config", &load_experiment_config, py::arg("path"));
    m.def("experiment_config_from_text", &experiment_config_from_text, py::arg("text"),
          py::arg("name") = std::string("<config>"));
    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("fleet", &ExperimentConfig::fleet)
        .def_readwrite("duration_s", &ExperimentConfig::duration_s)
        .def_readwrite("warmup_cycles", &ExperimentConfig::warmup_cycles)
        .def_readwrite("latch_dt_s", &ExperimentConfig::latch_dt_s)
        .def_readwrite("output_dir", &ExperimentConfig::output_dir);
    m.def("run_experiment", &run_experiment, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
}
