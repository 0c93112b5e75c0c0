#include "tcltb/protocol.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"

namespace tcltb::proto {

using nlohmann::json;

namespace {

json mode_to_json(Mode m) { return to_string(m); }

Mode mode_from_json(const json& j) {
    const std::string s = j.get<std::string>();
    if (s == "ON") return Mode::On;
    if (s == "OFF") return Mode::Off;
    throw DecodeError(0, "invalid mode '" + s + "'");
}

VerdictReason reason_from_string(const std::string& s) {
    if (s == "APPLIED") return VerdictReason::Applied;
    if (s == "LOCKOUT_ACTIVE") return VerdictReason::LockoutActive;
    if (s == "THERMOSTAT_OVERRIDE") return VerdictReason::ThermostatOverride;
    if (s == "NO_CHANGE") return VerdictReason::NoChange;
    throw DecodeError(0, "invalid verdict reason '" + s + "'");
}

// time_since_off carries an infinity sentinel before the first ON->OFF;
// JSON has no infinity, so it rides as -1.
double encode_tso(double v) { return std::isfinite(v) ? v : -1.0; }
double decode_tso(double v) {
    return v < 0.0 ? std::numeric_limits<double>::infinity() : v;
}

void require_fields(const json& j, std::initializer_list<const char*> allowed) {
    for (const char* k : allowed) {
        if (!j.contains(k))
            throw DecodeError(0, std::string("missing field '") + k + "'");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = it.key() == "type";
        for (const char* k : allowed) known = known || it.key() == k;
        if (!known) throw DecodeError(0, "unknown field '" + it.key() + "'");
    }
}

}  // namespace

const char* frame_type(const ControlMessage& msg) {
    struct Visitor {
        const char* operator()(const Hello&) const { return "hello"; }
        const char* operator()(const StateReport&) const { return "state_report"; }
        const char* operator()(const SwitchRequests&) const { return "switch_requests"; }
        const char* operator()(const Verdicts&) const { return "verdicts"; }
        const char* operator()(const StepAck&) const { return "step_ack"; }
        const char* operator()(const ErrorFrame&) const { return "error"; }
    };
    return std::visit(Visitor{}, msg);
}

std::string encode(const ControlMessage& msg) {
    json j;
    j["type"] = frame_type(msg);

    if (const auto* m = std::get_if<Hello>(&msg)) {
        j["version"] = m->version;
        j["n_houses"] = m->n_houses;
        j["latch_dt"] = m->latch_dt_s;
    } else if (const auto* m = std::get_if<StateReport>(&msg)) {
        j["step"] = m->step;
        j["aggregate_power"] = m->aggregate_power_w;
        json houses = json::array();
        for (const auto& h : m->houses) {
            houses.push_back(json{{"id", h.house_id},
                                  {"t_therm", h.t_therm_c},
                                  {"t_a", h.t_a_c},
                                  {"t_w", h.t_w_c},
                                  {"mode", mode_to_json(h.mode)},
                                  {"time_in_mode", h.time_in_mode_s},
                                  {"time_since_off", encode_tso(h.time_since_off_s)},
                                  {"real_power", h.real_power_w}});
        }
        j["houses"] = std::move(houses);
    } else if (const auto* m = std::get_if<SwitchRequests>(&msg)) {
        j["step"] = m->step;
        json reqs = json::array();
        for (const auto& r : m->requests)
            reqs.push_back(json{{"house_id", r.house_id},
                                {"desired_mode", mode_to_json(r.desired_mode)}});
        j["requests"] = std::move(reqs);
    } else if (const auto* m = std::get_if<Verdicts>(&msg)) {
        j["step"] = m->step;
        json vs = json::array();
        for (const auto& v : m->verdicts)
            vs.push_back(json{{"house_id", v.house_id},
                              {"accepted", v.accepted},
                              {"reason", to_string(v.reason)}});
        j["verdicts"] = std::move(vs);
    } else if (const auto* m = std::get_if<StepAck>(&msg)) {
        j["step"] = m->step;
    } else if (const auto* m = std::get_if<ErrorFrame>(&msg)) {
        j["code"] = m->code;
        j["message"] = m->message;
    }
    return j.dump() + "\n";
}

ControlMessage decode(std::string_view line) {
    if (line.find('\n') != std::string_view::npos)
        throw DecodeError(line.find('\n'), "frame must be a single line");

    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        // nlohmann byte positions are 1-based.
        const std::size_t off = e.byte > 0 ? e.byte - 1 : 0;
        throw DecodeError(off, std::string("invalid frame: ") + e.what());
    }
    if (!j.is_object()) throw DecodeError(0, "frame must be a JSON object");
    if (!j.contains("type") || !j["type"].is_string())
        throw DecodeError(0, "missing frame type");
    const std::string type = j["type"].get<std::string>();

    try {
        if (type == "hello") {
            require_fields(j, {"version", "n_houses", "latch_dt"});
            Hello m;
            m.version = j["version"].get<std::string>();
            m.n_houses = j["n_houses"].get<int>();
            m.latch_dt_s = j["latch_dt"].get<double>();
            return m;
        }
        if (type == "state_report") {
            require_fields(j, {"step", "aggregate_power", "houses"});
            StateReport m;
            m.step = j["step"].get<std::int64_t>();
            m.aggregate_power_w = j["aggregate_power"].get<double>();
            for (const auto& hj : j["houses"]) {
                require_fields(hj, {"id", "t_therm", "t_a", "t_w", "mode",
                                    "time_in_mode", "time_since_off", "real_power"});
                HouseReport h;
                h.house_id = hj["id"].get<int>();
                h.t_therm_c = hj["t_therm"].get<double>();
                h.t_a_c = hj["t_a"].get<double>();
                h.t_w_c = hj["t_w"].get<double>();
                h.mode = mode_from_json(hj["mode"]);
                h.time_in_mode_s = hj["time_in_mode"].get<double>();
                h.time_since_off_s = decode_tso(hj["time_since_off"].get<double>());
                h.real_power_w = hj["real_power"].get<double>();
                m.houses.push_back(h);
            }
            return m;
        }
        if (type == "switch_requests") {
            require_fields(j, {"step", "requests"});
            SwitchRequests m;
            m.step = j["step"].get<std::int64_t>();
            for (const auto& rj : j["requests"]) {
                require_fields(rj, {"house_id", "desired_mode"});
                RequestItem r;
                r.house_id = rj["house_id"].get<int>();
                r.desired_mode = mode_from_json(rj["desired_mode"]);
                m.requests.push_back(r);
            }
            return m;
        }
        if (type == "verdicts") {
            require_fields(j, {"step", "verdicts"});
            Verdicts m;
            m.step = j["step"].get<std::int64_t>();
            for (const auto& vj : j["verdicts"]) {
                require_fields(vj, {"house_id", "accepted", "reason"});
                VerdictItem v;
                v.house_id = vj["house_id"].get<int>();
                v.accepted = vj["accepted"].get<bool>();
                v.reason = reason_from_string(vj["reason"].get<std::string>());
                m.verdicts.push_back(v);
            }
            return m;
        }
        if (type == "step_ack") {
            require_fields(j, {"step"});
            return StepAck{j["step"].get<std::int64_t>()};
        }
        if (type == "error") {
            require_fields(j, {"code", "message"});
            ErrorFrame m;
            m.code = j["code"].get<std::string>();
            m.message = j["message"].get<std::string>();
            return m;
        }
    } catch (const json::exception& e) {
        throw DecodeError(0, std::string("malformed frame: ") + e.what());
    }
    throw DecodeError(0, "unknown frame type '" + type + "'");
}

}  // namespace tcltb::proto
