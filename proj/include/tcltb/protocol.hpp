#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tcltb/house.hpp"
#include "tcltb/switching.hpp"

namespace tcltb::proto {

inline constexpr const char* kProtocolVersion = "tcl-testbed/1";

struct Hello {
    std::string version = kProtocolVersion;
    int n_houses = 0;
    double latch_dt_s = 1.0;
};

struct HouseReport {
    int house_id = 0;
    double t_therm_c = 0.0;
    double t_a_c = 0.0;
    double t_w_c = 0.0;
    Mode mode = Mode::Off;
    double time_in_mode_s = 0.0;
    double time_since_off_s = 0.0;  // serialized as -1 for the infinity sentinel
    double real_power_w = 0.0;
};

struct StateReport {
    std::int64_t step = 0;
    std::vector<HouseReport> houses;
    double aggregate_power_w = 0.0;
};

struct RequestItem {
    int house_id = 0;
    Mode desired_mode = Mode::Off;
};

struct SwitchRequests {
    std::int64_t step = 0;
    std::vector<RequestItem> requests;
};

struct VerdictItem {
    int house_id = 0;
    bool accepted = false;
    VerdictReason reason = VerdictReason::NoChange;
};

struct Verdicts {
    std::int64_t step = 0;
    std::vector<VerdictItem> verdicts;
};

struct StepAck {
    std::int64_t step = 0;
};

/// Server-emitted diagnostic; the connection stays open unless the error
/// is fatal (version mismatch, second client).
struct ErrorFrame {
    std::string code;     // e.g. ORDERING, DECODE, BUSY, VERSION
    std::string message;
};

using ControlMessage =
    std::variant<Hello, StateReport, SwitchRequests, Verdicts, StepAck, ErrorFrame>;

class DecodeError : public std::runtime_error {
  public:
    DecodeError(std::size_t byte_offset, const std::string& what)
        : std::runtime_error(what + " (byte " + std::to_string(byte_offset) + ")"),
          byte_offset(byte_offset) {}
    std::size_t byte_offset;
};

/// One newline-terminated UTF-8 JSON object per frame. Field order and
/// float formatting are deterministic.
std::string encode(const ControlMessage& msg);

/// Decodes a single frame (the line without its trailing newline).
/// Unknown frame types and unknown fields are rejected; errors carry the
/// byte offset within the line.
ControlMessage decode(std::string_view line);

const char* frame_type(const ControlMessage& msg);

}  // namespace tcltb::proto
