#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tcltb/protocol.hpp"

namespace tcltb {

/// Blocking line-framed protocol client.
class ProtocolClient {
  public:
    ProtocolClient() = default;
    ~ProtocolClient();
    ProtocolClient(ProtocolClient&& o) noexcept;
    ProtocolClient& operator=(ProtocolClient&& o) noexcept;
    ProtocolClient(const ProtocolClient&) = delete;
    ProtocolClient& operator=(const ProtocolClient&) = delete;

    static ProtocolClient connect(const std::string& host, std::uint16_t port,
                                  double timeout_s = 5.0);

    /// Next frame, or nullopt at end of stream.
    std::optional<proto::ControlMessage> read_message();

    void send(const proto::ControlMessage& msg);

    /// Writes raw bytes on the socket (protocol robustness tests).
    void send_raw(const std::string& bytes);

    bool connected() const { return fd_ >= 0; }
    void close();

  private:
    int fd_ = -1;
    std::string buf_;
};

struct ExerciserOptions {
    double period_s = 600.0;
    double duty_pct = 50.0;
    std::int64_t max_steps = -1;  // < 0: until the server closes
    bool silent = false;          // send empty request frames only
};

struct ExerciserResult {
    std::int64_t steps = 0;
    std::int64_t requests_sent = 0;
    std::int64_t accepted = 0;
    std::int64_t rejected_lockout = 0;
    std::int64_t rejected_thermostat = 0;
    std::int64_t no_change = 0;
    std::vector<proto::SwitchRequests> trace;
};

/// Scripted square-wave controller: connects to a running server and
/// requests all-ON during the first duty_pct of each period, all-OFF for
/// the rest, collecting verdicts. Doubles as the protocol integration
/// test client.
ExerciserResult square_wave_exerciser(const std::string& host, std::uint16_t port,
                                      const ExerciserOptions& opt);

}  // namespace tcltb
