#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "tcltb/fleet.hpp"
#include "tcltb/protocol.hpp"

namespace tcltb {

enum class ServeMode { FreeRun, Lockstep };

struct ServerConfig {
    std::string host = "127.0.0.1";
    std::uint16_t port = 47810;  // 0 binds an ephemeral port
    ServeMode mode = ServeMode::FreeRun;
    double latch_dt_s = 1.0;
    double request_timeout_s = 10.0;  // LOCKSTEP wait before stepping on
    bool realtime_pacing = false;     // FREE_RUN wall-clock pacing
    std::int64_t max_steps = -1;      // < 0 means run until stop()
};

struct ServerStats {
    std::int64_t steps = 0;
    std::int64_t requests = 0;
    std::int64_t verdicts = 0;
    std::int64_t timeouts = 0;
    std::int64_t decode_errors = 0;
    std::int64_t refused_connections = 0;
};

/// TCP control-adjudication service. One connection-handling thread feeds
/// parsed frames to the stepping loop through an ordered queue; all fleet
/// mutation happens on the stepping loop. The simulator is the clock
/// master: each latch step emits STATE_REPORT, adjudicates the step's
/// requests in arrival order, emits VERDICTS per request frame plus a
/// STEP_ACK, then advances the fleet.
class ControlServer {
  public:
    ControlServer(Fleet& fleet, ServerConfig cfg);
    ~ControlServer();

    ControlServer(const ControlServer&) = delete;
    ControlServer& operator=(const ControlServer&) = delete;

    /// Binds and starts the acceptor thread. Throws std::runtime_error if
    /// the endpoint is not bindable.
    void start();

    /// Runs the stepping loop on the calling thread until max_steps or
    /// stop(). Returns run statistics.
    ServerStats run();

    void stop();

    std::uint16_t port() const { return port_; }

    /// Observer invoked with every outbound STATE_REPORT line (tests and
    /// scenario recorders).
    std::function<void(const std::string&)> on_state_report;

    /// Observer invoked once per latch step while the fleet still sits at
    /// the step boundary (sampling hook; runs on the stepping thread).
    std::function<void(std::int64_t)> on_step;

  private:
    struct Inbound {
        proto::ControlMessage msg;
    };

    void acceptor_loop();
    void reader_loop(int client_fd);
    void send_line(const std::string& line);
    void send_message(const proto::ControlMessage& msg);
    void drain_requests(std::deque<Inbound>& out);
    void handle_inbound(const Inbound& in, std::int64_t step,
                        std::deque<proto::SwitchRequests>& accepted);

    Fleet& fleet_;
    ServerConfig cfg_;
    ServerStats stats_;

    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<int> client_fd_{-1};
    std::atomic<bool> stopping_{false};

    std::thread acceptor_;
    std::thread reader_;

    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Inbound> inbox_;
    std::int64_t last_inbound_step_ = -1;

    std::mutex write_mu_;
};

}  // namespace tcltb
