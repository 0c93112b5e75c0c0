#include "tcltb/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <iostream>
#include <stdexcept>

#include "tcltb/thermal.hpp"

namespace tcltb {

namespace {

int make_listener(const std::string& host, std::uint16_t port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw std::runtime_error("socket: " + std::string(std::strerror(errno)));
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw std::runtime_error("invalid host address '" + host + "'");
    }
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        const std::string err = std::strerror(errno);
        ::close(fd);
        throw std::runtime_error("bind " + host + ":" + std::to_string(port) + ": " + err);
    }
    if (::listen(fd, 4) != 0) {
        const std::string err = std::strerror(errno);
        ::close(fd);
        throw std::runtime_error("listen: " + err);
    }
    return fd;
}

std::uint16_t bound_port(int fd) {
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    if (::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) return 0;
    return ntohs(addr.sin_port);
}

bool send_all(int fd, const char* data, std::size_t n) {
    while (n > 0) {
        const ssize_t k = ::send(fd, data, n, MSG_NOSIGNAL);
        if (k <= 0) return false;
        data += k;
        n -= static_cast<std::size_t>(k);
    }
    return true;
}

}  // namespace

ControlServer::ControlServer(Fleet& fleet, ServerConfig cfg)
    : fleet_(fleet), cfg_(std::move(cfg)) {}

ControlServer::~ControlServer() {
    stop();
    if (acceptor_.joinable()) acceptor_.join();
    if (reader_.joinable()) reader_.join();
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void ControlServer::start() {
    listen_fd_ = make_listener(cfg_.host, cfg_.port);
    port_ = bound_port(listen_fd_);
    acceptor_ = std::thread([this] { acceptor_loop(); });
}

void ControlServer::stop() {
    stopping_ = true;
    cv_.notify_all();
    const int cfd = client_fd_.exchange(-1);
    if (cfd >= 0) {
        ::shutdown(cfd, SHUT_RDWR);
        ::close(cfd);
    }
}

void ControlServer::acceptor_loop() {
    while (!stopping_) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        const int r = ::poll(&pfd, 1, 100);
        if (stopping_) break;
        if (r <= 0) continue;
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) continue;

        if (client_fd_.load() >= 0) {
            // One control client at a time.
            const std::string line = proto::encode(
                proto::ErrorFrame{"BUSY", "another controller is connected"});
            send_all(fd, line.data(), line.size());
            ::close(fd);
            ++stats_.refused_connections;
            continue;
        }
        if (reader_.joinable()) reader_.join();
        client_fd_ = fd;
        {
            proto::Hello hello;
            hello.n_houses = fleet_.size();
            hello.latch_dt_s = cfg_.latch_dt_s;
            send_message(hello);
        }
        reader_ = std::thread([this, fd] { reader_loop(fd); });
        cv_.notify_all();
    }
}

void ControlServer::reader_loop(int fd) {
    std::string buf;
    char chunk[4096];
    while (!stopping_ && client_fd_.load() == fd) {
        pollfd pfd{fd, POLLIN, 0};
        const int pr = ::poll(&pfd, 1, 100);
        if (pr <= 0) continue;
        const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n <= 0) break;  // disconnect
        buf.append(chunk, static_cast<std::size_t>(n));

        std::size_t pos = 0;
        for (;;) {
            const std::size_t nl = buf.find('\n', pos);
            if (nl == std::string::npos) break;
            std::string_view line(buf.data() + pos, nl - pos);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            pos = nl + 1;
            if (line.empty()) continue;
            try {
                proto::ControlMessage msg = proto::decode(line);
                std::lock_guard lk(mu_);
                inbox_.push_back(Inbound{std::move(msg)});
                cv_.notify_all();
            } catch (const proto::DecodeError& e) {
                ++stats_.decode_errors;
                send_message(proto::ErrorFrame{"DECODE", e.what()});
            }
        }
        buf.erase(0, pos);
    }
    int expect = fd;
    if (client_fd_.compare_exchange_strong(expect, -1)) ::close(fd);
    cv_.notify_all();
}

void ControlServer::send_line(const std::string& line) {
    std::lock_guard lk(write_mu_);
    const int fd = client_fd_.load();
    if (fd < 0) return;
    if (!send_all(fd, line.data(), line.size())) {
        int expect = fd;
        if (client_fd_.compare_exchange_strong(expect, -1)) ::close(fd);
    }
}

void ControlServer::send_message(const proto::ControlMessage& msg) {
    send_line(proto::encode(msg));
}

// Pops every currently queued frame, answering protocol-level frames and
// keeping the step's SWITCH_REQUESTS.
void ControlServer::handle_inbound(const Inbound& in, std::int64_t step,
                                   std::deque<proto::SwitchRequests>& accepted) {
    if (const auto* hello = std::get_if<proto::Hello>(&in.msg)) {
        if (hello->version != proto::kProtocolVersion) {
            send_message(proto::ErrorFrame{
                "VERSION", std::string("unsupported protocol version '") +
                               hello->version + "', need " + proto::kProtocolVersion});
            const int cfd = client_fd_.exchange(-1);
            if (cfd >= 0) {
                ::shutdown(cfd, SHUT_RDWR);
                ::close(cfd);
            }
        }
        return;
    }
    if (std::get_if<proto::StepAck>(&in.msg)) return;  // optional client barrier
    if (const auto* reqs = std::get_if<proto::SwitchRequests>(&in.msg)) {
        if (reqs->step < last_inbound_step_) {
            send_message(proto::ErrorFrame{
                "ORDERING", "request step " + std::to_string(reqs->step) +
                                " below last seen " + std::to_string(last_inbound_step_)});
            return;
        }
        if (reqs->step > step) {
            send_message(proto::ErrorFrame{
                "ORDERING", "request step " + std::to_string(reqs->step) +
                                " is ahead of the current step " + std::to_string(step)});
            return;
        }
        last_inbound_step_ = reqs->step;
        accepted.push_back(*reqs);
        return;
    }
    send_message(proto::ErrorFrame{
        "UNEXPECTED", std::string("frame '") + proto::frame_type(in.msg) +
                          "' is not valid from a controller"});
}

void ControlServer::drain_requests(std::deque<Inbound>& out) {
    std::lock_guard lk(mu_);
    out.swap(inbox_);
}

ServerStats ControlServer::run() {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    for (std::int64_t step = 0;
         (cfg_.max_steps < 0 || step < cfg_.max_steps) && !stopping_; ++step) {
        if (cfg_.mode == ServeMode::Lockstep) {
            // Steps only proceed with a controller attached.
            std::unique_lock lk(mu_);
            cv_.wait(lk, [this] { return stopping_ || client_fd_.load() >= 0; });
            if (stopping_) break;
        }

        // 1. State report at the latch boundary.
        proto::StateReport report;
        report.step = step;
        for (const auto& h : fleet_.houses()) {
            proto::HouseReport hr;
            hr.house_id = h.id;
            hr.t_therm_c = thermostat_temperature(h.state, h.params);
            hr.t_a_c = h.state.t_a;
            hr.t_w_c = h.state.t_w;
            hr.mode = h.state.mode;
            hr.time_in_mode_s = h.state.time_in_mode;
            hr.time_since_off_s = h.state.time_since_off;
            hr.real_power_w = h.power_w;
            report.houses.push_back(hr);
        }
        report.aggregate_power_w = fleet_.aggregate_power_w();
        const std::string report_line = proto::encode(proto::ControlMessage{report});
        send_line(report_line);
        if (on_state_report) on_state_report(report_line);
        if (on_step) on_step(step);

        // 2./3. Collect and adjudicate this step's requests in arrival order.
        std::deque<Inbound> inbound;
        std::deque<proto::SwitchRequests> frames;
        if (cfg_.mode == ServeMode::Lockstep) {
            // Keep waiting until a frame for *this* step arrives (stale
            // frames are answered immediately) or the timeout passes.
            const auto deadline =
                clock::now() + std::chrono::duration<double>(cfg_.request_timeout_s);
            bool got = false;
            while (!got && !stopping_ && client_fd_.load() >= 0 &&
                   clock::now() < deadline) {
                inbound.clear();
                {
                    std::unique_lock lk(mu_);
                    cv_.wait_until(lk, deadline, [this] {
                        return stopping_ || !inbox_.empty() || client_fd_.load() < 0;
                    });
                    inbound.swap(inbox_);
                }
                for (const auto& in : inbound) handle_inbound(in, step, frames);
                got = !frames.empty();
            }
            if (!got && !stopping_) {
                ++stats_.timeouts;
                std::cerr << "tcltb-server: step " << step
                          << ": no controller requests, stepping on\n";
            }
        } else {
            drain_requests(inbound);
            for (const auto& in : inbound) handle_inbound(in, step, frames);
        }

        for (const auto& frame : frames) {
            proto::Verdicts verdicts;
            verdicts.step = step;
            for (const auto& item : frame.requests) {
                ++stats_.requests;
                SwitchRequest req;
                req.house_id = item.house_id;
                req.desired_mode = item.desired_mode;
                req.request_time_s = fleet_.clock_s();
                try {
                    const Verdict v = fleet_.apply_request(req);
                    verdicts.verdicts.push_back(
                        proto::VerdictItem{item.house_id, v.accepted, v.reason});
                    ++stats_.verdicts;
                } catch (const std::out_of_range& e) {
                    send_message(proto::ErrorFrame{"UNKNOWN_HOUSE", e.what()});
                }
            }
            send_message(verdicts);
        }

        send_message(proto::StepAck{step});

        // 4. Advance the simulation clock.
        fleet_.advance(cfg_.latch_dt_s);
        ++stats_.steps;

        if (cfg_.realtime_pacing && cfg_.mode == ServeMode::FreeRun) {
            const auto next =
                t0 + std::chrono::duration_cast<clock::duration>(
                         std::chrono::duration<double>((step + 1) * cfg_.latch_dt_s));
            std::this_thread::sleep_until(next);
        }
    }

    // End of run: let the controller observe the final state, then close.
    const int cfd = client_fd_.exchange(-1);
    if (cfd >= 0) {
        ::shutdown(cfd, SHUT_WR);
        ::close(cfd);
    }
    return stats_;
}

}  // namespace tcltb
