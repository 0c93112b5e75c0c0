#include "tcltb/client.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace tcltb {

ProtocolClient::~ProtocolClient() { close(); }

ProtocolClient::ProtocolClient(ProtocolClient&& o) noexcept
    : fd_(o.fd_), buf_(std::move(o.buf_)) {
    o.fd_ = -1;
}

ProtocolClient& ProtocolClient::operator=(ProtocolClient&& o) noexcept {
    if (this != &o) {
        close();
        fd_ = o.fd_;
        buf_ = std::move(o.buf_);
        o.fd_ = -1;
    }
    return *this;
}

void ProtocolClient::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

ProtocolClient ProtocolClient::connect(const std::string& host, std::uint16_t port,
                                       double timeout_s) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw std::runtime_error("socket: " + std::string(std::strerror(errno)));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw std::runtime_error("invalid host address '" + host + "'");
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        const std::string err = std::strerror(errno);
        ::close(fd);
        throw std::runtime_error("connect " + host + ":" + std::to_string(port) + ": " +
                                 err);
    }
    timeval tv{};
    tv.tv_sec = static_cast<long>(timeout_s);
    tv.tv_usec = static_cast<long>((timeout_s - std::floor(timeout_s)) * 1e6);
    ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);

    ProtocolClient c;
    c.fd_ = fd;
    return c;
}

std::optional<proto::ControlMessage> ProtocolClient::read_message() {
    for (;;) {
        const std::size_t nl = buf_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buf_.substr(0, nl);
            buf_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            return proto::decode(line);
        }
        if (fd_ < 0) return std::nullopt;
        char chunk[4096];
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n == 0) {
            close();
            return std::nullopt;
        }
        if (n < 0) {
            if (errno == EAGAIN || errno == EWOULDBLOCK)
                throw std::runtime_error("protocol client: read timeout");
            throw std::runtime_error("recv: " + std::string(std::strerror(errno)));
        }
        buf_.append(chunk, static_cast<std::size_t>(n));
    }
}

void ProtocolClient::send(const proto::ControlMessage& msg) {
    send_raw(proto::encode(msg));
}

void ProtocolClient::send_raw(const std::string& bytes) {
    const char* data = bytes.data();
    std::size_t n = bytes.size();
    while (n > 0) {
        const ssize_t k = ::send(fd_, data, n, MSG_NOSIGNAL);
        if (k <= 0) throw std::runtime_error("send: " + std::string(std::strerror(errno)));
        data += k;
        n -= static_cast<std::size_t>(k);
    }
}

ExerciserResult square_wave_exerciser(const std::string& host, std::uint16_t port,
                                      const ExerciserOptions& opt) {
    if (!opt.silent && !(opt.period_s > 0.0))
        throw std::invalid_argument("exerciser: period must be > 0");
    if (!opt.silent && !(opt.duty_pct >= 0.0 && opt.duty_pct <= 100.0))
        throw std::invalid_argument("exerciser: duty must be in [0, 100]");

    ProtocolClient client = ProtocolClient::connect(host, port, 30.0);
    ExerciserResult res;

    int n_houses = 0;
    double latch_dt = 1.0;

    while (auto msg = client.read_message()) {
        if (const auto* hello = std::get_if<proto::Hello>(&*msg)) {
            if (hello->version != proto::kProtocolVersion)
                throw std::runtime_error("exerciser: server speaks '" + hello->version +
                                         "'");
            n_houses = hello->n_houses;
            latch_dt = hello->latch_dt_s;
            continue;
        }
        if (const auto* report = std::get_if<proto::StateReport>(&*msg)) {
            proto::SwitchRequests reqs;
            reqs.step = report->step;
            if (!opt.silent) {
                const double t = static_cast<double>(report->step) * latch_dt;
                const double phase = std::fmod(t, opt.period_s);
                const Mode want = phase < opt.period_s * opt.duty_pct / 100.0
                                      ? Mode::On
                                      : Mode::Off;
                for (int i = 0; i < n_houses; ++i)
                    reqs.requests.push_back(proto::RequestItem{i, want});
                res.requests_sent += n_houses;
            }
            client.send(reqs);
            res.trace.push_back(reqs);
            ++res.steps;
            if (opt.max_steps > 0 && res.steps >= opt.max_steps) break;
            continue;
        }
        if (const auto* verdicts = std::get_if<proto::Verdicts>(&*msg)) {
            for (const auto& v : verdicts->verdicts) {
                if (v.accepted && v.reason == VerdictReason::Applied) ++res.accepted;
                else if (v.reason == VerdictReason::NoChange) ++res.no_change;
                else if (v.reason == VerdictReason::LockoutActive) ++res.rejected_lockout;
                else if (v.reason == VerdictReason::ThermostatOverride)
                    ++res.rejected_thermostat;
            }
            continue;
        }
        if (const auto* err = std::get_if<proto::ErrorFrame>(&*msg)) {
            throw std::runtime_error("exerciser: server error " + err->code + ": " +
                                     err->message);
        }
        // STEP_ACK and anything else: ignore.
    }
    return res;
}

}  // namespace tcltb
