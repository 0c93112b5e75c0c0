#include "tcltb/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tcltb {

void HeatSchedule::validate() const {
    if (!(base_w >= 0.0)) throw std::invalid_argument("schedule base must be >= 0");
    if (kind == ScheduleKind::RandomPerturbed) {
        if (!(perturb_amplitude_w >= 0.0))
            throw std::invalid_argument("perturbation amplitude must be >= 0");
        if (!(correlation_time_s > 0.0))
            throw std::invalid_argument("correlation time must be > 0");
    }
    if (kind == ScheduleKind::Profile) {
        if (profile.empty())
            throw std::invalid_argument("profile schedule needs breakpoints");
        for (std::size_t i = 0; i < profile.size(); ++i) {
            if (profile[i].second < 0.0)
                throw std::invalid_argument("profile watts must be >= 0");
            if (i > 0 && !(profile[i].first > profile[i - 1].first))
                throw std::invalid_argument(
                    "profile breakpoints must be strictly increasing in time");
        }
    }
}

ScheduleEvaluator::ScheduleEvaluator(HeatSchedule sched, std::uint64_t stream_seed)
    : sched_(std::move(sched)), seed_(stream_seed) {
    sched_.validate();
}

// OU value on the 1 s grid: x_{k+1} = a x_k + sigma sqrt(1-a^2) z_{k+1},
// innovations keyed by (seed, k) so the sequence is independent of the
// call pattern.
double ScheduleEvaluator::ou_at(std::int64_t k) {
    if (k < 0) return 0.0;
    if (cached_k_ > k) {  // random access backwards: replay from scratch
        cached_k_ = -1;
        cached_x_ = 0.0;
    }
    const double a = std::exp(-1.0 / sched_.correlation_time_s);
    const double gain = sched_.perturb_amplitude_w * std::sqrt(1.0 - a * a);
    while (cached_k_ < k) {
        ++cached_k_;
        RngStream innov(mix_seed(seed_, static_cast<std::uint64_t>(cached_k_)));
        cached_x_ = a * cached_x_ + gain * innov.normal();
    }
    return cached_x_;
}

double ScheduleEvaluator::eval(double t_s) {
    switch (sched_.kind) {
        case ScheduleKind::Constant:
            return sched_.base_w;
        case ScheduleKind::RandomPerturbed: {
            if (sched_.perturb_amplitude_w == 0.0) return sched_.base_w;
            const auto k = static_cast<std::int64_t>(std::floor(t_s));
            return std::max(0.0, sched_.base_w + ou_at(k));
        }
        case ScheduleKind::Profile: {
            const auto& pts = sched_.profile;
            if (t_s <= pts.front().first) return pts.front().second;
            if (t_s >= pts.back().first) return pts.back().second;
            for (std::size_t i = 1; i < pts.size(); ++i) {
                if (t_s <= pts[i].first) {
                    const auto& [t0, v0] = pts[i - 1];
                    const auto& [t1, v1] = pts[i];
                    return v0 + (t_s - t0) / (t1 - t0) * (v1 - v0);
                }
            }
            return pts.back().second;
        }
    }
    return sched_.base_w;
}

double schedule_eval(const HeatSchedule& sched, double t_s, std::uint64_t stream_seed) {
    ScheduleEvaluator ev(sched, stream_seed);
    return ev.eval(t_s);
}

}  // namespace tcltb
