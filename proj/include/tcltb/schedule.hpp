#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tcltb/rng.hpp"

namespace tcltb {

enum class ScheduleKind { Constant, RandomPerturbed, Profile };

/// Programmable heat injection into the water tank.
struct HeatSchedule {
    ScheduleKind kind = ScheduleKind::Constant;
    double base_w = 250.0;

    // RANDOM_PERTURBED: Ornstein-Uhlenbeck perturbation around base_w.
    double perturb_amplitude_w = 0.0;   // stationary std deviation
    double correlation_time_s = 300.0;

    // PROFILE: (time s, watts) breakpoints, strictly increasing in time;
    // linear interpolation, clamped to the end values outside the range.
    std::vector<std::pair<double, double>> profile;

    void validate() const;  // throws std::invalid_argument
};

/// Per-house evaluator. The OU perturbation advances on a 1 s grid with
/// counter-keyed innovations, so the value at any time is a pure function
/// of (schedule, stream_seed, t) regardless of the call pattern.
class ScheduleEvaluator {
  public:
    ScheduleEvaluator() = default;
    ScheduleEvaluator(HeatSchedule sched, std::uint64_t stream_seed);

    /// Heat injection at time t_s, W; always >= 0.
    double eval(double t_s);

    const HeatSchedule& schedule() const { return sched_; }

  private:
    double ou_at(std::int64_t k);

    HeatSchedule sched_;
    std::uint64_t seed_ = 0;
    std::int64_t cached_k_ = -1;
    double cached_x_ = 0.0;
};

/// Evaluates a schedule at one instant with an explicit stream seed.
double schedule_eval(const HeatSchedule& sched, double t_s, std::uint64_t stream_seed);

}  // namespace tcltb
