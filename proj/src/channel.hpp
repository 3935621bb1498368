#pragma once

#include <cstdint>

#include "modem_tx.hpp"
#include "signal.hpp"

namespace bm {

// Parametric model of what a charging-station power monitor observes when
// the device runs a burst schedule.
//
// width_shrink_mean is the mean ratio of observed to scheduled burst width.
// The burst loop on the device runs fast by the same factor, so burst start
// times are compressed by it too: a train scheduled at period T arrives at
// period width_shrink_mean * T. Receivers cannot assume the intended clock
// survives the channel.
struct ChannelModel {
    double baseline_ma = 50.0;           // idle device draw
    double burst_amplitude_ma = 400.0;   // added draw during a burst
    double amplitude_jitter_frac = 0.15; // per-burst amplitude multiplier std dev
    double width_shrink_mean = 0.622;    // observed width / scheduled width
    double width_jitter_frac = 0.17;     // per-burst width multiplier std dev
    double start_jitter_s = 0.02;        // per-burst start-time jitter std dev
    double hf_noise_ma = 15.0;           // additive white noise std dev
    double os_burst_rate_hz = 0.05;      // Poisson rate of spurious OS bursts
    double os_burst_width_s = 0.05;
    double os_burst_amplitude_ma = 150.0;
    double sample_rate_hz = 5000.0;
    std::uint64_t seed = 0;
};

void validate(const ChannelModel& model);

// Recorded default calibration: 50 mA idle draw, 400 mA bursts arriving at
// 0.622 of the scheduled clock, mild per-burst jitter, sporadic OS activity
// bursts and wideband sampling noise at 5 kHz.
ChannelModel default_channel_model();

// Copy of `model` with every stochastic term off and the width shrink reset
// to 1: the ideal channel.
ChannelModel zero_noise(const ChannelModel& model);

// Render the schedule into the trace the power monitor would record.
// Deterministic given (schedule, model) including the seed.
PowerTrace simulate(const BurstSchedule& schedule, const ChannelModel& model);

}  // namespace bm
