#include "channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace bm {

namespace {

enum StreamRole : std::uint64_t {
    kStartJitter = 1,
    kWidthJitter = 2,
    kAmplitudeJitter = 3,
    kOsBursts = 4,
    kWhiteNoise = 5,
};

}  // namespace

void validate(const ChannelModel& model) {
    if (model.baseline_ma < 0.0) throw std::invalid_argument("baseline_ma must be non-negative");
    if (!(model.burst_amplitude_ma > 0.0)) {
        throw std::invalid_argument("burst_amplitude_ma must be positive");
    }
    if (!(model.width_shrink_mean > 0.0) || model.width_shrink_mean > 1.0) {
        throw std::invalid_argument("width_shrink_mean must be in (0,1]");
    }
    for (double v : {model.amplitude_jitter_frac, model.width_jitter_frac, model.start_jitter_s,
                     model.hf_noise_ma, model.os_burst_rate_hz}) {
        if (v < 0.0) throw std::invalid_argument("noise parameters must be non-negative");
    }
    if (!(model.os_burst_width_s > 0.0) || !(model.os_burst_amplitude_ma > 0.0)) {
        throw std::invalid_argument("OS burst width and amplitude must be positive");
    }
    if (!(model.sample_rate_hz > 0.0)) throw std::invalid_argument("sample_rate_hz must be positive");
    if (!(model.width_shrink_mean * (1.0 - 3.0 * model.width_jitter_frac) > 0.0)) {
        throw std::invalid_argument("width jitter too large: widths would vanish at 3 sigma");
    }
}

ChannelModel default_channel_model() { return ChannelModel{}; }

ChannelModel zero_noise(const ChannelModel& model) {
    ChannelModel m = model;
    m.amplitude_jitter_frac = 0.0;
    m.width_shrink_mean = 1.0;
    m.width_jitter_frac = 0.0;
    m.start_jitter_s = 0.0;
    m.hf_noise_ma = 0.0;
    m.os_burst_rate_hz = 0.0;
    return m;
}

PowerTrace simulate(const BurstSchedule& schedule, const ChannelModel& model) {
    validate(schedule);
    validate(model);

    const double fs = model.sample_rate_hz;
    const auto count = static_cast<std::size_t>(std::llround(schedule.total_duration_s * fs));
    if (count == 0) throw std::invalid_argument("schedule duration too short for the sample rate");

    PowerTrace trace;
    trace.sample_rate_hz = fs;
    trace.samples.assign(count, model.baseline_ma);

    const auto add_plateau = [&](double t0, double t1, double amplitude) {
        auto i0 = static_cast<long long>(std::ceil(t0 * fs - 1e-9));
        auto i1 = static_cast<long long>(std::ceil(t1 * fs - 1e-9));
        i0 = std::max(i0, 0ll);
        i1 = std::min(i1, static_cast<long long>(count));
        for (long long i = i0; i < i1; ++i) {
            trace.samples[static_cast<std::size_t>(i)] += amplitude;
        }
    };

    const SplitMix64 root(model.seed);
    SplitMix64 start_rng = root.split(kStartJitter);
    SplitMix64 width_rng = root.split(kWidthJitter);
    SplitMix64 amp_rng = root.split(kAmplitudeJitter);

    const double min_width = 2.0 / fs;
    for (const auto& [sched_start, sched_end] : schedule.intervals) {
        const double start = sched_start * model.width_shrink_mean +
                             model.start_jitter_s * start_rng.next_normal();
        double width = (sched_end - sched_start) * model.width_shrink_mean *
                       (1.0 + model.width_jitter_frac * width_rng.next_normal());
        width = std::max(width, min_width);
        const double amplitude =
            model.burst_amplitude_ma * (1.0 + model.amplitude_jitter_frac * amp_rng.next_normal());
        add_plateau(start, start + width, amplitude);
    }

    if (model.os_burst_rate_hz > 0.0) {
        SplitMix64 os_rng = root.split(kOsBursts);
        double t = os_rng.next_exponential(model.os_burst_rate_hz);
        while (t < schedule.total_duration_s) {
            add_plateau(t, t + model.os_burst_width_s, model.os_burst_amplitude_ma);
            t += os_rng.next_exponential(model.os_burst_rate_hz);
        }
    }

    if (model.hf_noise_ma > 0.0) {
        SplitMix64 noise_rng = root.split(kWhiteNoise);
        for (double& v : trace.samples) {
            v += model.hf_noise_ma * noise_rng.next_normal();
        }
    }

    return trace;
}

}  // namespace bm
