#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace bm {

// Uniformly sampled supply-current time series in milliamperes.
struct PowerTrace {
    double sample_rate_hz = 0.0;
    std::vector<double> samples;
    double start_time_s = 0.0;

    std::size_t size() const { return samples.size(); }
    double dt() const { return 1.0 / sample_rate_hz; }
    double time_at(std::size_t i) const {
        return start_time_s + static_cast<double>(i) / sample_rate_hz;
    }
    double duration_s() const {
        return static_cast<double>(samples.size()) / sample_rate_hz;
    }
    double end_time_s() const { return start_time_s + duration_s(); }
};

void validate(const PowerTrace& trace);

// Low-pass band edges. Realized as a Hamming windowed-sinc FIR with cutoff
// midway between the edges, applied as a centered convolution (symmetric
// kernel, zero phase) with reflected ends. Stopband attenuation is >= 40 dB
// and passband ripple <= 1 dB for any valid spec.
struct FilterSpec {
    double pass_freq_hz = 0.0;
    double stop_freq_hz = 0.0;
};

// Trace CSV: header "time_s,current_ma", then one "<time>,<current>" row per
// sample, '.' decimal separator, '\n' line ends. Times carry microsecond
// resolution, currents 6 significant digits. load_trace also accepts
// headerless files and resamples non-uniform timestamps onto a uniform grid
// (step = smallest input gap) by linear interpolation.
PowerTrace load_trace(const std::string& path);
void save_trace(const PowerTrace& trace, const std::string& path);

PowerTrace lowpass(const PowerTrace& trace, const FilterSpec& spec);

// Band edges matched to a bit period: pass 6/T, stop 12/T, both clamped
// below 0.45 * sample_rate so the design stays clear of Nyquist.
FilterSpec default_filter_for_period(double bit_period_s, double sample_rate_hz);

}  // namespace bm
