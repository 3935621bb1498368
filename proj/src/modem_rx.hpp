#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bits.hpp"
#include "gmm.hpp"
#include "signal.hpp"

namespace bm {

// Maximal run of filtered samples strictly above the detection threshold.
struct Peak {
    double start_s = 0.0;
    double end_s = 0.0;
    double max_ma = 0.0;
    double width_s() const { return end_s - start_s; }
};

struct DecoderConfig {
    std::size_t preamble_len = 8;  // >= 2: period estimation needs two peaks
    // Total transmission bits including the preamble, when agreed in advance.
    // Caps emission and lets the decoder pad trailing one bits after the
    // final peak.
    std::optional<std::size_t> expected_bit_count;
    // Peak debounce; unset means intended_bit_period / 10.
    std::optional<double> min_peak_width_s;
    // Silence after the final peak, in estimated periods, that marks the end
    // of a transmission. Also the length at which an in-stream run of one
    // bits draws a warning.
    double trailing_gap_periods = 3.0;
};

void validate(const DecoderConfig& cfg);

struct DecodeResult {
    BitStream bits;
    double threshold_ma = 0.0;
    double est_bit_period_s = 0.0;
    GmmFit threshold_fit;
    std::vector<Peak> peaks;
    std::vector<std::string> warnings;
};

// Fits a two-component mixture to the first preamble_window_s of the trace
// and returns the midpoint of the component means.
std::pair<double, GmmFit> estimate_threshold(const PowerTrace& filtered,
                                             double preamble_window_s);

std::vector<Peak> detect_peaks(const PowerTrace& filtered, double threshold_ma,
                               double min_peak_width_s);

// Mean start-to-start difference over the first preamble_len peaks.
double estimate_bit_period(const std::vector<Peak>& peaks, std::size_t preamble_len);

// Full receiver pipeline: low-pass filter, mixture threshold over the
// preamble window, peak detection, preamble-based period estimate, then
// peak-to-peak time-difference decoding. The gap between successive peak
// starts, rounded to multiples of the estimated period, gives the number of
// silent one bits between two zero bits; synchronization is regained at
// every peak.
DecodeResult robust_decode(const PowerTrace& trace, double intended_bit_period_s,
                           const DecoderConfig& cfg);

// Strict-timing reference receiver: correlates the filtered trace with the
// known RZ pulse (rectangle spanning half a bit period), samples the
// correlation once per *intended* period from the first detected peak, and
// thresholds each sample with the same mixture procedure applied to
// correlation values. No resynchronization: if the received clock departs
// from the intended one, this receiver drifts off the pulses.
DecodeResult matched_filter_decode(const PowerTrace& trace, double intended_bit_period_s,
                                   const DecoderConfig& cfg);

}  // namespace bm
