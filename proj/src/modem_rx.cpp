#include "modem_rx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "errors.hpp"

namespace bm {

namespace {

std::string format_warning(const char* what, std::size_t peak_index, long long count) {
    return std::string(what) + " after peak " + std::to_string(peak_index) + " (" +
           std::to_string(count) + ")";
}

}  // namespace

void validate(const DecoderConfig& cfg) {
    if (cfg.preamble_len < 2) throw std::invalid_argument("preamble_len must be at least 2");
    if (cfg.expected_bit_count && *cfg.expected_bit_count == 0) {
        throw std::invalid_argument("expected_bit_count must be positive when set");
    }
    if (cfg.min_peak_width_s && *cfg.min_peak_width_s < 0.0) {
        throw std::invalid_argument("min_peak_width_s must be non-negative");
    }
    if (!(cfg.trailing_gap_periods > 0.0)) {
        throw std::invalid_argument("trailing_gap_periods must be positive");
    }
}

std::pair<double, GmmFit> estimate_threshold(const PowerTrace& filtered,
                                             double preamble_window_s) {
    validate(filtered);
    if (!(preamble_window_s > 0.0)) throw std::invalid_argument("empty window");
    const auto want = static_cast<std::size_t>(std::llround(preamble_window_s * filtered.sample_rate_hz));
    const std::size_t count = std::min(std::max<std::size_t>(want, 1), filtered.samples.size());
    const GmmFit fit = fit_gmm_two_component({filtered.samples.data(), count});
    return {0.5 * (fit.mean_lo_ma + fit.mean_hi_ma), fit};
}

std::vector<Peak> detect_peaks(const PowerTrace& filtered, double threshold_ma,
                               double min_peak_width_s) {
    validate(filtered);
    if (min_peak_width_s < 0.0) throw std::invalid_argument("min_peak_width_s must be non-negative");
    std::vector<Peak> peaks;
    const double dt = filtered.dt();
    const std::size_t n = filtered.samples.size();
    std::size_t i = 0;
    while (i < n) {
        if (filtered.samples[i] > threshold_ma) {
            std::size_t j = i;
            double peak_max = filtered.samples[i];
            while (j < n && filtered.samples[j] > threshold_ma) {
                peak_max = std::max(peak_max, filtered.samples[j]);
                ++j;
            }
            const double width = static_cast<double>(j - i) * dt;
            if (width >= min_peak_width_s) {
                Peak p;
                p.start_s = filtered.time_at(i);
                p.end_s = p.start_s + width;
                p.max_ma = peak_max;
                peaks.push_back(p);
            }
            i = j;
        } else {
            ++i;
        }
    }
    return peaks;
}

double estimate_bit_period(const std::vector<Peak>& peaks, std::size_t preamble_len) {
    if (preamble_len < 2) throw std::invalid_argument("preamble_len must be at least 2");
    if (peaks.size() < preamble_len) throw decode_error("preamble not found");
    return (peaks[preamble_len - 1].start_s - peaks[0].start_s) /
           static_cast<double>(preamble_len - 1);
}

DecodeResult robust_decode(const PowerTrace& trace, double intended_bit_period_s,
                           const DecoderConfig& cfg) {
    validate(trace);
    validate(cfg);
    if (!(intended_bit_period_s > 0.0)) {
        throw std::invalid_argument("intended_bit_period_s must be positive");
    }

    const PowerTrace filtered =
        lowpass(trace, default_filter_for_period(intended_bit_period_s, trace.sample_rate_hz));

    DecodeResult res;
    const auto [threshold, fit] = estimate_threshold(
        filtered, static_cast<double>(cfg.preamble_len) * intended_bit_period_s);
    res.threshold_ma = threshold;
    res.threshold_fit = fit;
    if (!fit.converged) res.warnings.push_back("threshold fit did not converge");

    const double min_width = cfg.min_peak_width_s.value_or(intended_bit_period_s / 10.0);
    res.peaks = detect_peaks(filtered, threshold, min_width);
    if (res.peaks.size() < cfg.preamble_len) throw decode_error("preamble not found");

    const double est = estimate_bit_period(res.peaks, cfg.preamble_len);
    if (!(est > 0.0)) throw decode_error("preamble peaks do not advance in time");
    res.est_bit_period_s = est;

    const std::size_t limit =
        cfg.expected_bit_count.value_or(std::numeric_limits<std::size_t>::max());
    auto& bits = res.bits.bits;
    const auto emit = [&](std::uint8_t bit) {
        if (bits.size() >= limit) return false;
        bits.push_back(bit);
        return true;
    };

    bool full = false;
    for (std::size_t i = 0; i < cfg.preamble_len && !full; ++i) full = !emit(0);

    // Each detected peak is a zero bit; the start-to-start gap to the
    // previous peak, in estimated periods, says how many one bits sit in
    // between.
    const auto run_cap = static_cast<long long>(std::floor(cfg.trailing_gap_periods));
    for (std::size_t i = cfg.preamble_len - 1; i + 1 < res.peaks.size() && !full; ++i) {
        const double gap = res.peaks[i + 1].start_s - res.peaks[i].start_s;
        long long n = std::llround(gap / est);
        if (n < 1) {
            n = 1;
            res.warnings.push_back(format_warning("sub-period peak gap", i, 1));
        }
        const long long ones = n - 1;
        if (ones > run_cap) {
            res.warnings.push_back(format_warning("long one-run", i, ones));
        }
        for (long long k = 0; k < ones && !full; ++k) full = !emit(1);
        if (!full) full = !emit(0);
    }

    // Trailing silence after the final peak decodes as one bits. With an
    // agreed transmission length the decoder pads exactly to it; without
    // one it emits the silent slots observed in the trace, stopping at the
    // trailing-gap rule (beyond that the transmission is considered over).
    if (!full) {
        const double tail = trace.end_time_s() - res.peaks.back().start_s;
        const long long observed = std::llround(tail / est) - 1;
        if (cfg.expected_bit_count) {
            const std::size_t missing = *cfg.expected_bit_count - bits.size();
            if (observed + 1 < static_cast<long long>(missing)) {
                res.warnings.push_back("trace ended before expected bit count; padding one-bits");
            }
            bits.insert(bits.end(), missing, 1);
        } else {
            const long long trail = std::clamp(observed, 0ll, run_cap);
            bits.insert(bits.end(), static_cast<std::size_t>(trail), 1);
        }
    }

    res.bits.preamble_len = std::min(cfg.preamble_len, bits.size());
    return res;
}

DecodeResult matched_filter_decode(const PowerTrace& trace, double intended_bit_period_s,
                                   const DecoderConfig& cfg) {
    validate(trace);
    validate(cfg);
    if (!(intended_bit_period_s > 0.0)) {
        throw std::invalid_argument("intended_bit_period_s must be positive");
    }

    const double fs = trace.sample_rate_hz;
    const PowerTrace filtered =
        lowpass(trace, default_filter_for_period(intended_bit_period_s, fs));

    // Locate the first preamble peak with the amplitude threshold.
    const auto [amp_threshold, amp_fit] = estimate_threshold(
        filtered, static_cast<double>(cfg.preamble_len) * intended_bit_period_s);
    const double min_width = cfg.min_peak_width_s.value_or(intended_bit_period_s / 10.0);
    DecodeResult res;
    res.peaks = detect_peaks(filtered, amp_threshold, min_width);
    if (res.peaks.empty()) throw decode_error("preamble not found");

    // Correlate with the known pulse: a rectangle spanning half a bit
    // period. Normalizing by the pulse length keeps correlation values in
    // milliamperes, so the mixture threshold works unchanged.
    const auto pulse_len =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.5 * intended_bit_period_s * fs)));
    const std::size_t n = filtered.samples.size();
    if (pulse_len > n) throw decode_error("trace shorter than one pulse");
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + filtered.samples[i];
    const std::size_t corr_len = n - pulse_len + 1;
    std::vector<double> corr(corr_len);
    for (std::size_t i = 0; i < corr_len; ++i) {
        corr[i] = (prefix[i + pulse_len] - prefix[i]) / static_cast<double>(pulse_len);
    }

    const auto first_peak_idx = static_cast<std::size_t>(std::llround(
        (res.peaks.front().start_s - trace.start_time_s) * fs));
    if (first_peak_idx >= corr_len) throw decode_error("preamble not found");
    const auto window = std::min(
        corr_len - first_peak_idx,
        static_cast<std::size_t>(std::llround(static_cast<double>(cfg.preamble_len) *
                                              intended_bit_period_s * fs)));
    const GmmFit corr_fit = fit_gmm_two_component({corr.data() + first_peak_idx, window});
    const double corr_threshold = 0.5 * (corr_fit.mean_lo_ma + corr_fit.mean_hi_ma);
    res.threshold_ma = corr_threshold;
    res.threshold_fit = corr_fit;
    res.est_bit_period_s = intended_bit_period_s;  // intended clock, never re-estimated

    const std::size_t limit =
        cfg.expected_bit_count.value_or(std::numeric_limits<std::size_t>::max());
    for (std::size_t k = 0; res.bits.bits.size() < limit; ++k) {
        const auto idx = first_peak_idx + static_cast<std::size_t>(std::llround(
                             static_cast<double>(k) * intended_bit_period_s * fs));
        if (idx >= corr_len) break;
        res.bits.bits.push_back(corr[idx] > corr_threshold ? 0 : 1);
    }
    if (res.bits.bits.empty()) throw decode_error("trace too short to sample any bit");
    res.bits.preamble_len = std::min(cfg.preamble_len, res.bits.bits.size());
    return res;
}

}  // namespace bm
