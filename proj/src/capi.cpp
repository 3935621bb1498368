#include "burstmodem/burstmodem.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "analysis.hpp"
#include "channel.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "modem_rx.hpp"
#include "modem_tx.hpp"
#include "signal.hpp"

struct bm_trace {
    bm::PowerTrace v;
};
struct bm_bitstream {
    bm::BitStream v;
};
struct bm_schedule {
    bm::BurstSchedule v;
};
struct bm_channel_model {
    bm::ChannelModel v;
};
struct bm_tx_params {
    bm::TransmissionParams v;
};
struct bm_decoder_config {
    bm::DecoderConfig v;
};
struct bm_decode_result {
    bm::DecodeResult v;
};
struct bm_report {
    bm::BerReport v;
};

namespace {

thread_local std::string g_last_error;

void set_error(const char* message) { g_last_error = message; }

template <typename Fn>
int guarded(Fn&& fn) noexcept {
    try {
        fn();
        g_last_error.clear();
        return BM_OK;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return BM_ERR_INVALID_ARGUMENT;
    } catch (const bm::io_error& e) {
        set_error(e.what());
        return BM_ERR_IO;
    } catch (const bm::parse_error& e) {
        set_error(e.what());
        return BM_ERR_PARSE;
    } catch (const bm::decode_error& e) {
        set_error(e.what());
        return BM_ERR_DECODE;
    } catch (const std::exception& e) {
        set_error(e.what());
        return BM_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown error");
        return BM_ERR_INTERNAL;
    }
}

int require(bool ok, const char* message) {
    if (ok) return BM_OK;
    set_error(message);
    return BM_ERR_INVALID_ARGUMENT;
}

char* copy_text(const std::string& text) {
    char* out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* bm_version(void) { return "0.1.0"; }

const char* bm_last_error(void) { return g_last_error.c_str(); }

/* ---- power traces ------------------------------------------------------ */

int bm_trace_create(double sample_rate_hz, const double* samples_ma, size_t count,
                    double start_time_s, bm_trace** out) {
    if (int rc = require(out && samples_ma && count > 0, "null or empty arguments")) return rc;
    return guarded([&] {
        auto handle = std::make_unique<bm_trace>();
        handle->v.sample_rate_hz = sample_rate_hz;
        handle->v.samples.assign(samples_ma, samples_ma + count);
        handle->v.start_time_s = start_time_s;
        bm::validate(handle->v);
        *out = handle.release();
    });
}

int bm_trace_load_csv(const char* path, bm_trace** out) {
    if (int rc = require(path && out, "null arguments")) return rc;
    return guarded([&] { *out = new bm_trace{bm::load_trace(path)}; });
}

int bm_trace_save_csv(const bm_trace* trace, const char* path) {
    if (int rc = require(trace && path, "null arguments")) return rc;
    return guarded([&] { bm::save_trace(trace->v, path); });
}

void bm_trace_free(bm_trace* trace) { delete trace; }

double bm_trace_sample_rate_hz(const bm_trace* trace) { return trace ? trace->v.sample_rate_hz : 0.0; }

double bm_trace_start_time_s(const bm_trace* trace) { return trace ? trace->v.start_time_s : 0.0; }

size_t bm_trace_count(const bm_trace* trace) { return trace ? trace->v.samples.size() : 0; }

const double* bm_trace_samples_ma(const bm_trace* trace) {
    return trace ? trace->v.samples.data() : nullptr;
}

int bm_trace_lowpass(const bm_trace* trace, double pass_freq_hz, double stop_freq_hz,
                     bm_trace** out) {
    if (int rc = require(trace && out, "null arguments")) return rc;
    return guarded([&] {
        *out = new bm_trace{bm::lowpass(trace->v, bm::FilterSpec{pass_freq_hz, stop_freq_hz})};
    });
}

int bm_default_filter_for_period(double bit_period_s, double sample_rate_hz, double* pass_freq_hz,
                                 double* stop_freq_hz) {
    if (int rc = require(pass_freq_hz && stop_freq_hz, "null arguments")) return rc;
    return guarded([&] {
        const bm::FilterSpec spec = bm::default_filter_for_period(bit_period_s, sample_rate_hz);
        *pass_freq_hz = spec.pass_freq_hz;
        *stop_freq_hz = spec.stop_freq_hz;
    });
}

/* ---- transmitter ------------------------------------------------------- */

int bm_tx_params_create(double bit_period_s, double duty_cycle, size_t preamble_len,
                        bm_tx_params** out) {
    if (int rc = require(out != nullptr, "null arguments")) return rc;
    return guarded([&] {
        auto handle = std::make_unique<bm_tx_params>();
        handle->v.bit_period_s = bit_period_s;
        handle->v.duty_cycle = duty_cycle;
        handle->v.preamble_len = preamble_len;
        bm::validate(handle->v);
        *out = handle.release();
    });
}

void bm_tx_params_free(bm_tx_params* params) { delete params; }

double bm_tx_params_bit_period_s(const bm_tx_params* params) {
    return params ? params->v.bit_period_s : 0.0;
}

int bm_tx_params_set_bit_period_s(bm_tx_params* params, double bit_period_s) {
    if (int rc = require(params != nullptr, "null arguments")) return rc;
    if (int rc = require(bit_period_s > 0.0, "bit_period_s must be positive")) return rc;
    params->v.bit_period_s = bit_period_s;
    return BM_OK;
}

double bm_tx_params_duty_cycle(const bm_tx_params* params) {
    return params ? params->v.duty_cycle : 0.0;
}

size_t bm_tx_params_preamble_len(const bm_tx_params* params) {
    return params ? params->v.preamble_len : 0;
}

int bm_encode_payload(const uint8_t* payload, size_t count, const bm_tx_params* params,
                      bm_bitstream** out) {
    if (int rc = require(params && out, "null arguments")) return rc;
    if (int rc = require(payload != nullptr || count == 0, "null payload with nonzero count")) {
        return rc;
    }
    return guarded([&] {
        const std::vector<std::uint8_t> bytes(payload, payload + count);
        *out = new bm_bitstream{bm::encode_payload(bytes, params->v)};
    });
}

int bm_bitstream_create(const uint8_t* bits, size_t count, size_t preamble_len,
                        bm_bitstream** out) {
    if (int rc = require(bits && out && count > 0, "null or empty arguments")) return rc;
    if (int rc = require(preamble_len <= count, "preamble_len exceeds bit count")) return rc;
    return guarded([&] {
        auto handle = std::make_unique<bm_bitstream>();
        handle->v.bits.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            if (bits[i] > 1) throw std::invalid_argument("bits must be 0 or 1");
            handle->v.bits.push_back(bits[i]);
        }
        handle->v.preamble_len = preamble_len;
        *out = handle.release();
    });
}

void bm_bitstream_free(bm_bitstream* stream) { delete stream; }

size_t bm_bitstream_count(const bm_bitstream* stream) { return stream ? stream->v.bits.size() : 0; }

size_t bm_bitstream_preamble_len(const bm_bitstream* stream) {
    return stream ? stream->v.preamble_len : 0;
}

const uint8_t* bm_bitstream_bits(const bm_bitstream* stream) {
    return stream ? stream->v.bits.data() : nullptr;
}

int bm_bitstream_payload_bytes(const bm_bitstream* stream, uint8_t* buffer, size_t buffer_size,
                               size_t* written) {
    if (int rc = require(stream && buffer && written, "null arguments")) return rc;
    return guarded([&] {
        const auto bytes = bm::payload_bytes(stream->v);
        if (bytes.size() > buffer_size) throw std::invalid_argument("buffer too small");
        std::memcpy(buffer, bytes.data(), bytes.size());
        *written = bytes.size();
    });
}

int bm_schedule_bursts(const bm_bitstream* stream, const bm_tx_params* params, bm_schedule** out) {
    if (int rc = require(stream && params && out, "null arguments")) return rc;
    return guarded([&] { *out = new bm_schedule{bm::schedule_bursts(stream->v, params->v)}; });
}

void bm_schedule_free(bm_schedule* schedule) { delete schedule; }

size_t bm_schedule_count(const bm_schedule* schedule) {
    return schedule ? schedule->v.intervals.size() : 0;
}

int bm_schedule_interval(const bm_schedule* schedule, size_t index, double* start_s,
                         double* end_s) {
    if (int rc = require(schedule && start_s && end_s, "null arguments")) return rc;
    if (int rc = require(index < schedule->v.intervals.size(), "interval index out of range")) {
        return rc;
    }
    *start_s = schedule->v.intervals[index].first;
    *end_s = schedule->v.intervals[index].second;
    return BM_OK;
}

double bm_schedule_total_duration_s(const bm_schedule* schedule) {
    return schedule ? schedule->v.total_duration_s : 0.0;
}

int bm_schedule_set_total_duration_s(bm_schedule* schedule, double total_duration_s) {
    if (int rc = require(schedule != nullptr, "null arguments")) return rc;
    return guarded([&] {
        bm::BurstSchedule copy = schedule->v;
        copy.total_duration_s = total_duration_s;
        bm::validate(copy);
        schedule->v.total_duration_s = total_duration_s;
    });
}

int bm_schedule_save_csv(const bm_schedule* schedule, const char* path) {
    if (int rc = require(schedule && path, "null arguments")) return rc;
    return guarded([&] { bm::save_schedule(schedule->v, path); });
}

int bm_schedule_load_csv(const char* path, bm_schedule** out) {
    if (int rc = require(path && out, "null arguments")) return rc;
    return guarded([&] { *out = new bm_schedule{bm::load_schedule(path)}; });
}

int bm_transmission_allowed(int usb_connected, int screen_off, int battery_pct, int omega_pct,
                            int* out_allowed) {
    if (int rc = require(out_allowed != nullptr, "null arguments")) return rc;
    const bm::DeviceState state{usb_connected != 0, screen_off != 0, battery_pct};
    *out_allowed = bm::transmission_allowed(state, omega_pct) ? 1 : 0;
    return BM_OK;
}

int bm_detect_handshake(const bm_trace* supply_current, double theta_ma, double t_s,
                        double tolerance_frac, int* out_detected) {
    if (int rc = require(supply_current && out_detected, "null arguments")) return rc;
    return guarded([&] {
        const bm::HandshakeParams hs{theta_ma, t_s, tolerance_frac};
        *out_detected = bm::detect_handshake(supply_current->v, hs) ? 1 : 0;
    });
}

/* ---- channel simulator ------------------------------------------------- */

int bm_channel_model_default(bm_channel_model** out) {
    if (int rc = require(out != nullptr, "null arguments")) return rc;
    *out = new bm_channel_model{bm::default_channel_model()};
    return BM_OK;
}

void bm_channel_model_free(bm_channel_model* model) { delete model; }

int bm_channel_model_zero_noise(bm_channel_model* model) {
    if (int rc = require(model != nullptr, "null arguments")) return rc;
    model->v = bm::zero_noise(model->v);
    return BM_OK;
}

int bm_channel_model_set_seed(bm_channel_model* model, uint64_t seed) {
    if (int rc = require(model != nullptr, "null arguments")) return rc;
    model->v.seed = seed;
    return BM_OK;
}

uint64_t bm_channel_model_seed(const bm_channel_model* model) { return model ? model->v.seed : 0; }

double bm_channel_model_sample_rate_hz(const bm_channel_model* model) {
    return model ? model->v.sample_rate_hz : 0.0;
}

int bm_simulate(const bm_schedule* schedule, const bm_channel_model* model, bm_trace** out) {
    if (int rc = require(schedule && model && out, "null arguments")) return rc;
    return guarded([&] { *out = new bm_trace{bm::simulate(schedule->v, model->v)}; });
}

/* ---- receiver ---------------------------------------------------------- */

int bm_decoder_config_create(size_t preamble_len, double min_peak_width_s,
                             double trailing_gap_periods, bm_decoder_config** out) {
    if (int rc = require(out != nullptr, "null arguments")) return rc;
    return guarded([&] {
        auto handle = std::make_unique<bm_decoder_config>();
        handle->v.preamble_len = preamble_len;
        if (min_peak_width_s >= 0.0) handle->v.min_peak_width_s = min_peak_width_s;
        handle->v.trailing_gap_periods = trailing_gap_periods;
        bm::validate(handle->v);
        *out = handle.release();
    });
}

int bm_decoder_config_set_expected_bit_count(bm_decoder_config* config, size_t count) {
    if (int rc = require(config != nullptr, "null arguments")) return rc;
    if (count == 0) {
        config->v.expected_bit_count.reset();
    } else {
        config->v.expected_bit_count = count;
    }
    return BM_OK;
}

void bm_decoder_config_free(bm_decoder_config* config) { delete config; }

int bm_decode_robust(const bm_trace* trace, double intended_bit_period_s,
                     const bm_decoder_config* config, bm_decode_result** out) {
    if (int rc = require(trace && config && out, "null arguments")) return rc;
    return guarded([&] {
        *out = new bm_decode_result{bm::robust_decode(trace->v, intended_bit_period_s, config->v)};
    });
}

int bm_decode_matched(const bm_trace* trace, double intended_bit_period_s,
                      const bm_decoder_config* config, bm_decode_result** out) {
    if (int rc = require(trace && config && out, "null arguments")) return rc;
    return guarded([&] {
        *out = new bm_decode_result{
            bm::matched_filter_decode(trace->v, intended_bit_period_s, config->v)};
    });
}

void bm_decode_result_free(bm_decode_result* result) { delete result; }

int bm_decode_result_bits(const bm_decode_result* result, bm_bitstream** out) {
    if (int rc = require(result && out, "null arguments")) return rc;
    *out = new bm_bitstream{result->v.bits};
    return BM_OK;
}

double bm_decode_result_threshold_ma(const bm_decode_result* result) {
    return result ? result->v.threshold_ma : 0.0;
}

double bm_decode_result_bit_period_s(const bm_decode_result* result) {
    return result ? result->v.est_bit_period_s : 0.0;
}

size_t bm_decode_result_peak_count(const bm_decode_result* result) {
    return result ? result->v.peaks.size() : 0;
}

int bm_decode_result_peak(const bm_decode_result* result, size_t index, double* start_s,
                          double* end_s, double* max_ma) {
    if (int rc = require(result && start_s && end_s && max_ma, "null arguments")) return rc;
    if (int rc = require(index < result->v.peaks.size(), "peak index out of range")) return rc;
    const bm::Peak& peak = result->v.peaks[index];
    *start_s = peak.start_s;
    *end_s = peak.end_s;
    *max_ma = peak.max_ma;
    return BM_OK;
}

size_t bm_decode_result_warning_count(const bm_decode_result* result) {
    return result ? result->v.warnings.size() : 0;
}

const char* bm_decode_result_warning(const bm_decode_result* result, size_t index) {
    if (!result || index >= result->v.warnings.size()) return nullptr;
    return result->v.warnings[index].c_str();
}

/* ---- analysis ---------------------------------------------------------- */

int bm_bit_error_ratio(const bm_bitstream* sent, const bm_bitstream* received, double* out_pct) {
    if (int rc = require(sent && received && out_pct, "null arguments")) return rc;
    return guarded([&] { *out_pct = bm::bit_error_ratio(sent->v, received->v); });
}

int bm_run_sweep(const uint8_t* payload, size_t count, const int* periods_ms, size_t period_count,
                 const bm_channel_model* model, int seeds, int decoder, const char* profile,
                 bm_report** out) {
    if (int rc = require(payload && periods_ms && model && out, "null arguments")) return rc;
    if (int rc = require(decoder == BM_DECODER_ROBUST || decoder == BM_DECODER_MATCHED,
                         "decoder must be BM_DECODER_ROBUST or BM_DECODER_MATCHED")) {
        return rc;
    }
    return guarded([&] {
        const std::vector<std::uint8_t> bytes(payload, payload + count);
        const std::vector<int> periods(periods_ms, periods_ms + period_count);
        const bm::DecoderKind kind =
            decoder == BM_DECODER_ROBUST ? bm::DecoderKind::robust : bm::DecoderKind::matched;
        *out = new bm_report{bm::run_sweep(bytes, periods, model->v, seeds, kind,
                                           profile ? profile : "default")};
    });
}

void bm_report_free(bm_report* report) { delete report; }

size_t bm_report_row_count(const bm_report* report) { return report ? report->v.rows.size() : 0; }

int bm_report_row(const bm_report* report, size_t index, int* period_ms, double* ber_pct,
                  int* seeds, size_t* payload_bits) {
    if (int rc = require(report && period_ms && ber_pct && seeds && payload_bits,
                         "null arguments")) {
        return rc;
    }
    if (int rc = require(index < report->v.rows.size(), "row index out of range")) return rc;
    const bm::BerRow& row = report->v.rows[index];
    *period_ms = row.period_ms;
    *ber_pct = row.ber_pct;
    *seeds = row.seeds;
    *payload_bits = row.payload_bits;
    return BM_OK;
}

int bm_report_csv(const bm_report* report, char** out_text) {
    if (int rc = require(report && out_text, "null arguments")) return rc;
    return guarded([&] { *out_text = copy_text(bm::report_csv(report->v)); });
}

int bm_report_markdown(const bm_report* report, char** out_text) {
    if (int rc = require(report && out_text, "null arguments")) return rc;
    return guarded([&] { *out_text = copy_text(bm::report_markdown(report->v)); });
}

void bm_text_free(char* text) { delete[] text; }

/* ---- configuration ----------------------------------------------------- */

int bm_config_load(const char* path, bm_channel_model** channel, bm_decoder_config** decoder,
                   bm_tx_params** tx) {
    if (int rc = require(path != nullptr, "null arguments")) return rc;
    return guarded([&] {
        const bm::Config config = bm::load_config(path);
        if (channel) *channel = new bm_channel_model{config.channel};
        if (decoder) *decoder = new bm_decoder_config{config.decoder};
        if (tx) *tx = new bm_tx_params{config.tx};
    });
}

int bm_config_write_default(const char* path) {
    if (int rc = require(path != nullptr, "null arguments")) return rc;
    return guarded([&] { bm::save_config(bm::Config{}, path); });
}

}  // extern "C"
