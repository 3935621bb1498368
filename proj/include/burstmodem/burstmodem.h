/*
 * burstmodem - software modem and channel simulator for the USB-power
 * covert channel: payloads become unipolar RZ on-off power-burst schedules,
 * a seeded channel model renders the supply-current trace a charging
 * station would measure, and the receiver pipeline (low-pass filter,
 * Gaussian-mixture threshold, preamble sync, peak-time-difference decoding)
 * recovers the bits.
 *
 * C ABI: every object is an opaque handle created and destroyed by this
 * library. Functions return BM_OK (0) on success or an error code;
 * bm_last_error() describes the most recent failure on the calling thread.
 * Handles are immutable after creation unless a setter is documented, and
 * distinct handles may be used concurrently from different threads.
 */

#ifndef BURSTMODEM_H
#define BURSTMODEM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BM_API __declspec(dllexport)
#else
#define BM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
    BM_OK = 0,
    BM_ERR_INVALID_ARGUMENT = 1,
    BM_ERR_IO = 2,
    BM_ERR_PARSE = 3,
    BM_ERR_DECODE = 4,
    BM_ERR_INTERNAL = 5
};

enum {
    BM_DECODER_ROBUST = 0,
    BM_DECODER_MATCHED = 1
};

typedef struct bm_trace bm_trace;
typedef struct bm_bitstream bm_bitstream;
typedef struct bm_schedule bm_schedule;
typedef struct bm_channel_model bm_channel_model;
typedef struct bm_tx_params bm_tx_params;
typedef struct bm_decoder_config bm_decoder_config;
typedef struct bm_decode_result bm_decode_result;
typedef struct bm_report bm_report;

BM_API const char* bm_version(void);

/* Message for the most recent error on this thread; empty string if none. */
BM_API const char* bm_last_error(void);

/* ---- power traces ------------------------------------------------------ */

BM_API int bm_trace_create(double sample_rate_hz, const double* samples_ma, size_t count,
                           double start_time_s, bm_trace** out);
/* CSV with header "time_s,current_ma". Non-uniform timestamps are resampled
 * onto a uniform grid by linear interpolation. */
BM_API int bm_trace_load_csv(const char* path, bm_trace** out);
BM_API int bm_trace_save_csv(const bm_trace* trace, const char* path);
BM_API void bm_trace_free(bm_trace* trace);
BM_API double bm_trace_sample_rate_hz(const bm_trace* trace);
BM_API double bm_trace_start_time_s(const bm_trace* trace);
BM_API size_t bm_trace_count(const bm_trace* trace);
BM_API const double* bm_trace_samples_ma(const bm_trace* trace);

/* Zero-phase low-pass: >= 40 dB attenuation at stop_freq_hz, <= 1 dB ripple
 * at pass_freq_hz, no shift of peak positions. */
BM_API int bm_trace_lowpass(const bm_trace* trace, double pass_freq_hz, double stop_freq_hz,
                            bm_trace** out);
/* Band edges matched to a bit period: pass 6/T and stop 12/T, clamped below
 * 0.45 * sample_rate. */
BM_API int bm_default_filter_for_period(double bit_period_s, double sample_rate_hz,
                                        double* pass_freq_hz, double* stop_freq_hz);

/* ---- transmitter ------------------------------------------------------- */

/* duty_cycle is the burst fraction of a bit period; the preamble is
 * preamble_len peak bits (zeros). */
BM_API int bm_tx_params_create(double bit_period_s, double duty_cycle, size_t preamble_len,
                               bm_tx_params** out);
BM_API void bm_tx_params_free(bm_tx_params* params);
BM_API double bm_tx_params_bit_period_s(const bm_tx_params* params);
BM_API int bm_tx_params_set_bit_period_s(bm_tx_params* params, double bit_period_s);
BM_API double bm_tx_params_duty_cycle(const bm_tx_params* params);
BM_API size_t bm_tx_params_preamble_len(const bm_tx_params* params);

/* Preamble zeros followed by each payload byte MSB-first. */
BM_API int bm_encode_payload(const uint8_t* payload, size_t count, const bm_tx_params* params,
                             bm_bitstream** out);

BM_API int bm_bitstream_create(const uint8_t* bits, size_t count, size_t preamble_len,
                               bm_bitstream** out);
BM_API void bm_bitstream_free(bm_bitstream* stream);
BM_API size_t bm_bitstream_count(const bm_bitstream* stream);
BM_API size_t bm_bitstream_preamble_len(const bm_bitstream* stream);
BM_API const uint8_t* bm_bitstream_bits(const bm_bitstream* stream);
/* MSB-first bytes of the payload portion; *written is the byte count. The
 * buffer must hold (count - preamble_len) / 8 bytes. */
BM_API int bm_bitstream_payload_bytes(const bm_bitstream* stream, uint8_t* buffer,
                                      size_t buffer_size, size_t* written);

/* Zero bits burst over the first duty_cycle * T of their slot; one bits are
 * silent. The schedule lasts count * T seconds. */
BM_API int bm_schedule_bursts(const bm_bitstream* stream, const bm_tx_params* params,
                              bm_schedule** out);
BM_API void bm_schedule_free(bm_schedule* schedule);
BM_API size_t bm_schedule_count(const bm_schedule* schedule);
BM_API int bm_schedule_interval(const bm_schedule* schedule, size_t index, double* start_s,
                                double* end_s);
BM_API double bm_schedule_total_duration_s(const bm_schedule* schedule);
/* Extend the schedule beyond its last interval (trailing silent bits). */
BM_API int bm_schedule_set_total_duration_s(bm_schedule* schedule, double total_duration_s);
/* CSV with header "start_s,end_s". Loading sets total duration to the last
 * interval end. */
BM_API int bm_schedule_save_csv(const bm_schedule* schedule, const char* path);
BM_API int bm_schedule_load_csv(const char* path, bm_schedule** out);

/* True iff usb_connected and screen_off and battery_pct >= omega_pct. */
BM_API int bm_transmission_allowed(int usb_connected, int screen_off, int battery_pct,
                                   int omega_pct, int* out_allowed);

/* Supply-side wake-up pattern: below theta for t, above for t, below for t,
 * then above through the end of the trace. Timed segments must match t_s
 * within tolerance_frac. */
BM_API int bm_detect_handshake(const bm_trace* supply_current, double theta_ma, double t_s,
                               double tolerance_frac, int* out_detected);

/* ---- channel simulator ------------------------------------------------- */

/* Recorded default calibration; see README for the field values. */
BM_API int bm_channel_model_default(bm_channel_model** out);
BM_API void bm_channel_model_free(bm_channel_model* model);
/* Switch every stochastic term off and reset the width shrink to 1. */
BM_API int bm_channel_model_zero_noise(bm_channel_model* model);
BM_API int bm_channel_model_set_seed(bm_channel_model* model, uint64_t seed);
BM_API uint64_t bm_channel_model_seed(const bm_channel_model* model);
BM_API double bm_channel_model_sample_rate_hz(const bm_channel_model* model);

/* Deterministic given (schedule, model) including the seed. */
BM_API int bm_simulate(const bm_schedule* schedule, const bm_channel_model* model,
                       bm_trace** out);

/* ---- receiver ---------------------------------------------------------- */

/* min_peak_width_s < 0 selects the default debounce (bit period / 10). */
BM_API int bm_decoder_config_create(size_t preamble_len, double min_peak_width_s,
                                    double trailing_gap_periods, bm_decoder_config** out);
/* Agreed total transmission bits including the preamble; 0 clears it. */
BM_API int bm_decoder_config_set_expected_bit_count(bm_decoder_config* config, size_t count);
BM_API void bm_decoder_config_free(bm_decoder_config* config);

BM_API int bm_decode_robust(const bm_trace* trace, double intended_bit_period_s,
                            const bm_decoder_config* config, bm_decode_result** out);
BM_API int bm_decode_matched(const bm_trace* trace, double intended_bit_period_s,
                             const bm_decoder_config* config, bm_decode_result** out);
BM_API void bm_decode_result_free(bm_decode_result* result);
BM_API int bm_decode_result_bits(const bm_decode_result* result, bm_bitstream** out);
BM_API double bm_decode_result_threshold_ma(const bm_decode_result* result);
BM_API double bm_decode_result_bit_period_s(const bm_decode_result* result);
BM_API size_t bm_decode_result_peak_count(const bm_decode_result* result);
BM_API int bm_decode_result_peak(const bm_decode_result* result, size_t index, double* start_s,
                                 double* end_s, double* max_ma);
BM_API size_t bm_decode_result_warning_count(const bm_decode_result* result);
BM_API const char* bm_decode_result_warning(const bm_decode_result* result, size_t index);

/* ---- analysis ---------------------------------------------------------- */

/* Payload-bit error percentage; preambles excluded on both sides. */
BM_API int bm_bit_error_ratio(const bm_bitstream* sent, const bm_bitstream* received,
                              double* out_pct);

/* Monte-Carlo sweep over periods and seeds; each row is the median BER over
 * `seeds` runs with the model seed offset by the run index. `decoder` is a
 * BM_DECODER_* value; `profile` labels the rows (NULL means "default"). */
BM_API int bm_run_sweep(const uint8_t* payload, size_t count, const int* periods_ms,
                        size_t period_count, const bm_channel_model* model, int seeds,
                        int decoder, const char* profile, bm_report** out);
BM_API void bm_report_free(bm_report* report);
BM_API size_t bm_report_row_count(const bm_report* report);
BM_API int bm_report_row(const bm_report* report, size_t index, int* period_ms, double* ber_pct,
                         int* seeds, size_t* payload_bits);
/* Rendered report text; free with bm_text_free. */
BM_API int bm_report_csv(const bm_report* report, char** out_text);
BM_API int bm_report_markdown(const bm_report* report, char** out_text);
BM_API void bm_text_free(char* text);

/* ---- configuration ----------------------------------------------------- */

/* One JSON file with sections "channel", "decoder" and "tx"; missing keys
 * take defaults, unknown keys are rejected. Any output pointer may be NULL
 * to skip that section. */
BM_API int bm_config_load(const char* path, bm_channel_model** channel,
                          bm_decoder_config** decoder, bm_tx_params** tx);
/* Write the default configuration to a file, as a starting point. */
BM_API int bm_config_write_default(const char* path);

#ifdef __cplusplus
}
#endif

#endif /* BURSTMODEM_H */
