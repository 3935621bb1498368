/* Exercises the shared-library C API end to end: handle lifecycle, error
 * codes, and a full encode -> simulate -> decode -> BER round trip. */

#include <burstmodem/burstmodem.h>

#include <assert.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                      \
    do {                                                                  \
        if (!(cond)) {                                                    \
            ++failures;                                                   \
            fprintf(stderr, "FAILED %s:%d: %s\n", __FILE__, __LINE__, #cond); \
        }                                                                 \
    } while (0)

static void test_errors(void) {
    bm_trace* trace = NULL;
    EXPECT(bm_trace_load_csv("no_such_trace.csv", &trace) == BM_ERR_IO);
    EXPECT(strlen(bm_last_error()) > 0);
    EXPECT(bm_trace_load_csv(NULL, &trace) == BM_ERR_INVALID_ARGUMENT);

    bm_tx_params* bad = NULL;
    EXPECT(bm_tx_params_create(-1.0, 0.5, 8, &bad) == BM_ERR_INVALID_ARGUMENT);
    EXPECT(bad == NULL);

    /* A flat trace has no separable threshold: decode error. */
    double flat[30000];
    for (int i = 0; i < 30000; ++i) flat[i] = 50.0;
    EXPECT(bm_trace_create(5000.0, flat, 30000, 0.0, &trace) == BM_OK);
    bm_decoder_config* cfg = NULL;
    EXPECT(bm_decoder_config_create(8, -1.0, 3.0, &cfg) == BM_OK);
    bm_decode_result* result = NULL;
    EXPECT(bm_decode_robust(trace, 0.5, cfg, &result) == BM_ERR_DECODE);
    bm_decoder_config_free(cfg);
    bm_trace_free(trace);
}

static void test_round_trip(void) {
    const uint8_t payload[] = {'C', 'a', 'p', 'i'};
    bm_tx_params* tx = NULL;
    EXPECT(bm_tx_params_create(0.5, 0.5, 8, &tx) == BM_OK);

    bm_bitstream* sent = NULL;
    EXPECT(bm_encode_payload(payload, sizeof payload, tx, &sent) == BM_OK);
    EXPECT(bm_bitstream_count(sent) == 8 + 8 * sizeof payload);
    EXPECT(bm_bitstream_preamble_len(sent) == 8);

    bm_schedule* schedule = NULL;
    EXPECT(bm_schedule_bursts(sent, tx, &schedule) == BM_OK);
    EXPECT(bm_schedule_total_duration_s(schedule) > 0.0);

    bm_channel_model* model = NULL;
    EXPECT(bm_channel_model_default(&model) == BM_OK);
    EXPECT(bm_channel_model_zero_noise(model) == BM_OK);
    EXPECT(bm_channel_model_set_seed(model, 3) == BM_OK);
    EXPECT(bm_channel_model_seed(model) == 3);

    bm_trace* trace = NULL;
    EXPECT(bm_simulate(schedule, model, &trace) == BM_OK);
    EXPECT(bm_trace_count(trace) > 0);
    EXPECT(bm_trace_samples_ma(trace) != NULL);

    bm_decoder_config* cfg = NULL;
    EXPECT(bm_decoder_config_create(8, -1.0, 3.0, &cfg) == BM_OK);
    EXPECT(bm_decoder_config_set_expected_bit_count(cfg, bm_bitstream_count(sent)) == BM_OK);

    bm_decode_result* result = NULL;
    EXPECT(bm_decode_robust(trace, 0.5, cfg, &result) == BM_OK);
    EXPECT(bm_decode_result_peak_count(result) > 0);

    bm_bitstream* received = NULL;
    EXPECT(bm_decode_result_bits(result, &received) == BM_OK);
    double ber = -1.0;
    EXPECT(bm_bit_error_ratio(sent, received, &ber) == BM_OK);
    EXPECT(ber == 0.0);

    uint8_t bytes[16];
    size_t written = 0;
    EXPECT(bm_bitstream_payload_bytes(received, bytes, sizeof bytes, &written) == BM_OK);
    EXPECT(written == sizeof payload);
    EXPECT(memcmp(bytes, payload, sizeof payload) == 0);

    bm_bitstream_free(received);
    bm_decode_result_free(result);
    bm_decoder_config_free(cfg);
    bm_trace_free(trace);
    bm_channel_model_free(model);
    bm_schedule_free(schedule);
    bm_bitstream_free(sent);
    bm_tx_params_free(tx);
}

static void test_sweep_and_report(void) {
    const uint8_t payload[] = {'r'};
    const int periods[] = {500, 700};
    bm_channel_model* model = NULL;
    EXPECT(bm_channel_model_default(&model) == BM_OK);
    EXPECT(bm_channel_model_zero_noise(model) == BM_OK);

    bm_report* report = NULL;
    EXPECT(bm_run_sweep(payload, sizeof payload, periods, 2, model, 2, BM_DECODER_ROBUST,
                        "capi", &report) == BM_OK);
    EXPECT(bm_report_row_count(report) == 2);
    int period_ms = 0, seeds = 0;
    double ber = -1.0;
    size_t payload_bits = 0;
    EXPECT(bm_report_row(report, 0, &period_ms, &ber, &seeds, &payload_bits) == BM_OK);
    EXPECT(period_ms == 700); /* rows sorted by descending period */
    EXPECT(ber == 0.0);
    EXPECT(payload_bits == 8);

    char* text = NULL;
    EXPECT(bm_report_csv(report, &text) == BM_OK);
    EXPECT(strstr(text, "device_profile,period_ms,ber_pct,seeds,payload_bits") == text);
    EXPECT(strstr(text, "capi,700,0.00,2,8") != NULL);
    bm_text_free(text);

    EXPECT(bm_report_markdown(report, &text) == BM_OK);
    EXPECT(strstr(text, "| capi |") != NULL);
    bm_text_free(text);

    bm_report_free(report);
    bm_channel_model_free(model);
}

static void test_handshake_and_gate(void) {
    int allowed = -1;
    EXPECT(bm_transmission_allowed(1, 1, 80, 50, &allowed) == BM_OK);
    EXPECT(allowed == 1);
    EXPECT(bm_transmission_allowed(1, 0, 100, 50, &allowed) == BM_OK);
    EXPECT(allowed == 0);

    /* low 2 s / high 2 s / low 2 s / high 4 s around 500 mA at 100 Hz */
    double samples[1000];
    for (int i = 0; i < 1000; ++i) {
        const int in_high = (i >= 200 && i < 400) || i >= 600;
        samples[i] = in_high ? 900.0 : 100.0;
    }
    bm_trace* trace = NULL;
    EXPECT(bm_trace_create(100.0, samples, 1000, 0.0, &trace) == BM_OK);
    int detected = -1;
    EXPECT(bm_detect_handshake(trace, 500.0, 2.0, 0.2, &detected) == BM_OK);
    EXPECT(detected == 1);
    EXPECT(bm_detect_handshake(trace, 500.0, 4.0, 0.2, &detected) == BM_ERR_DECODE);
    bm_trace_free(trace);
}

static void test_trace_filter_and_schedule_io(void) {
    double flat[20000];
    for (int i = 0; i < 20000; ++i) flat[i] = 120.0;
    bm_trace* trace = NULL;
    EXPECT(bm_trace_create(5000.0, flat, 20000, 0.0, &trace) == BM_OK);
    bm_trace* filtered = NULL;
    EXPECT(bm_trace_lowpass(trace, 12.0, 24.0, &filtered) == BM_OK);
    EXPECT(bm_trace_count(filtered) == 20000);
    const double* samples = bm_trace_samples_ma(filtered);
    int dc_ok = 1;
    for (size_t i = 0; i < 20000; ++i) {
        if (samples[i] < 119.99 || samples[i] > 120.01) dc_ok = 0;
    }
    EXPECT(dc_ok);
    /* stop frequency beyond Nyquist must be rejected */
    bm_trace* bad = NULL;
    EXPECT(bm_trace_lowpass(trace, 2000.0, 3000.0, &bad) == BM_ERR_INVALID_ARGUMENT);
    bm_trace_free(filtered);
    bm_trace_free(trace);

    bm_tx_params* tx = NULL;
    bm_bitstream* bits = NULL;
    bm_schedule* schedule = NULL;
    const uint8_t payload[] = {'i', 'o'};
    EXPECT(bm_tx_params_create(0.5, 0.5, 8, &tx) == BM_OK);
    EXPECT(bm_encode_payload(payload, sizeof payload, tx, &bits) == BM_OK);
    EXPECT(bm_schedule_bursts(bits, tx, &schedule) == BM_OK);
    EXPECT(bm_schedule_save_csv(schedule, "bm_capi_sched.csv") == BM_OK);
    bm_schedule* back = NULL;
    EXPECT(bm_schedule_load_csv("bm_capi_sched.csv", &back) == BM_OK);
    EXPECT(bm_schedule_count(back) == bm_schedule_count(schedule));
    double start = -1.0, end = -1.0;
    EXPECT(bm_schedule_interval(back, 0, &start, &end) == BM_OK);
    EXPECT(start == 0.0 && end == 0.25);
    EXPECT(bm_schedule_interval(back, 999, &start, &end) == BM_ERR_INVALID_ARGUMENT);
    remove("bm_capi_sched.csv");
    bm_schedule_free(back);
    bm_schedule_free(schedule);
    bm_bitstream_free(bits);
    bm_tx_params_free(tx);
}

static void test_config_and_filter(void) {
    EXPECT(bm_config_write_default("bm_capi_config.json") == BM_OK);
    bm_channel_model* model = NULL;
    bm_decoder_config* decoder = NULL;
    bm_tx_params* tx = NULL;
    EXPECT(bm_config_load("bm_capi_config.json", &model, &decoder, &tx) == BM_OK);
    EXPECT(bm_channel_model_sample_rate_hz(model) == 5000.0);
    EXPECT(bm_tx_params_bit_period_s(tx) == 0.5);
    bm_channel_model_free(model);
    bm_decoder_config_free(decoder);
    bm_tx_params_free(tx);
    remove("bm_capi_config.json");

    double pass = 0.0, stop = 0.0;
    EXPECT(bm_default_filter_for_period(0.5, 5000.0, &pass, &stop) == BM_OK);
    EXPECT(pass == 12.0);
    EXPECT(stop == 24.0);
}

int main(void) {
    EXPECT(strcmp(bm_version(), "0.1.0") == 0);
    test_errors();
    test_round_trip();
    test_sweep_and_report();
    test_handshake_and_gate();
    test_trace_filter_and_schedule_io();
    test_config_and_filter();
    if (failures == 0) {
        printf("test_capi: all checks passed\n");
        return 0;
    }
    fprintf(stderr, "test_capi: %d check(s) failed\n", failures);
    return 1;
}
