// Command-line front end for the burstmodem shared library. Talks to the
// core exclusively through the public C API.

#include <burstmodem/burstmodem.h>

#include <CLI11.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Fail {
    std::string message;
};

void check(int rc, const char* context) {
    if (rc != BM_OK) {
        throw Fail{std::string(context) + ": " + bm_last_error()};
    }
}

template <typename T, void (*Free)(T*)>
struct FreeDeleter {
    void operator()(T* p) const { Free(p); }
};
template <typename T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, FreeDeleter<T, Free>>;

using TracePtr = Handle<bm_trace, bm_trace_free>;
using BitsPtr = Handle<bm_bitstream, bm_bitstream_free>;
using SchedulePtr = Handle<bm_schedule, bm_schedule_free>;
using ModelPtr = Handle<bm_channel_model, bm_channel_model_free>;
using TxPtr = Handle<bm_tx_params, bm_tx_params_free>;
using DecoderCfgPtr = Handle<bm_decoder_config, bm_decoder_config_free>;
using ResultPtr = Handle<bm_decode_result, bm_decode_result_free>;
using ReportPtr = Handle<bm_report, bm_report_free>;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> period_ms;
    bool noiseless = false;
};

struct LoadedConfig {
    ModelPtr channel;
    DecoderCfgPtr decoder;
    TxPtr tx;
};

LoadedConfig load_config(const CommonOpts& opts) {
    LoadedConfig cfg;
    if (!opts.config_path.empty()) {
        bm_channel_model* channel = nullptr;
        bm_decoder_config* decoder = nullptr;
        bm_tx_params* tx = nullptr;
        check(bm_config_load(opts.config_path.c_str(), &channel, &decoder, &tx), "config");
        cfg.channel.reset(channel);
        cfg.decoder.reset(decoder);
        cfg.tx.reset(tx);
    } else {
        bm_channel_model* channel = nullptr;
        bm_decoder_config* decoder = nullptr;
        check(bm_channel_model_default(&channel), "channel model");
        cfg.channel.reset(channel);
        check(bm_decoder_config_create(8, -1.0, 3.0, &decoder), "decoder config");
        cfg.decoder.reset(decoder);
        bm_tx_params* tx = nullptr;
        check(bm_tx_params_create(0.5, 0.5, 8, &tx), "tx params");
        cfg.tx.reset(tx);
    }
    if (opts.period_ms) {
        check(bm_tx_params_set_bit_period_s(cfg.tx.get(), *opts.period_ms / 1000.0), "period");
    }
    if (opts.seed) {
        check(bm_channel_model_set_seed(cfg.channel.get(), *opts.seed), "seed");
    }
    if (opts.noiseless) {
        check(bm_channel_model_zero_noise(cfg.channel.get()), "noiseless");
    }
    return cfg;
}

std::vector<std::uint8_t> read_payload(const std::string& inline_text, const std::string& path) {
    if (!path.empty()) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Fail{"cannot open payload file: " + path};
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string text = buf.str();
        return {text.begin(), text.end()};
    }
    return {inline_text.begin(), inline_text.end()};
}

std::string printable(const std::vector<std::uint8_t>& bytes) {
    std::string out;
    char buf[8];
    for (std::uint8_t b : bytes) {
        if (std::isprint(b) != 0) {
            out.push_back(static_cast<char>(b));
        } else {
            std::snprintf(buf, sizeof buf, "\\x%02x", b);
            out += buf;
        }
    }
    return out;
}

BitsPtr encode(const std::vector<std::uint8_t>& payload, const TxPtr& tx) {
    bm_bitstream* bits = nullptr;
    check(bm_encode_payload(payload.data(), payload.size(), tx.get(), &bits), "encode");
    return BitsPtr(bits);
}

void write_text(const std::string& path, const char* text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Fail{"cannot write file: " + path};
    out << text;
    if (!out.flush()) throw Fail{"write failed: " + path};
}

int cmd_encode(const CommonOpts& opts, const std::string& payload_text,
               const std::string& payload_file, const std::string& out_path) {
    const LoadedConfig cfg = load_config(opts);
    const auto payload = read_payload(payload_text, payload_file);
    const BitsPtr bits = encode(payload, cfg.tx);

    bm_schedule* raw = nullptr;
    check(bm_schedule_bursts(bits.get(), cfg.tx.get(), &raw), "schedule");
    const SchedulePtr schedule(raw);
    check(bm_schedule_save_csv(schedule.get(), out_path.c_str()), "save schedule");

    const size_t total = bm_bitstream_count(bits.get());
    const size_t preamble = bm_bitstream_preamble_len(bits.get());
    std::printf("bits: %zu (preamble %zu, payload %zu)\n", total, preamble, total - preamble);
    std::printf("intervals: %zu\n", bm_schedule_count(schedule.get()));
    std::printf("duration_s: %g\n", bm_schedule_total_duration_s(schedule.get()));
    return 0;
}

int cmd_simulate(const CommonOpts& opts, const std::string& schedule_path, double duration_s,
                 const std::string& out_path) {
    const LoadedConfig cfg = load_config(opts);
    bm_schedule* raw = nullptr;
    check(bm_schedule_load_csv(schedule_path.c_str(), &raw), "load schedule");
    const SchedulePtr schedule(raw);

    // A schedule file only carries the bursts. Stretch the duration to cover
    // the rest phase of the final bit, or to an explicit override.
    const double last_end = bm_schedule_total_duration_s(schedule.get());
    const double period = bm_tx_params_bit_period_s(cfg.tx.get());
    double duration = std::ceil(last_end / period - 1e-9) * period;
    if (duration_s > 0.0) duration = duration_s;
    check(bm_schedule_set_total_duration_s(schedule.get(), duration), "duration");

    bm_trace* trace = nullptr;
    check(bm_simulate(schedule.get(), cfg.channel.get(), &trace), "simulate");
    const TracePtr owned(trace);
    check(bm_trace_save_csv(owned.get(), out_path.c_str()), "save trace");
    std::printf("samples: %zu at %g Hz (%.3f s), seed %llu\n", bm_trace_count(owned.get()),
                bm_trace_sample_rate_hz(owned.get()), duration,
                static_cast<unsigned long long>(bm_channel_model_seed(cfg.channel.get())));
    return 0;
}

int cmd_decode(const CommonOpts& opts, const std::string& trace_path, const std::string& decoder,
               const std::string& expected_text, const std::string& expected_file,
               bool show_bits) {
    const LoadedConfig cfg = load_config(opts);
    bm_trace* raw_trace = nullptr;
    check(bm_trace_load_csv(trace_path.c_str(), &raw_trace), "load trace");
    const TracePtr trace(raw_trace);

    BitsPtr sent;
    if (!expected_text.empty() || !expected_file.empty()) {
        const auto payload = read_payload(expected_text, expected_file);
        sent = encode(payload, cfg.tx);
        check(bm_decoder_config_set_expected_bit_count(cfg.decoder.get(),
                                                       bm_bitstream_count(sent.get())),
              "expected bit count");
    }

    const double period = bm_tx_params_bit_period_s(cfg.tx.get());
    bm_decode_result* raw_result = nullptr;
    if (decoder == "robust") {
        check(bm_decode_robust(trace.get(), period, cfg.decoder.get(), &raw_result), "decode");
    } else if (decoder == "matched") {
        check(bm_decode_matched(trace.get(), period, cfg.decoder.get(), &raw_result), "decode");
    } else {
        throw Fail{"unknown decoder '" + decoder + "' (use robust or matched)"};
    }
    const ResultPtr result(raw_result);

    bm_bitstream* raw_bits = nullptr;
    check(bm_decode_result_bits(result.get(), &raw_bits), "result bits");
    const BitsPtr bits(raw_bits);

    const size_t total = bm_bitstream_count(bits.get());
    const size_t preamble = bm_bitstream_preamble_len(bits.get());
    std::printf("threshold_ma: %.3f\n", bm_decode_result_threshold_ma(result.get()));
    std::printf("est_bit_period_s: %.6f\n", bm_decode_result_bit_period_s(result.get()));
    std::printf("peaks: %zu\n", bm_decode_result_peak_count(result.get()));
    std::printf("bits: %zu (preamble %zu)\n", total, preamble);
    if (show_bits) {
        const std::uint8_t* data = bm_bitstream_bits(bits.get());
        std::string text(total, '0');
        for (size_t i = 0; i < total; ++i) text[i] = static_cast<char>('0' + data[i]);
        std::printf("bitstring: %s\n", text.c_str());
    }

    std::vector<std::uint8_t> bytes((total - preamble) / 8);
    size_t written = 0;
    if (!bytes.empty()) {
        check(bm_bitstream_payload_bytes(bits.get(), bytes.data(), bytes.size(), &written),
              "payload bytes");
    }
    bytes.resize(written);
    std::printf("payload: %s\n", printable(bytes).c_str());

    for (size_t i = 0; i < bm_decode_result_warning_count(result.get()); ++i) {
        std::fprintf(stderr, "warning: %s\n", bm_decode_result_warning(result.get(), i));
    }

    if (sent) {
        double ber = 0.0;
        check(bm_bit_error_ratio(sent.get(), bits.get(), &ber), "ber");
        std::printf("ber_pct: %.2f\n", ber);
    }
    return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& payload_text,
              const std::string& payload_file, std::vector<int> periods, int seeds,
              const std::string& decoder, const std::string& profile, const std::string& out_path,
              const std::string& markdown_path) {
    const LoadedConfig cfg = load_config(opts);
    const auto payload = read_payload(payload_text, payload_file);
    if (periods.empty()) periods = {1000, 900, 800, 700, 600, 500};

    int kind = BM_DECODER_ROBUST;
    if (decoder == "matched") {
        kind = BM_DECODER_MATCHED;
    } else if (decoder != "robust") {
        throw Fail{"unknown decoder '" + decoder + "' (use robust or matched)"};
    }

    bm_report* raw = nullptr;
    check(bm_run_sweep(payload.data(), payload.size(), periods.data(), periods.size(),
                       cfg.channel.get(), seeds, kind, profile.c_str(), &raw),
          "sweep");
    const ReportPtr report(raw);

    char* text = nullptr;
    check(bm_report_csv(report.get(), &text), "report");
    if (!out_path.empty()) {
        write_text(out_path, text);
    } else {
        std::fputs(text, stdout);
    }
    bm_text_free(text);

    if (!markdown_path.empty()) {
        check(bm_report_markdown(report.get(), &text), "report markdown");
        write_text(markdown_path, text);
        bm_text_free(text);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Software modem and channel simulator for power-burst signaling"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string payload_text, payload_file, out_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_path, "JSON config with channel/decoder/tx sections");
        cmd->add_option("--seed", opts.seed, "channel seed override");
        cmd->add_option("--period-ms", opts.period_ms, "bit period override, milliseconds");
    };

    CLI::App* encode_cmd = app.add_subcommand("encode", "Encode a payload into a burst schedule");
    add_common(encode_cmd);
    encode_cmd->add_option("--payload", payload_text, "payload text");
    encode_cmd->add_option("--payload-file", payload_file, "payload file (binary)");
    encode_cmd->add_option("--out", out_path, "schedule CSV path")->required();

    std::string schedule_path;
    double duration_s = 0.0;
    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "Render a schedule into a supply-current trace");
    add_common(simulate_cmd);
    simulate_cmd->add_flag("--noiseless", opts.noiseless, "switch all channel noise off");
    simulate_cmd->add_option("--schedule", schedule_path, "schedule CSV path")->required();
    simulate_cmd->add_option("--duration-s", duration_s, "trace duration override, seconds");
    simulate_cmd->add_option("--out", out_path, "trace CSV path")->required();

    std::string trace_path, decoder = "robust", expected_text, expected_file;
    bool show_bits = false;
    CLI::App* decode_cmd = app.add_subcommand("decode", "Decode a supply-current trace");
    add_common(decode_cmd);
    decode_cmd->add_option("--trace", trace_path, "trace CSV path")->required();
    decode_cmd->add_option("--decoder", decoder, "robust|matched");
    decode_cmd->add_option("--expected", expected_text, "expected payload text (prints BER)");
    decode_cmd->add_option("--expected-file", expected_file, "expected payload file");
    decode_cmd->add_flag("--show-bits", show_bits, "print the raw bitstring");

    std::vector<int> periods;
    int seeds = 20;
    std::string profile = "default", markdown_path;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "BER sweep over bit periods and seeds");
    add_common(sweep_cmd);
    sweep_cmd->add_flag("--noiseless", opts.noiseless, "switch all channel noise off");
    sweep_cmd->add_option("--payload", payload_text, "payload text");
    sweep_cmd->add_option("--payload-file", payload_file, "payload file (binary)");
    sweep_cmd->add_option("--periods", periods, "periods in ms (default 1000..500 step 100)");
    sweep_cmd->add_option("--seeds", seeds, "seeds per period");
    sweep_cmd->add_option("--decoder", decoder, "robust|matched");
    sweep_cmd->add_option("--profile", profile, "device profile label for the report");
    sweep_cmd->add_option("--out", out_path, "report CSV path (default: stdout)");
    sweep_cmd->add_option("--markdown", markdown_path, "also write a markdown table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (encode_cmd->parsed()) return cmd_encode(opts, payload_text, payload_file, out_path);
        if (simulate_cmd->parsed()) return cmd_simulate(opts, schedule_path, duration_s, out_path);
        if (decode_cmd->parsed()) {
            return cmd_decode(opts, trace_path, decoder, expected_text, expected_file, show_bits);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(opts, payload_text, payload_file, periods, seeds, decoder, profile,
                             out_path, markdown_path);
        }
    } catch (const Fail& e) {
        std::cerr << "error: " << e.message << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
