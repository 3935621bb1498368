#include "config.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "errors.hpp"

namespace bm {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const char* section,
                std::initializer_list<std::string_view> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (std::string_view key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw parse_error("unknown key \"" + item.key() + "\" in section " + section);
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (const auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

void read_channel(const json& obj, ChannelModel& model) {
    check_keys(obj, "channel",
               {"baseline_ma", "burst_amplitude_ma", "amplitude_jitter_frac", "width_shrink_mean",
                "width_jitter_frac", "start_jitter_s", "hf_noise_ma", "os_burst_rate_hz",
                "os_burst_width_s", "os_burst_amplitude_ma", "sample_rate_hz", "seed"});
    read(obj, "baseline_ma", model.baseline_ma);
    read(obj, "burst_amplitude_ma", model.burst_amplitude_ma);
    read(obj, "amplitude_jitter_frac", model.amplitude_jitter_frac);
    read(obj, "width_shrink_mean", model.width_shrink_mean);
    read(obj, "width_jitter_frac", model.width_jitter_frac);
    read(obj, "start_jitter_s", model.start_jitter_s);
    read(obj, "hf_noise_ma", model.hf_noise_ma);
    read(obj, "os_burst_rate_hz", model.os_burst_rate_hz);
    read(obj, "os_burst_width_s", model.os_burst_width_s);
    read(obj, "os_burst_amplitude_ma", model.os_burst_amplitude_ma);
    read(obj, "sample_rate_hz", model.sample_rate_hz);
    read(obj, "seed", model.seed);
}

void read_decoder(const json& obj, DecoderConfig& cfg) {
    check_keys(obj, "decoder",
               {"preamble_len", "expected_bit_count", "min_peak_width_s", "trailing_gap_periods"});
    read(obj, "preamble_len", cfg.preamble_len);
    if (const auto it = obj.find("expected_bit_count"); it != obj.end()) {
        cfg.expected_bit_count = it->get<std::size_t>();
    }
    if (const auto it = obj.find("min_peak_width_s"); it != obj.end()) {
        cfg.min_peak_width_s = it->get<double>();
    }
    read(obj, "trailing_gap_periods", cfg.trailing_gap_periods);
}

void read_tx(const json& obj, TransmissionParams& params) {
    check_keys(obj, "tx", {"bit_period_s", "duty_cycle", "preamble"});
    read(obj, "bit_period_s", params.bit_period_s);
    read(obj, "duty_cycle", params.duty_cycle);
    if (const auto it = obj.find("preamble"); it != obj.end()) {
        const auto text = it->get<std::string>();
        if (text.empty()) throw parse_error("tx.preamble must be non-empty");
        for (char c : text) {
            if (c != '0') throw parse_error("tx.preamble must consist of peak bits (zeros) only");
        }
        params.preamble_len = text.size();
    }
}

}  // namespace

Config parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw parse_error("config root must be a JSON object");
    check_keys(root, "config", {"channel", "decoder", "tx"});

    Config config;
    try {
        if (const auto it = root.find("channel"); it != root.end()) read_channel(*it, config.channel);
        if (const auto it = root.find("decoder"); it != root.end()) read_decoder(*it, config.decoder);
        if (const auto it = root.find("tx"); it != root.end()) read_tx(*it, config.tx);
    } catch (const json::exception& e) {
        throw parse_error(std::string("config type error: ") + e.what());
    }

    validate(config.channel);
    validate(config.decoder);
    validate(config.tx);
    return config;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string config_json(const Config& config) {
    json root;
    json& channel = root["channel"];
    channel["baseline_ma"] = config.channel.baseline_ma;
    channel["burst_amplitude_ma"] = config.channel.burst_amplitude_ma;
    channel["amplitude_jitter_frac"] = config.channel.amplitude_jitter_frac;
    channel["width_shrink_mean"] = config.channel.width_shrink_mean;
    channel["width_jitter_frac"] = config.channel.width_jitter_frac;
    channel["start_jitter_s"] = config.channel.start_jitter_s;
    channel["hf_noise_ma"] = config.channel.hf_noise_ma;
    channel["os_burst_rate_hz"] = config.channel.os_burst_rate_hz;
    channel["os_burst_width_s"] = config.channel.os_burst_width_s;
    channel["os_burst_amplitude_ma"] = config.channel.os_burst_amplitude_ma;
    channel["sample_rate_hz"] = config.channel.sample_rate_hz;
    channel["seed"] = config.channel.seed;

    json& decoder = root["decoder"];
    decoder["preamble_len"] = config.decoder.preamble_len;
    if (config.decoder.expected_bit_count) {
        decoder["expected_bit_count"] = *config.decoder.expected_bit_count;
    }
    if (config.decoder.min_peak_width_s) {
        decoder["min_peak_width_s"] = *config.decoder.min_peak_width_s;
    }
    decoder["trailing_gap_periods"] = config.decoder.trailing_gap_periods;

    json& tx = root["tx"];
    tx["bit_period_s"] = config.tx.bit_period_s;
    tx["duty_cycle"] = config.tx.duty_cycle;
    tx["preamble"] = std::string(config.tx.preamble_len, '0');

    return root.dump(2) + "\n";
}

void save_config(const Config& config, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write config file: " + path);
    out << config_json(config);
    out.flush();
    if (!out) throw io_error("write failed: " + path);
}

}  // namespace bm
