#pragma once

#include <string>

#include "channel.hpp"
#include "modem_rx.hpp"
#include "modem_tx.hpp"

namespace bm {

// One JSON configuration file with three top-level sections: "channel",
// "decoder" and "tx". Sections and keys may be omitted (defaults apply);
// unknown sections or keys are rejected. The tx preamble is written as a
// bit string of zeros, e.g. "00000000".
struct Config {
    ChannelModel channel;
    DecoderConfig decoder;
    TransmissionParams tx;
};

Config parse_config(const std::string& json_text);
Config load_config(const std::string& path);
std::string config_json(const Config& config);
void save_config(const Config& config, const std::string& path);

}  // namespace bm
