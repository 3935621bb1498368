#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bits.hpp"
#include "channel.hpp"
#include "modem_rx.hpp"

namespace bm {

enum class DecoderKind { robust, matched };

struct BerRow {
    std::string device_profile;
    int period_ms = 0;
    double ber_pct = 0.0;
    int seeds = 0;
    std::size_t payload_bits = 0;
};

struct BerReport {
    std::vector<BerRow> rows;
    std::string payload_desc;
    std::string model_digest;
};

// Payload-bit error percentage: mismatches over the overlapping payload
// region, plus one error per missing or surplus bit, relative to the sent
// payload length. Preamble bits are excluded on both sides.
double bit_error_ratio(const BitStream& sent, const BitStream& received);

// One encode -> schedule -> simulate -> decode -> BER cell per
// (period, seed), with the model seed offset by the seed index. Each row
// reports the median BER across seeds. The decoder is told the agreed
// transmission length (preamble + payload bits). Deterministic given its
// inputs; rows come out sorted by profile, then by period descending.
BerReport run_sweep(const std::vector<std::uint8_t>& payload, const std::vector<int>& periods_ms,
                    const ChannelModel& model, int seeds, DecoderKind decoder,
                    const std::string& profile = "default");

// CSV columns: device_profile,period_ms,ber_pct,seeds,payload_bits.
std::string report_csv(const BerReport& report);

// One row per profile, one column per period.
std::string report_markdown(const BerReport& report);

// Short stable fingerprint of a channel model, for report metadata.
std::string model_digest(const ChannelModel& model);

}  // namespace bm
