#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "modem_tx.hpp"

namespace bm {

namespace {

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string format_ber(double ber_pct) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", ber_pct);
    return buf;
}

}  // namespace

double bit_error_ratio(const BitStream& sent, const BitStream& received) {
    const std::size_t sent_len = sent.payload_size();
    if (sent_len == 0) throw std::invalid_argument("empty sent stream");
    const std::size_t recv_len = received.payload_size();
    const std::size_t overlap = std::min(sent_len, recv_len);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < overlap; ++i) {
        mismatches += sent.bits[sent.preamble_len + i] != received.bits[received.preamble_len + i];
    }
    const std::size_t length_diff = sent_len > recv_len ? sent_len - recv_len : recv_len - sent_len;
    return 100.0 * static_cast<double>(mismatches + length_diff) / static_cast<double>(sent_len);
}

BerReport run_sweep(const std::vector<std::uint8_t>& payload, const std::vector<int>& periods_ms,
                    const ChannelModel& model, int seeds, DecoderKind decoder,
                    const std::string& profile) {
    if (payload.empty()) throw std::invalid_argument("empty payload");
    if (seeds < 1) throw std::invalid_argument("seeds must be at least 1");
    for (int p : periods_ms) {
        if (p <= 0) throw std::invalid_argument("periods must be positive");
    }
    validate(model);

    BerReport report;
    report.payload_desc = std::to_string(payload.size()) + " bytes";
    report.model_digest = model_digest(model);

    for (int period_ms : periods_ms) {
        TransmissionParams params;
        params.bit_period_s = static_cast<double>(period_ms) / 1000.0;
        const BitStream sent = encode_payload(payload, params);
        const BurstSchedule schedule = schedule_bursts(sent, params);

        DecoderConfig cfg;
        cfg.preamble_len = params.preamble_len;
        cfg.expected_bit_count = sent.size();

        std::vector<double> bers;
        bers.reserve(static_cast<std::size_t>(seeds));
        for (int s = 0; s < seeds; ++s) {
            ChannelModel m = model;
            m.seed = model.seed + static_cast<std::uint64_t>(s);
            const PowerTrace trace = simulate(schedule, m);
            const DecodeResult decoded =
                decoder == DecoderKind::robust
                    ? robust_decode(trace, params.bit_period_s, cfg)
                    : matched_filter_decode(trace, params.bit_period_s, cfg);
            bers.push_back(bit_error_ratio(sent, decoded.bits));
        }

        BerRow row;
        row.device_profile = profile;
        row.period_ms = period_ms;
        row.ber_pct = median(std::move(bers));
        row.seeds = seeds;
        row.payload_bits = sent.payload_size();
        report.rows.push_back(std::move(row));
    }

    std::sort(report.rows.begin(), report.rows.end(), [](const BerRow& a, const BerRow& b) {
        if (a.device_profile != b.device_profile) return a.device_profile < b.device_profile;
        return a.period_ms > b.period_ms;
    });
    return report;
}

std::string report_csv(const BerReport& report) {
    std::ostringstream out;
    out << "device_profile,period_ms,ber_pct,seeds,payload_bits\n";
    for (const BerRow& row : report.rows) {
        out << row.device_profile << ',' << row.period_ms << ',' << format_ber(row.ber_pct) << ','
            << row.seeds << ',' << row.payload_bits << '\n';
    }
    return out.str();
}

std::string report_markdown(const BerReport& report) {
    std::set<int, std::greater<int>> periods;
    std::vector<std::string> profiles;
    std::map<std::string, std::map<int, double>> cells;
    for (const BerRow& row : report.rows) {
        periods.insert(row.period_ms);
        if (cells.find(row.device_profile) == cells.end()) profiles.push_back(row.device_profile);
        cells[row.device_profile][row.period_ms] = row.ber_pct;
    }

    std::ostringstream out;
    out << "BER (%) by device profile and bit period. Payload: " << report.payload_desc
        << "; channel model " << report.model_digest << ".\n\n";
    out << "| Device profile |";
    for (int p : periods) out << ' ' << p << " ms |";
    out << "\n|---|";
    for (std::size_t i = 0; i < periods.size(); ++i) out << "---|";
    out << '\n';
    for (const std::string& profile : profiles) {
        out << "| " << profile << " |";
        for (int p : periods) {
            const auto& row = cells[profile];
            const auto it = row.find(p);
            out << ' ' << (it == row.end() ? std::string("-") : format_ber(it->second)) << " |";
        }
        out << '\n';
    }
    return out.str();
}

std::string model_digest(const ChannelModel& model) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%.9g|%.9g|%.9g|%.9g|%.9g|%.9g|%.9g|%.9g|%.9g|%.9g|%.9g|%llu",
                  model.baseline_ma, model.burst_amplitude_ma, model.amplitude_jitter_frac,
                  model.width_shrink_mean, model.width_jitter_frac, model.start_jitter_s,
                  model.hf_noise_ma, model.os_burst_rate_hz, model.os_burst_width_s,
                  model.os_burst_amplitude_ma, model.sample_rate_hz,
                  static_cast<unsigned long long>(model.seed));
    // FNV-1a over the canonical field string.
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const char* p = buf; *p; ++p) {
        hash ^= static_cast<unsigned char>(*p);
        hash *= 0x100000001b3ull;
    }
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

}  // namespace bm
