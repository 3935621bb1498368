#include "modem_tx.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "errors.hpp"

namespace bm {

namespace {

constexpr char kScheduleHeader[] = "start_s,end_s";

struct Run {
    bool above = false;
    double duration_s = 0.0;
};

}  // namespace

void validate(const TransmissionParams& params) {
    if (!(params.bit_period_s > 0.0)) throw std::invalid_argument("bit_period_s must be positive");
    if (!(params.duty_cycle > 0.0) || params.duty_cycle > 1.0) {
        throw std::invalid_argument("duty_cycle must be in (0,1]");
    }
    if (params.preamble_len == 0) throw std::invalid_argument("preamble must be non-empty");
}

void validate(const BurstSchedule& schedule) {
    double prev_end = -1.0;
    for (const auto& [start, end] : schedule.intervals) {
        if (!(end > start)) throw std::invalid_argument("schedule interval has non-positive width");
        if (start < prev_end) throw std::invalid_argument("schedule intervals overlap or are unordered");
        prev_end = end;
    }
    if (!schedule.intervals.empty() && schedule.total_duration_s < prev_end - 1e-12) {
        throw std::invalid_argument("total_duration_s shorter than last interval");
    }
}

BitStream encode_payload(const std::vector<std::uint8_t>& payload,
                         const TransmissionParams& params) {
    validate(params);
    if (payload.empty()) throw std::invalid_argument("empty payload");
    BitStream stream;
    stream.preamble_len = params.preamble_len;
    stream.bits.reserve(params.preamble_len + payload.size() * 8);
    stream.bits.assign(params.preamble_len, 0);
    for (std::uint8_t byte : payload) {
        for (int b = 7; b >= 0; --b) {
            stream.bits.push_back(static_cast<std::uint8_t>((byte >> b) & 1));
        }
    }
    return stream;
}

BitStream encode_payload(std::string_view payload, const TransmissionParams& params) {
    return encode_payload(
        std::vector<std::uint8_t>(payload.begin(), payload.end()), params);
}

BurstSchedule schedule_bursts(const BitStream& stream, const TransmissionParams& params) {
    validate(params);
    if (stream.bits.empty()) throw std::invalid_argument("empty bit stream");
    BurstSchedule schedule;
    const double period = params.bit_period_s;
    const double width = params.duty_cycle * params.bit_period_s;
    for (std::size_t i = 0; i < stream.bits.size(); ++i) {
        if (stream.bits[i] == 0) {
            const double start = static_cast<double>(i) * period;
            schedule.intervals.emplace_back(start, start + width);
        }
    }
    schedule.total_duration_s = static_cast<double>(stream.bits.size()) * period;
    return schedule;
}

bool transmission_allowed(const DeviceState& state, int omega_pct) {
    return state.usb_connected && state.screen_off && state.battery_pct >= omega_pct;
}

bool detect_handshake(const PowerTrace& trace, const HandshakeParams& hs) {
    validate(trace);
    if (!(hs.theta_ma > 0.0)) throw std::invalid_argument("theta_ma must be positive");
    if (!(hs.t_s > 0.0)) throw std::invalid_argument("t_s must be positive");
    if (hs.tolerance_frac < 0.0 || hs.tolerance_frac > 0.5) {
        throw std::invalid_argument("tolerance_frac must be in [0,0.5]");
    }
    if (trace.duration_s() < 3.0 * hs.t_s) {
        throw decode_error("trace too short for handshake");
    }

    const double dt = trace.dt();
    std::vector<Run> runs;
    for (double v : trace.samples) {
        const bool above = v > hs.theta_ma;
        if (runs.empty() || runs.back().above != above) runs.push_back({above, 0.0});
        runs.back().duration_s += dt;
    }

    // Debounce: runs shorter than t/10 get absorbed into the run before them,
    // which then merges with the following run of its own level.
    const double debounce = hs.t_s / 10.0;
    std::vector<Run> merged;
    for (const Run& run : runs) {
        if (!merged.empty() && (merged.back().above == run.above || run.duration_s < debounce)) {
            merged.back().duration_s += run.duration_s;
        } else {
            merged.push_back(run);
        }
    }

    const auto timed = [&](const Run& run) {
        return std::abs(run.duration_s - hs.t_s) <= hs.tolerance_frac * hs.t_s;
    };
    if (merged.size() < 4) return false;
    for (std::size_t i = 0; i + 3 < merged.size(); ++i) {
        if (!merged[i].above && timed(merged[i]) &&      //
            merged[i + 1].above && timed(merged[i + 1]) &&
            !merged[i + 2].above && timed(merged[i + 2]) &&
            merged[i + 3].above && merged[i + 3].duration_s >= hs.t_s &&
            i + 3 == merged.size() - 1) {  // "above for good": holds to window end
            return true;
        }
    }
    return false;
}

void save_schedule(const BurstSchedule& schedule, const std::string& path) {
    validate(schedule);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write schedule file: " + path);
    out << kScheduleHeader << '\n';
    char buf[64];
    for (const auto& [start, end] : schedule.intervals) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", start, end);
        out << buf;
    }
    out.flush();
    if (!out) throw io_error("write failed: " + path);
}

BurstSchedule load_schedule(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open schedule file: " + path);
    BurstSchedule schedule;
    std::string line;
    std::size_t row = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {
            first = false;
            if (line == kScheduleHeader) continue;
        }
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw parse_error("row " + std::to_string(row) + ": expected '<start>,<end>'");
        }
        double start = 0.0, end = 0.0;
        const char* s0 = line.data();
        auto r1 = std::from_chars(s0, s0 + comma, start);
        auto r2 = std::from_chars(s0 + comma + 1, s0 + line.size(), end);
        if (r1.ec != std::errc{} || r1.ptr != s0 + comma || r2.ec != std::errc{} ||
            r2.ptr != s0 + line.size()) {
            throw parse_error("row " + std::to_string(row) + ": malformed interval");
        }
        schedule.intervals.emplace_back(start, end);
    }
    if (!schedule.intervals.empty()) {
        schedule.total_duration_s = schedule.intervals.back().second;
    }
    validate(schedule);
    return schedule;
}

}  // namespace bm
