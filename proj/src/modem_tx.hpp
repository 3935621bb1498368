#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bits.hpp"
#include "signal.hpp"

namespace bm {

// Parameters the sender and receiver agree on. Polarity is unipolar RZ
// on-off: a zero bit is a burst (pulse), a one bit is silence. The preamble
// consists of peak bits (zeros) only, so only its length matters.
struct TransmissionParams {
    double bit_period_s = 0.5;
    double duty_cycle = 0.5;  // burst fraction of the bit period
    std::size_t preamble_len = 8;
};

void validate(const TransmissionParams& params);

// Timed high-consumption intervals the transmitter would generate.
struct BurstSchedule {
    std::vector<std::pair<double, double>> intervals;  // (start_s, end_s)
    double total_duration_s = 0.0;
};

void validate(const BurstSchedule& schedule);

struct DeviceState {
    bool usb_connected = false;
    bool screen_off = false;
    int battery_pct = 0;
};

// Supply-side wake-up pattern: below theta for t, above for t, below for t,
// then above through the end of the observed window.
struct HandshakeParams {
    double theta_ma = 500.0;
    double t_s = 2.0;
    double tolerance_frac = 0.2;  // allowed relative deviation of the timed segments
};

// Preamble zeros followed by each payload byte expanded MSB-first.
BitStream encode_payload(const std::vector<std::uint8_t>& payload,
                         const TransmissionParams& params);
BitStream encode_payload(std::string_view payload, const TransmissionParams& params);

// Bit i owns [i*T, (i+1)*T); zero bits emit a burst over the first
// duty_cycle*T of their slot, one bits emit nothing.
BurstSchedule schedule_bursts(const BitStream& stream, const TransmissionParams& params);

bool transmission_allowed(const DeviceState& state, int omega_pct);

// True iff the trace contains maximal runs below/above/below theta, each
// lasting t_s within tolerance, followed by an above run of at least t_s
// that persists to the end of the trace. Runs shorter than t_s/10 are
// treated as noise and absorbed into their neighbours.
bool detect_handshake(const PowerTrace& supply_current, const HandshakeParams& hs);

// Schedule CSV: header "start_s,end_s", one interval per row. Loading sets
// total_duration_s to the last interval end; callers that know the real
// transmission length should extend it.
void save_schedule(const BurstSchedule& schedule, const std::string& path);
BurstSchedule load_schedule(const std::string& path);

}  // namespace bm
