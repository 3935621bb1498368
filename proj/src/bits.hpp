#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bm {

// Ordered bits with framing metadata: the first preamble_len bits are
// synchronization bits, the rest is payload.
struct BitStream {
    std::vector<std::uint8_t> bits;  // values 0 or 1
    std::size_t preamble_len = 0;

    std::size_t size() const { return bits.size(); }
    std::size_t payload_size() const {
        return bits.size() >= preamble_len ? bits.size() - preamble_len : 0;
    }
};

// MSB-first packing of the payload portion; a trailing partial byte is dropped.
inline std::vector<std::uint8_t> payload_bytes(const BitStream& stream) {
    std::vector<std::uint8_t> out;
    const std::size_t n = stream.payload_size() / 8;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint8_t byte = 0;
        for (std::size_t b = 0; b < 8; ++b) {
            byte = static_cast<std::uint8_t>((byte << 1) | (stream.bits[stream.preamble_len + 8 * i + b] & 1));
        }
        out.push_back(byte);
    }
    return out;
}

}  // namespace bm
