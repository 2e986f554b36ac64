#pragma once

// Binary dump of a transmission log. Per codeword:
//   [sender: u16 LE] [t: u16 LE] [target bitmap: K bits LE, byte-padded]
//   [payload: sub-piece bits, byte-padded]
// concatenated in sender order, then canonical (colex) target order. All
// record sizes follow from (K, t, F), so no extra framing is needed.

#include "cachesim/delivery.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cachesim {

inline void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xff));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

inline std::vector<uint8_t> serialize_log(const TransmissionLog& log) {
    const Scenario& s = log.scenario;
    size_t map_bytes = static_cast<size_t>((s.K + 7) / 8);
    std::vector<uint8_t> out;
    for (const auto& sl : log.senders) {
        for (const auto& cw : sl.codewords) {
            put_u16(out, static_cast<uint16_t>(cw.sender));
            put_u16(out, static_cast<uint16_t>(s.t));
            for (size_t b = 0; b < map_bytes; ++b)
                out.push_back(static_cast<uint8_t>((cw.targets >> (8 * b)) & 0xff));
            const auto& payload = cw.payload.bytes();
            out.insert(out.end(), payload.begin(), payload.end());
        }
    }
    return out;
}

struct WireCodeword {
    int sender = 0;
    int64_t t = 0;
    UserMask targets = 0;
    BitBlock payload;
};

inline std::vector<WireCodeword> parse_log(const std::vector<uint8_t>& bytes,
                                           int64_t num_users, int64_t payload_bits) {
    size_t map_bytes = static_cast<size_t>((num_users + 7) / 8);
    size_t payload_bytes = static_cast<size_t>((payload_bits + 7) / 8);
    size_t record = 4 + map_bytes + payload_bytes;
    if (record == 0 || bytes.size() % record != 0)
        throw std::invalid_argument("wire: truncated log");
    std::vector<WireCodeword> out;
    for (size_t pos = 0; pos < bytes.size(); pos += record) {
        WireCodeword cw;
        cw.sender = bytes[pos] | (bytes[pos + 1] << 8);
        cw.t = bytes[pos + 2] | (bytes[pos + 3] << 8);
        for (size_t b = 0; b < map_bytes; ++b)
            cw.targets |= static_cast<UserMask>(bytes[pos + 4 + b]) << (8 * b);
        cw.payload = BitBlock(static_cast<size_t>(payload_bits));
        for (int64_t i = 0; i < payload_bits; ++i) {
            uint8_t byte = bytes[pos + 4 + map_bytes + static_cast<size_t>(i / 8)];
            cw.payload.set(static_cast<size_t>(i), (byte >> (i % 8)) & 1);
        }
        out.push_back(std::move(cw));
    }
    return out;
}

}  // namespace cachesim
