#pragma once

// Packed bit vectors. Sub-pieces can be a single bit wide, so nothing here
// assumes byte alignment; bytes are filled LSB-first.

#include <cassert>
#include <cstdint>
#include <vector>

namespace cachesim {

class BitBlock {
public:
    BitBlock() = default;
    explicit BitBlock(size_t nbits) : bytes_((nbits + 7) / 8, 0), nbits_(nbits) {}

    size_t size_bits() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }
    const std::vector<uint8_t>& bytes() const { return bytes_; }

    bool get(size_t i) const {
        assert(i < nbits_);
        return (bytes_[i >> 3] >> (i & 7)) & 1;
    }

    void set(size_t i, bool v) {
        assert(i < nbits_);
        uint8_t mask = static_cast<uint8_t>(1u << (i & 7));
        if (v) bytes_[i >> 3] |= mask; else bytes_[i >> 3] &= static_cast<uint8_t>(~mask);
    }

    void xor_in(const BitBlock& other) {
        assert(nbits_ == other.nbits_);
        for (size_t i = 0; i < bytes_.size(); ++i) bytes_[i] ^= other.bytes_[i];
    }

    bool is_zero() const {
        for (uint8_t b : bytes_) if (b != 0) return false;
        return true;
    }

    BitBlock slice(size_t start, size_t len) const {
        assert(start + len <= nbits_);
        BitBlock out(len);
        for (size_t i = 0; i < len; ++i) out.set(i, get(start + i));
        return out;
    }

    void append(const BitBlock& other) {
        size_t base = nbits_;
        resize(nbits_ + other.nbits_);
        for (size_t i = 0; i < other.nbits_; ++i) set(base + i, other.get(i));
    }

    void resize(size_t nbits) {
        nbits_ = nbits;
        bytes_.resize((nbits + 7) / 8, 0);
        size_t tail = nbits & 7;
        if (tail != 0 && !bytes_.empty())
            bytes_.back() &= static_cast<uint8_t>((1u << tail) - 1);
    }

    friend bool operator==(const BitBlock& a, const BitBlock& b) {
        return a.nbits_ == b.nbits_ && a.bytes_ == b.bytes_;
    }

private:
    std::vector<uint8_t> bytes_;
    size_t nbits_ = 0;
};

}  // namespace cachesim
