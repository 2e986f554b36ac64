#pragma once

// GF(2^8) and GF(2^16) arithmetic with log/antilog tables. Both moduli have
// x as a primitive root; the constructor verifies that while filling tables.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cachesim {

class GaloisField {
public:
    GaloisField(uint32_t poly, int bits) : bits_(bits), order_((1u << bits) - 1) {
        uint32_t modulus = 1u << bits;
        exp_.assign(size_t(order_) * 2, 0);
        log_.assign(modulus, 0);
        uint32_t x = 1;
        for (uint32_t i = 0; i < order_; ++i) {
            if (x == 1 && i != 0)
                throw std::logic_error("GaloisField: generator not primitive");
            exp_[i] = x;
            exp_[i + order_] = x;
            log_[x] = i;
            x <<= 1;
            if (x & modulus) x ^= poly;
        }
        if (x != 1) throw std::logic_error("GaloisField: reduction polynomial broken");
    }

    int bits() const { return bits_; }
    uint32_t order() const { return order_; }  // multiplicative order, 2^bits - 1

    static uint32_t add(uint32_t a, uint32_t b) { return a ^ b; }

    uint32_t mul(uint32_t a, uint32_t b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[size_t(log_[a]) + log_[b]];
    }

    uint32_t inv(uint32_t a) const {
        if (a == 0) throw std::domain_error("GaloisField: inverse of zero");
        return exp_[order_ - log_[a]];
    }

    uint32_t div(uint32_t a, uint32_t b) const { return mul(a, inv(b)); }

    uint32_t pow(uint32_t a, uint64_t e) const {
        if (a == 0) return e == 0 ? 1 : 0;
        return exp_[(uint64_t(log_[a]) * (e % order_)) % order_];
    }

private:
    int bits_;
    uint32_t order_;
    std::vector<uint32_t> exp_;
    std::vector<uint32_t> log_;
};

inline const GaloisField& gf256() {
    static const GaloisField field(0x11D, 8);
    return field;
}

inline const GaloisField& gf65536() {
    static const GaloisField field(0x1100B, 16);
    return field;
}

}  // namespace cachesim
