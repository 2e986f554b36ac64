#pragma once

// Systematic Reed-Solomon (m, n) erasure code used by the robust scheme.
// Message block i carries the value of a degree-<m polynomial at point i;
// coded block j is its value at point j, so the first m blocks are the
// message itself and any m distinct blocks reconstruct it. Field: GF(2^8)
// while n fits in it, GF(2^16) beyond that.

#include "cachesim/bitblock.hpp"
#include "cachesim/gf.hpp"

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cachesim {

struct RSCode {
    int64_t m = 0;
    int64_t n = 0;
    const GaloisField* field = nullptr;

    int symbol_bits() const { return field->bits(); }
};

inline RSCode make_rs_code(int64_t m, int64_t n) {
    if (m < 1 || m > n) throw std::invalid_argument("rs: need 1 <= m <= n");
    if (n > 65535) throw std::invalid_argument("rs: n exceeds the largest field");
    RSCode code;
    code.m = m;
    code.n = n;
    code.field = n <= 255 ? &gf256() : &gf65536();
    return code;
}

inline uint32_t read_symbol(const BitBlock& b, size_t idx, int bits) {
    uint32_t v = 0;
    for (int j = 0; j < bits; ++j)
        if (b.get(idx * size_t(bits) + size_t(j))) v |= uint32_t(1) << j;
    return v;
}

inline void write_symbol(BitBlock& b, size_t idx, int bits, uint32_t v) {
    for (int j = 0; j < bits; ++j)
        b.set(idx * size_t(bits) + size_t(j), (v >> j) & 1u);
}

namespace detail {

inline void check_blocks(const std::vector<BitBlock>& blocks, const RSCode& code) {
    if (blocks.empty()) throw std::invalid_argument("rs: no blocks");
    size_t len = blocks.front().size_bits();
    for (const BitBlock& b : blocks)
        if (b.size_bits() != len) throw std::invalid_argument("rs: unequal blocks");
    if (len % size_t(code.symbol_bits()) != 0)
        throw std::invalid_argument("rs: block length not symbol aligned");
}

// Lagrange coefficients: value at point x as a combination of the values at
// distinct points xs. In characteristic 2 subtraction is xor.
inline std::vector<uint32_t> lagrange_row(const GaloisField& f,
                                          const std::vector<uint32_t>& xs, uint32_t x) {
    std::vector<uint32_t> row(xs.size());
    for (size_t r = 0; r < xs.size(); ++r) {
        if (xs[r] == x) {
            row.assign(xs.size(), 0);
            row[r] = 1;
            return row;
        }
    }
    for (size_t r = 0; r < xs.size(); ++r) {
        uint32_t num = 1, den = 1;
        for (size_t s = 0; s < xs.size(); ++s) {
            if (s == r) continue;
            num = f.mul(num, GaloisField::add(x, xs[s]));
            den = f.mul(den, GaloisField::add(xs[r], xs[s]));
        }
        row[r] = f.div(num, den);
    }
    return row;
}

}  // namespace detail

inline std::vector<BitBlock> mds_encode(const std::vector<BitBlock>& parts,
                                        const RSCode& code) {
    detail::check_blocks(parts, code);
    if (int64_t(parts.size()) != code.m)
        throw std::invalid_argument("rs: expected m message blocks");
    const GaloisField& f = *code.field;
    int bits = code.symbol_bits();
    size_t symbols = parts.front().size_bits() / size_t(bits);

    std::vector<uint32_t> xs(size_t(code.m));
    for (size_t i = 0; i < xs.size(); ++i) xs[i] = uint32_t(i + 1);

    std::vector<BitBlock> out;
    out.reserve(size_t(code.n));
    for (int64_t j = 1; j <= code.m; ++j) out.push_back(parts[size_t(j - 1)]);
    for (int64_t j = code.m + 1; j <= code.n; ++j) {
        std::vector<uint32_t> row = detail::lagrange_row(f, xs, uint32_t(j));
        BitBlock block(parts.front().size_bits());
        for (size_t s = 0; s < symbols; ++s) {
            uint32_t acc = 0;
            for (size_t r = 0; r < xs.size(); ++r)
                acc ^= f.mul(row[r], read_symbol(parts[r], s, bits));
            write_symbol(block, s, bits, acc);
        }
        out.push_back(std::move(block));
    }
    return out;
}

// blocks: (1-based coded index, data) pairs with distinct indices; any m of
// them reconstruct the message. Extra blocks beyond m are ignored.
inline std::vector<BitBlock> mds_decode(
    const std::vector<std::pair<int64_t, BitBlock>>& blocks, const RSCode& code) {
    if (int64_t(blocks.size()) < code.m)
        throw std::invalid_argument("rs: fewer than m blocks");
    std::vector<BitBlock> data;
    std::vector<uint32_t> xs;
    std::vector<char> used(size_t(code.n) + 1, 0);
    for (const auto& [idx, block] : blocks) {
        if (int64_t(xs.size()) == code.m) break;
        if (idx < 1 || idx > code.n) throw std::invalid_argument("rs: bad block index");
        if (used[size_t(idx)]) throw std::invalid_argument("rs: duplicate block index");
        used[size_t(idx)] = 1;
        xs.push_back(uint32_t(idx));
        data.push_back(block);
    }
    detail::check_blocks(data, code);
    const GaloisField& f = *code.field;
    int bits = code.symbol_bits();
    size_t symbols = data.front().size_bits() / size_t(bits);

    std::vector<BitBlock> message;
    message.reserve(size_t(code.m));
    for (int64_t i = 1; i <= code.m; ++i) {
        std::vector<uint32_t> row = detail::lagrange_row(f, xs, uint32_t(i));
        BitBlock block(data.front().size_bits());
        for (size_t s = 0; s < symbols; ++s) {
            uint32_t acc = 0;
            for (size_t r = 0; r < xs.size(); ++r)
                acc ^= f.mul(row[r], read_symbol(data[r], s, bits));
            write_symbol(block, s, bits, acc);
        }
        message.push_back(std::move(block));
    }
    return message;
}

}  // namespace cachesim
