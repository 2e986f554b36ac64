#pragma once

// Binomials, demand compositions, and exact demand-counting helpers.
//
// The binomial follows the convention used by all load formulas here:
// binom(x, y) = 0 whenever x < y or x <= 0 (note binom(0, 0) = 0), and the
// standard value otherwise. Negative y also yields 0.

#include "cachesim/rational.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <vector>

namespace cachesim {

inline BigInt binom(int64_t x, int64_t y) {
    if (y < 0 || x < y || x <= 0) return 0;
    int64_t k = std::min(y, x - y);
    BigInt result = 1;
    for (int64_t i = 1; i <= k; ++i) {
        result *= (x - k + i);
        result /= i;  // exact at every step: result is binom(x-k+i, i)
    }
    return result;
}

inline BigInt factorial(int64_t n) {
    assert(n >= 0);
    BigInt result = 1;
    for (int64_t i = 2; i <= n; ++i) result *= i;
    return result;
}

inline BigInt ipow(BigInt base, int64_t exp) {
    assert(exp >= 0);
    BigInt result = 1;
    while (exp-- > 0) result *= base;
    return result;
}

// A demand type: request multiplicities per file, sorted descending and
// zero-padded to length N. Two demands have the same load statistics iff
// they share a composition.
using Composition = std::vector<int64_t>;

inline Composition composition_of(const std::vector<int>& demand, int64_t num_files) {
    Composition counts(static_cast<size_t>(num_files), 0);
    for (int q : demand) {
        assert(q >= 1 && q <= num_files);
        counts[static_cast<size_t>(q - 1)]++;
    }
    std::sort(counts.begin(), counts.end(), std::greater<int64_t>());
    return counts;
}

// All partitions of K into at most N parts, padded to length N.
inline std::vector<Composition> enumerate_compositions(int64_t num_files, int64_t num_users) {
    std::vector<Composition> out;
    Composition current;
    auto recurse = [&](auto&& self, int64_t remaining, int64_t max_part, int64_t slots) -> void {
        if (remaining == 0) {
            Composition padded = current;
            padded.resize(static_cast<size_t>(num_files), 0);
            out.push_back(padded);
            return;
        }
        if (slots == 0) return;
        for (int64_t part = std::min(max_part, remaining); part >= 1; --part) {
            current.push_back(part);
            self(self, remaining - part, part, slots - 1);
            current.pop_back();
        }
    };
    recurse(recurse, num_users, num_users, num_files);
    return out;
}

// Number of demand vectors with this composition:
//   K! / prod_i s_i!  *  N! / prod_v mult_v!
// where mult_v counts parts equal to v, zeros included.
inline BigInt demand_count(const Composition& comp, int64_t num_users) {
    BigInt users = factorial(num_users);
    int64_t total = 0;
    for (int64_t part : comp) {
        users /= factorial(part);
        total += part;
    }
    assert(total == num_users);
    BigInt files = factorial(static_cast<int64_t>(comp.size()));
    std::map<int64_t, int64_t> mult;
    for (int64_t part : comp) mult[part]++;
    for (auto& [value, count] : mult) {
        (void)value;
        files /= factorial(count);
    }
    return users * files;
}

inline int64_t num_distinct(const Composition& comp) {
    int64_t n = 0;
    for (int64_t part : comp) n += (part > 0);
    return n;
}

inline int64_t num_unique(const Composition& comp) {
    int64_t n = 0;
    for (int64_t part : comp) n += (part == 1);
    return n;
}

// Surjections from [K] onto [e].
inline BigInt surjections(int64_t num_users, int64_t e) {
    if (e < 0 || e > num_users) return 0;
    BigInt total = 0;
    for (int64_t j = 0; j <= e; ++j) {
        BigInt term = binom(e, j) * ipow(BigInt(e - j), num_users);
        if (j % 2 == 0) total += term; else total -= term;
    }
    return total;
}

// Ways to distribute m labeled users onto r labeled files, every file >= 2.
inline BigInt count_all_fibers_ge2(int64_t m, int64_t r) {
    if (r == 0) return m == 0 ? BigInt(1) : BigInt(0);
    if (m < 2 * r) return 0;
    static thread_local std::map<std::pair<int64_t, int64_t>, BigInt> memo;
    auto key = std::make_pair(m, r);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    BigInt total = 0;
    for (int64_t c = 2; c <= m - 2 * (r - 1); ++c)
        total += binom(m, c) * count_all_fibers_ge2(m - c, r - 1);
    memo[key] = total;
    return total;
}

// Joint tally of demand vectors by (distinct files e, singleton files u).
// Summed over all cells this equals N^K; every demand-average in the library
// reduces to a sum over these cells.
struct EuCell {
    int64_t e;      // files requested at least once
    int64_t u;      // files requested exactly once
    BigInt count;   // demand vectors with this profile
};

inline std::vector<EuCell> joint_eu_counts(int64_t num_files, int64_t num_users) {
    std::vector<EuCell> cells;
    int64_t max_e = std::min(num_files, num_users);
    for (int64_t e = 1; e <= max_e; ++e) {
        for (int64_t u = 0; u <= e; ++u) {
            int64_t rest = num_users - u;
            if (rest < 2 * (e - u)) continue;
            BigInt assign = factorial(num_users) / factorial(num_users - u);
            BigInt count = binom(num_files, e) * binom(e, u) * assign *
                           count_all_fibers_ge2(rest, e - u);
            if (count != 0) cells.push_back({e, u, count});
        }
    }
    return cells;
}

}  // namespace cachesim
