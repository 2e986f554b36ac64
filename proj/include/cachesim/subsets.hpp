#pragma once

// User subsets as bitmasks (user k occupies bit k-1). Fixed-size subsets are
// ordered colexicographically, which for masks is plain numeric order; that
// ordering is the canonical one for sub-file indexing and wire output.

#include "cachesim/combinatorics.hpp"

#include <cassert>
#include <cstdint>
#include <vector>

namespace cachesim {

using UserMask = uint32_t;

inline UserMask user_bit(int user) {
    assert(user >= 1 && user <= 32);
    return UserMask(1) << (user - 1);
}

inline bool mask_has(UserMask mask, int user) { return (mask & user_bit(user)) != 0; }

inline int mask_size(UserMask mask) { return __builtin_popcount(mask); }

inline UserMask full_mask(int num_users) {
    return num_users == 32 ? ~UserMask(0) : (UserMask(1) << num_users) - 1;
}

inline std::vector<int> mask_members(UserMask mask) {
    std::vector<int> out;
    for (UserMask m = mask; m != 0; m &= m - 1)
        out.push_back(__builtin_ctz(m) + 1);
    return out;
}

inline UserMask mask_of(const std::vector<int>& users) {
    UserMask mask = 0;
    for (int u : users) mask |= user_bit(u);
    return mask;
}

// Position of `user` in the ascending member list of `mask`.
inline int mask_index_of(UserMask mask, int user) {
    assert(mask_has(mask, user));
    return __builtin_popcount(mask & (user_bit(user) - 1));
}

// Colex rank of a fixed-size subset among all subsets of the same size:
// for members a_1 < ... < a_t (0-based values), rank = sum_i binom(a_i, i).
inline int64_t colex_rank(UserMask mask) {
    int64_t rank = 0;
    int pos = 1;
    for (UserMask m = mask; m != 0; m &= m - 1, ++pos) {
        int elem = __builtin_ctz(m);
        rank += binom(elem, pos).convert_to<int64_t>();
    }
    return rank;
}

// Next same-size subset in colex (numeric) order; Gosper's hack.
inline UserMask next_same_size(UserMask mask) {
    assert(mask != 0);
    UserMask c = mask & -mask;
    UserMask r = mask + c;
    return r | (((mask ^ r) >> 2) / c);
}

template <typename Fn>
inline void for_each_subset(int num_users, int size, Fn&& fn) {
    assert(size >= 0 && size <= num_users && num_users <= 31);
    if (size == 0) { fn(UserMask(0)); return; }
    UserMask mask = (UserMask(1) << size) - 1;
    UserMask limit = UserMask(1) << num_users;
    while (mask < limit) {
        fn(mask);
        mask = next_same_size(mask);
    }
}

// Fixed-size subsets of an arbitrary ground mask, ascending colex
// (equivalently: ascending numeric mask order).
template <typename Fn>
inline void for_each_subset_of(UserMask ground, int size, Fn&& fn) {
    std::vector<int> members = mask_members(ground);
    int n = static_cast<int>(members.size());
    if (size > n || size < 0) return;
    if (size == 0) { fn(UserMask(0)); return; }
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    while (true) {
        UserMask mask = 0;
        for (int i : idx) mask |= user_bit(members[i]);
        fn(mask);
        int i = 0;
        while (i < size && idx[i] + 1 == (i + 1 < size ? idx[i + 1] : n)) ++i;
        if (i == size) break;
        ++idx[i];
        for (int j = 0; j < i; ++j) idx[j] = j;
    }
}

}  // namespace cachesim
