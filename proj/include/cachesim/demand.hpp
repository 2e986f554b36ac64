#pragma once

// Demand vectors: user k requests file d[k-1] in [1, N].

#include "cachesim/combinatorics.hpp"
#include "cachesim/scenario.hpp"
#include "cachesim/subsets.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <vector>

namespace cachesim {

using Demand = std::vector<int>;

inline void validate_demand(const Scenario& s, const Demand& d) {
    if (static_cast<int64_t>(d.size()) != s.K)
        throw std::invalid_argument("demand: need one entry per user");
    for (int q : d)
        if (q < 1 || q > s.N)
            throw std::invalid_argument("demand: file index out of range");
}

// Distinct files requested by the users in `mask`.
inline int64_t distinct_in(const Demand& d, UserMask mask) {
    std::vector<int> files;
    for (int u : mask_members(mask)) files.push_back(d[u - 1]);
    std::sort(files.begin(), files.end());
    files.erase(std::unique(files.begin(), files.end()), files.end());
    return static_cast<int64_t>(files.size());
}

inline int64_t n_distinct(const Demand& d) {
    return distinct_in(d, full_mask(static_cast<int>(d.size())));
}

// N_e(d_{without i}); the quantity every sender's codeword count depends on.
inline int64_t n_distinct_excluding(const Demand& d, int user) {
    UserMask mask = full_mask(static_cast<int>(d.size())) & ~user_bit(user);
    return distinct_in(d, mask);
}

// A canonical demand realizing a composition: the most-requested file is 1.
inline Demand demand_from_composition(const Composition& comp, int64_t num_users) {
    Demand d;
    for (size_t file = 0; file < comp.size(); ++file)
        for (int64_t r = 0; r < comp[file]; ++r) d.push_back(static_cast<int>(file + 1));
    if (static_cast<int64_t>(d.size()) != num_users)
        throw std::invalid_argument("composition does not sum to the user count");
    return d;
}

// A demand maximizing the delivered load: min(N, K) distinct files, spread
// round-robin so the singleton-file count is the load-maximizing
// max(0, 2N - K) whenever K > N.
inline Demand worst_case_demand(int64_t num_files, int64_t num_users) {
    Demand d;
    d.reserve(static_cast<size_t>(num_users));
    for (int64_t k = 0; k < num_users; ++k)
        d.push_back(static_cast<int>(k % num_files + 1));
    return d;
}

// Enumerate all N^K demands (small instances only).
template <typename Fn>
inline void for_each_demand(int64_t num_files, int64_t num_users, Fn&& fn) {
    Demand d(static_cast<size_t>(num_users), 1);
    while (true) {
        fn(const_cast<const Demand&>(d));
        size_t pos = 0;
        while (pos < d.size() && d[pos] == num_files) d[pos++] = 1;
        if (pos == d.size()) break;
        d[pos]++;
    }
}

}  // namespace cachesim
