#pragma once

// System parameters for one cache instance: N files, K users, per-user
// memory M files, file size F bits, integer split parameter t = KM/N.
//
// Validity: K >= 2, 1 <= t <= K (equivalently MK >= N and M <= N), and F
// divisible by t*binom(K,t) so sub-pieces are equal-length. M = N (t = K)
// is accepted as the zero-load boundary point and flagged as such.

#include "cachesim/combinatorics.hpp"
#include "cachesim/rational.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cachesim {

// Simulation paths materialize t*binom(K,t) sub-pieces per file and use
// 32-bit user masks; formula-only paths have no such limit.
inline constexpr int64_t kMaxSimUsers = 20;

struct Scenario {
    int64_t N = 0;      // files
    int64_t K = 0;      // users
    int64_t F = 0;      // bits per file
    int64_t t = 0;      // KM/N
    Rational M;         // files of cache per user

    bool boundary() const { return t == K; }

    int64_t subfiles_per_file() const { return binom(K, t).convert_to<int64_t>(); }
    int64_t subpieces_per_file() const { return t * subfiles_per_file(); }
    int64_t subpiece_bits() const { return F / subpieces_per_file(); }

    Rational cache_bits() const { return M * F; }
};

inline Scenario make_scenario_t(int64_t N, int64_t K, int64_t t, int64_t F) {
    if (N < 1) throw std::invalid_argument("scenario: N must be >= 1");
    if (K < 2) throw std::invalid_argument("scenario: K must be >= 2");
    if (K > kMaxSimUsers) throw std::invalid_argument("scenario: K too large to simulate");
    if (t < 1 || t > K)
        throw std::invalid_argument("scenario: t = KM/N must lie in [1, K]");
    Scenario s;
    s.N = N;
    s.K = K;
    s.t = t;
    s.M = Rational(N * t, K);
    int64_t unit = s.subpieces_per_file();
    if (F <= 0 || F % unit != 0)
        throw std::invalid_argument("scenario: F must be a positive multiple of " +
                                    std::to_string(unit));
    s.F = F;
    return s;
}

inline Scenario make_scenario(int64_t N, int64_t K, const Rational& M, int64_t F) {
    if (N < 1) throw std::invalid_argument("scenario: N must be >= 1");
    if (M > N) throw std::invalid_argument("scenario: M must not exceed N");
    Rational t_exact = Rational(K) * M / N;
    if (denominator(t_exact) != 1)
        throw std::invalid_argument("scenario: KM/N must be an integer (see --envelope)");
    return make_scenario_t(N, K, numerator(t_exact).convert_to<int64_t>(), F);
}

// Smallest F giving one bit per sub-piece.
inline int64_t minimal_file_bits(int64_t K, int64_t t) {
    return t * binom(K, t).convert_to<int64_t>();
}

}  // namespace cachesim
