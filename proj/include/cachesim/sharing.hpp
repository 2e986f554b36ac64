#pragma once

// Memory sharing for memories off the corner grid. When t_bar = KM/N is not
// an integer, every file is split into a prefix placed at t_lo = floor(t_bar)
// and a suffix placed at t_hi = t_lo + 1, with prefix fraction
// alpha = t_hi - t_bar so per-user cache cost lands on M exactly:
//   (N/K) (alpha t_lo + (1 - alpha) t_hi) = M.
// Delivery runs independently per level and the broadcast bits add, so the
// combined load is alpha R_lo + (1 - alpha) R_hi in units of F.

#include "cachesim/delivery.hpp"
#include "cachesim/placement.hpp"
#include "cachesim/rational.hpp"
#include "cachesim/rng.hpp"
#include "cachesim/scenario.hpp"

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cachesim {

struct SharedScenario {
    int64_t N = 0;
    int64_t K = 0;
    Rational M;
    int64_t F = 0;
    Rational alpha;  // prefix fraction, in (0, 1)
    Scenario lo;     // F field carries the prefix bits
    Scenario hi;     // F field carries the suffix bits
};

inline bool needs_sharing(int64_t N, int64_t K, const Rational& M) {
    return denominator(Rational(K) * M / N) != 1;
}

namespace detail {
inline void check_sharing_range(int64_t N, int64_t K, const Rational& M) {
    Rational t_bar = Rational(K) * M / N;
    if (denominator(t_bar) == 1)
        throw std::invalid_argument("sharing: KM/N is an integer; use the single-level placement");
    if (t_bar < 1)
        throw std::invalid_argument("sharing: KM/N must be >= 1 (cache too small for any corner)");
    if (t_bar > K) throw std::invalid_argument("sharing: M must not exceed N");
}
}  // namespace detail

// Smallest F for which both level sizes alpha*F and (1-alpha)*F are positive
// multiples of their t*binom(K,t) sub-piece units.
inline int64_t minimal_shared_file_bits(int64_t N, int64_t K, const Rational& M) {
    detail::check_sharing_range(N, K, M);
    Rational t_bar = Rational(K) * M / N;
    int64_t t_lo = (numerator(t_bar) / denominator(t_bar)).convert_to<int64_t>();
    Rational alpha = Rational(t_lo + 1) - t_bar;
    BigInt p = numerator(alpha);
    BigInt q = denominator(alpha);
    BigInt L_lo = t_lo * binom(K, t_lo);
    BigInt L_hi = (t_lo + 1) * binom(K, t_lo + 1);
    // F = k_lo L_lo + k_hi L_hi with alpha F = k_lo L_lo, i.e.
    // k_lo L_lo (q - p) = k_hi L_hi p; divide by the gcd for the minimum.
    BigInt g = gcd(L_lo * (q - p), L_hi * p);
    BigInt F = L_lo * L_hi * q / g;
    if (F > BigInt(int64_t{1} << 62))
        throw std::invalid_argument("sharing: minimal file size overflows");
    return F.convert_to<int64_t>();
}

inline SharedScenario make_shared_scenario(int64_t N, int64_t K, const Rational& M, int64_t F) {
    detail::check_sharing_range(N, K, M);
    SharedScenario ss;
    ss.N = N;
    ss.K = K;
    ss.M = M;
    Rational t_bar = Rational(K) * M / N;
    int64_t t_lo = (numerator(t_bar) / denominator(t_bar)).convert_to<int64_t>();
    ss.alpha = Rational(t_lo + 1) - t_bar;
    Rational lo_bits = ss.alpha * F;
    if (F <= 0 || denominator(lo_bits) != 1)
        throw std::invalid_argument("sharing: F must be a multiple of " +
                                    std::to_string(minimal_shared_file_bits(N, K, M)));
    int64_t F_lo = numerator(lo_bits).convert_to<int64_t>();
    int64_t F_hi = F - F_lo;
    if (F_lo % minimal_file_bits(K, t_lo) != 0 || F_hi % minimal_file_bits(K, t_lo + 1) != 0)
        throw std::invalid_argument("sharing: F must be a multiple of " +
                                    std::to_string(minimal_shared_file_bits(N, K, M)));
    ss.F = F;
    ss.lo = make_scenario_t(N, K, t_lo, F_lo);
    ss.hi = make_scenario_t(N, K, t_lo + 1, F_hi);
    return ss;
}

struct SharedPlacement {
    SharedScenario config;
    Database source;    // full files
    SubPieceStore lo;   // prefixes
    SubPieceStore hi;   // suffixes
};

// The source database uses the same (seed, file) keying as the single-level
// path, so the same seed yields the same file bits either way.
inline SharedPlacement shared_placement(const SharedScenario& ss, uint64_t seed) {
    SharedPlacement sp;
    sp.config = ss;
    Database db_lo, db_hi;
    for (int64_t q = 1; q <= ss.N; ++q) {
        BitBlock file = random_bits(seed, static_cast<uint64_t>(q), static_cast<size_t>(ss.F));
        db_lo.files.push_back(file.slice(0, ss.lo.F));
        db_hi.files.push_back(file.slice(ss.lo.F, ss.hi.F));
        sp.source.files.push_back(std::move(file));
    }
    sp.lo = man_placement(ss.lo, db_lo);
    sp.hi = man_placement(ss.hi, db_hi);
    return sp;
}

struct SharedUserResult {
    int user = 0;
    bool bit_exact = false;  // prefix + suffix reproduce the source file
    bool one_shot = false;   // both level decodes pass the provenance audit
};

struct SharedDeliveryResult {
    TransmissionLog log_lo;
    TransmissionLog log_hi;
    Rational measured_load;  // combined broadcast bits over F
    std::vector<SharedUserResult> users;        // index user-1
    std::vector<int64_t> codewords_per_sender;  // both levels, index sender-1

    bool all_ok() const {
        for (const SharedUserResult& u : users)
            if (!(u.bit_exact && u.one_shot)) return false;
        return true;
    }
};

inline SharedDeliveryResult shared_deliver(const SharedPlacement& sp, const Demand& d,
                                           LeaderRule rule = LeaderRule::lowest_index) {
    const SharedScenario& ss = sp.config;
    SharedDeliveryResult res;
    res.log_lo = transmit_all(sp.lo, d, rule);
    res.log_hi = transmit_all(sp.hi, d, rule);
    res.measured_load = (res.log_lo.measured_load() * ss.lo.F +
                         res.log_hi.measured_load() * ss.hi.F) / ss.F;
    res.codewords_per_sender.resize(static_cast<size_t>(ss.K));
    for (int64_t i = 0; i < ss.K; ++i)
        res.codewords_per_sender[static_cast<size_t>(i)] =
            static_cast<int64_t>(res.log_lo.senders[static_cast<size_t>(i)].codewords.size()) +
            static_cast<int64_t>(res.log_hi.senders[static_cast<size_t>(i)].codewords.size());
    for (int k = 1; k <= ss.K; ++k) {
        DecodeResult lo = decode_all(res.log_lo, CacheView(sp.lo, k));
        DecodeResult hi = decode_all(res.log_hi, CacheView(sp.hi, k));
        BitBlock file = lo.file;
        file.append(hi.file);
        SharedUserResult ur;
        ur.user = k;
        ur.bit_exact = file == sp.source.files[static_cast<size_t>(d[static_cast<size_t>(k - 1)] - 1)];
        ur.one_shot = one_shot_audit(res.log_lo, lo) && one_shot_audit(res.log_hi, hi);
        res.users.push_back(ur);
    }
    return res;
}

}  // namespace cachesim
