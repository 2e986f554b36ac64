#pragma once

// Robust variant for unannounced user inactivity. Each file is split into
//   m = t*binom(K-1,t-1) + (K-1-a)*binom(K-2,t-1)
// parts and expanded by a systematic (m, n)-erasure code to the
// n = t*binom(K,t) coded sub-pieces the baseline placement expects, so the
// baseline one-shot delivery runs unchanged while every transmission and
// cache slot grows by n/m. An active user holds t*binom(K-1,t-1) coded
// pieces of its file and recovers binom(K-2,t-1) more from each active
// sender, hence reaches m exactly when at most a users are inactive.

#include "cachesim/bounds.hpp"
#include "cachesim/delivery.hpp"
#include "cachesim/envelope.hpp"
#include "cachesim/mds.hpp"
#include "cachesim/parallel.hpp"
#include "cachesim/placement.hpp"
#include "cachesim/rational.hpp"
#include "cachesim/rng.hpp"
#include "cachesim/scenario.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cachesim {

inline void check_robust_params(int64_t K, int64_t a, double p) {
    if (a < 0 || a > K - 1)
        throw std::invalid_argument("robust: a must lie in [0, K-1]");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("robust: p must lie in [0, 1]");
}

inline BigInt robust_parts_m(int64_t K, int64_t t, int64_t a) {
    // Part counts want the textbook binom(0, 0) = 1 (K = 2, t = 1: one piece
    // per sender); the load-formula convention in combinatorics.hpp returns 0.
    BigInt per_sender = (K == 2 && t == 1) ? BigInt(1) : binom(K - 2, t - 1);
    return t * binom(K - 1, t - 1) + (K - 1 - a) * per_sender;
}

inline BigInt robust_parts_n(int64_t K, int64_t t) { return t * binom(K, t); }

// Expansion factor n/m; equals K / [t + (K-1-a)(K-t)/(K-1)].
inline Rational robust_factor(int64_t K, int64_t t, int64_t a) {
    check_corner_params(1, K, t);
    check_robust_params(K, a, 0.0);
    return Rational(robust_parts_n(K, t), robust_parts_m(K, t, a));
}

struct RobustConfig {
    Scenario base;
    int64_t a = 0;
    double p = 0.0;
    int64_t m = 0;
    int64_t n = 0;

    Rational expansion() const { return Rational(n, m); }
    int64_t part_bits() const { return base.F / m; }
};

// Both the code width n and symbol alignment of the m-way split bound F.
inline int64_t minimal_robust_file_bits(int64_t K, int64_t t, int64_t a) {
    BigInt n_big = robust_parts_n(K, t);
    if (n_big > 65535)
        throw std::invalid_argument("robust: t*binom(K,t) exceeds the widest supported code");
    int64_t n = n_big.convert_to<int64_t>();
    int64_t m = robust_parts_m(K, t, a).convert_to<int64_t>();
    int64_t symbol = n <= 255 ? 8 : 16;
    return std::lcm(n, m * symbol);
}

inline RobustConfig make_robust_config(const Scenario& base, int64_t a, double p) {
    check_robust_params(base.K, a, p);
    BigInt n_big = robust_parts_n(base.K, base.t);
    if (n_big > 65535)
        throw std::invalid_argument("robust: t*binom(K,t) exceeds the widest supported code");
    RobustConfig cfg;
    cfg.base = base;
    cfg.a = a;
    cfg.p = p;
    cfg.n = n_big.convert_to<int64_t>();
    cfg.m = robust_parts_m(base.K, base.t, a).convert_to<int64_t>();
    int64_t unit = cfg.m * make_rs_code(cfg.m, cfg.n).symbol_bits();
    if (base.F % unit != 0)
        throw std::invalid_argument("robust: F must be a multiple of " + std::to_string(unit) +
                                    " for symbol-aligned parts");
    return cfg;
}

struct RobustPlacement {
    RobustConfig config;
    Scenario coded;       // same N, K, t with F scaled by n/m
    RSCode code;
    Database source;      // original files
    SubPieceStore store;  // coded sub-pieces in baseline layout
};

// Coded block number (1..n) backing a sub-piece id within its file.
inline int64_t coded_block_index(const Scenario& coded, const SubPieceId& id) {
    return subpiece_index(coded, id) % coded.subpieces_per_file() + 1;
}

inline RobustPlacement robust_placement(const RobustConfig& cfg, uint64_t seed) {
    RobustPlacement rp;
    rp.config = cfg;
    rp.code = make_rs_code(cfg.m, cfg.n);
    rp.source = generate_database(cfg.base, seed);
    int64_t part = cfg.part_bits();
    Database coded_db;
    coded_db.files.reserve(rp.source.files.size());
    for (const BitBlock& file : rp.source.files) {
        std::vector<BitBlock> parts;
        parts.reserve(static_cast<size_t>(cfg.m));
        for (int64_t j = 0; j < cfg.m; ++j) parts.push_back(file.slice(j * part, part));
        BitBlock coded_file;
        for (const BitBlock& block : mds_encode(parts, rp.code)) coded_file.append(block);
        coded_db.files.push_back(std::move(coded_file));
    }
    rp.coded = make_scenario_t(cfg.base.N, cfg.base.K, cfg.base.t, cfg.n * part);
    rp.store = man_placement(rp.coded, coded_db);
    return rp;
}

struct RobustUserResult {
    int user = 0;
    bool active = false;
    bool decoded = false;    // reached m blocks and reconstructed
    bool bit_exact = false;  // reconstruction equals the source file
    bool one_shot = false;   // every received piece traces to one sender's codewords
    int64_t cached_blocks = 0;
    int64_t received_blocks = 0;
    BitBlock file;  // empty unless decoded
};

struct RobustDeliveryResult {
    Demand demand;
    UserMask active_set = 0;
    int64_t inactive_count = 0;
    bool feasible = false;   // inactive_count <= a
    Rational measured_load;  // bits broadcast by active senders over F
    std::vector<RobustUserResult> users;  // index user-1

    bool all_active_ok() const {
        for (const RobustUserResult& u : users)
            if (u.active && !(u.decoded && u.bit_exact && u.one_shot)) return false;
        return true;
    }
};

inline RobustDeliveryResult robust_place_and_deliver(const RobustConfig& cfg, const Demand& d,
                                                     UserMask active_set, uint64_t seed,
                                                     LeaderRule rule = LeaderRule::lowest_index) {
    const Scenario& base = cfg.base;
    int K = static_cast<int>(base.K);
    if ((active_set & ~full_mask(K)) != 0)
        throw std::invalid_argument("robust: active set must be a subset of the users");

    RobustPlacement rp = robust_placement(cfg, seed);
    TransmissionLog log = transmit_all(rp.store, d, rule);

    RobustDeliveryResult res;
    res.demand = d;
    res.active_set = active_set;
    res.inactive_count = base.K - mask_size(active_set);
    res.feasible = res.inactive_count <= cfg.a;
    int64_t active_codewords = 0;
    for (int i : mask_members(active_set))
        active_codewords += static_cast<int64_t>(log.senders[static_cast<size_t>(i - 1)].codewords.size());
    res.measured_load = Rational(active_codewords, cfg.m);  // each codeword is F/m bits

    res.users.resize(static_cast<size_t>(K));
    for (int k = 1; k <= K; ++k) {
        RobustUserResult& ur = res.users[static_cast<size_t>(k - 1)];
        ur.user = k;
        ur.active = mask_has(active_set, k);
        int want = d[static_cast<size_t>(k - 1)];
        CacheView cache(rp.store, k);

        std::vector<std::pair<int64_t, BitBlock>> blocks;
        for_each_subset(K, static_cast<int>(base.t), [&](UserMask holders) {
            if (!mask_has(holders, k)) return;
            for (int owner : mask_members(holders)) {
                SubPieceId id{want, holders, owner};
                blocks.emplace_back(coded_block_index(rp.coded, id), cache.get(id));
            }
        });
        ur.cached_blocks = static_cast<int64_t>(blocks.size());
        if (!ur.active) continue;  // inactive users neither send nor decode

        ur.one_shot = true;
        for (int i : mask_members(active_set)) {
            if (i == k) continue;
            for (RecoveredPiece& piece : recover_from_sender(log, cache, i)) {
                if (piece.provenance.codeword_refs.empty()) ur.one_shot = false;
                for (const auto& [src, idx] : piece.provenance.codeword_refs) {
                    const auto& list = log.senders[static_cast<size_t>(src - 1)].codewords;
                    if (src != i || idx < 0 || idx >= static_cast<int64_t>(list.size()))
                        ur.one_shot = false;
                }
                blocks.emplace_back(coded_block_index(rp.coded, piece.provenance.id),
                                    std::move(piece.bits));
            }
        }
        ur.received_blocks = static_cast<int64_t>(blocks.size()) - ur.cached_blocks;
        if (static_cast<int64_t>(blocks.size()) < cfg.m) continue;  // infeasible, reported

        BitBlock file;
        for (BitBlock& part : mds_decode(blocks, rp.code)) file.append(part);
        ur.decoded = true;
        ur.bit_exact = file == rp.source.files[static_cast<size_t>(want - 1)];
        ur.file = std::move(file);
    }
    return res;
}

// Upper tail of Binomial(K, p) beyond a, summed smallest term first so the
// result is trustworthy far below double precision.
inline Float50 outage_probability(int64_t K, double p, int64_t a) {
    check_robust_params(K, a, p);
    Float50 ps(p);
    Float50 qs = Float50(1) - ps;
    Float50 total = 0;
    for (int64_t i = K; i >= a + 1; --i)
        total += Float50(binom(K, i)) * pow(ps, static_cast<unsigned>(i)) *
                 pow(qs, static_cast<unsigned>(K - i));
    return total;
}

struct OutageEstimate {
    double estimate = 0.0;
    double half_width = 0.0;  // three-sigma binomial band
    int64_t hits = 0;
    int64_t trials = 0;
};

inline OutageEstimate monte_carlo_outage(int64_t K, double p, int64_t a, int64_t trials,
                                         uint64_t seed) {
    check_robust_params(K, a, p);
    if (trials < 1) throw std::invalid_argument("robust: trials must be >= 1");
    int64_t hits = parallel_map_sum(trials, int64_t{0}, [&](int64_t trial) -> int64_t {
        int64_t inactive = 0;
        for (int64_t u = 1; u <= K; ++u)
            if (uniform01(seed, static_cast<uint64_t>(trial), static_cast<uint64_t>(u)) < p)
                ++inactive;
        return inactive > a ? 1 : 0;
    });
    OutageEstimate est;
    est.hits = hits;
    est.trials = trials;
    est.estimate = static_cast<double>(hits) / static_cast<double>(trials);
    est.half_width = 3.0 * std::sqrt(est.estimate * (1.0 - est.estimate) /
                                     static_cast<double>(trials));
    return est;
}

inline OutageEstimate monte_carlo_outage(const RobustConfig& cfg, int64_t trials, uint64_t seed) {
    return monte_carlo_outage(cfg.base.K, cfg.p, cfg.a, trials, seed);
}

struct InactivityPoint {
    int64_t a = 0;
    int64_t t = 0;
    Rational M;  // (N t / K) * n/m
    Rational R;  // corner load * n/m
};

struct InactivityCurve {
    int64_t a = 0;
    CurveKind kind = CurveKind::d2d_worst;
    std::string label;
    Float50 p_out;
    std::vector<InactivityPoint> points;  // t ascending
    std::vector<CurvePoint> envelope;
};

inline InactivityCurve inactivity_curve(int64_t N, int64_t K, double p, int64_t a,
                                        CurveKind kind) {
    if (kind == CurveKind::shared_link_worst_case || kind == CurveKind::shared_link_average_case)
        throw std::invalid_argument("robust: curves cover the device-to-device schemes");
    check_robust_params(K, a, p);
    InactivityCurve curve;
    curve.a = a;
    curve.kind = kind;
    curve.label = curve_label(kind);
    curve.p_out = outage_probability(K, p, a);
    std::vector<CurvePoint> corners;
    for (int64_t t = 1; t <= K; ++t) {
        Rational f = robust_factor(K, t, a);
        InactivityPoint pt;
        pt.a = a;
        pt.t = t;
        pt.M = Rational(N * t, K) * f;
        pt.R = corner_load(kind, N, K, t) * f;
        corners.push_back({pt.M, pt.R, t, t == K});
        curve.points.push_back(std::move(pt));
    }
    // M is nondecreasing in t and collapses entirely at a = K-1 (factor K/t);
    // keep only the cheapest corner per memory point for the envelope.
    std::vector<CurvePoint> distinct;
    for (const CurvePoint& c : corners) {
        if (!distinct.empty() && distinct.back().M == c.M) {
            if (c.R < distinct.back().R) distinct.back() = c;
        } else {
            distinct.push_back(c);
        }
    }
    curve.envelope = lower_convex_envelope(distinct);
    return curve;
}

inline std::vector<InactivityCurve> tradeoff_curve_inactivity(int64_t N, int64_t K, double p,
                                                              const std::vector<int64_t>& a_values,
                                                              CurveKind kind) {
    std::vector<InactivityCurve> family;
    family.reserve(a_values.size());
    for (int64_t a : a_values) family.push_back(inactivity_curve(N, K, p, a, kind));
    return family;
}

}  // namespace cachesim
