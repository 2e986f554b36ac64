#include <catch2/catch_amalgamated.hpp>

#include "cachesim/inactivity.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>
#include <vector>

using namespace cachesim;

namespace {

double rel_err(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

// Exact tail of Binomial(K, 1/10) beyond a, as a rational.
Rational tenth_tail(int64_t K, int64_t a) {
    BigInt num = 0;
    for (int64_t i = a + 1; i <= K; ++i) num += binom(K, i) * ipow(BigInt(9), K - i);
    return Rational(num, ipow(BigInt(10), K));
}

double rel_err50(const Float50& got, const Rational& want) {
    Float50 w = Float50(numerator(want)) / Float50(denominator(want));
    return ((got - w) / w).convert_to<double>();
}

}  // namespace

TEST_CASE("expansion factor algebra") {
    for (int64_t K = 2; K <= 12; ++K) {
        for (int64_t t = 1; t <= K; ++t) {
            for (int64_t a = 0; a <= K - 1; ++a) {
                Rational f = robust_factor(K, t, a);
                REQUIRE(f == Rational(K * (K - 1), t * (K - 1) + (K - 1 - a) * (K - t)));
                REQUIRE(f >= 1);
                REQUIRE(robust_parts_m(K, t, a) <= robust_parts_n(K, t));
            }
            REQUIRE(robust_factor(K, t, 0) == 1);
            REQUIRE(robust_factor(K, t, K - 1) == Rational(K, t));
        }
    }
    REQUIRE_THROWS_AS(robust_factor(4, 2, -1), std::invalid_argument);
    REQUIRE_THROWS_AS(robust_factor(4, 2, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(check_robust_params(4, 1, -0.01), std::invalid_argument);
    REQUIRE_THROWS_AS(check_robust_params(4, 1, 1.01), std::invalid_argument);
}

TEST_CASE("frozen expansion factors") {
    REQUIRE(robust_factor(100, 2, 32) == Rational(2475, 1691));
    // plotted abscissa carries last-digit noise; the exact value is the freeze
    REQUIRE(rel_err(to_double(robust_factor(100, 2, 32)), 1.46363098758136) < 1e-12);
    REQUIRE(robust_factor(100, 4, 32) == Rational(825, 569));
    REQUIRE(robust_factor(100, 5, 24) == Rational(165, 127));
    Rational M32 = Rational(50 * 4, 100) * robust_factor(100, 4, 32);
    REQUIRE(M32 == Rational(1650, 569));
    REQUIRE(rel_err(to_double(M32), 2.89982425307554) < 1e-12);
}

TEST_CASE("config validation") {
    Scenario base = make_scenario_t(2, 4, 2, 240);
    RobustConfig cfg = make_robust_config(base, 1, 0.1);
    REQUIRE(cfg.m == 10);
    REQUIRE(cfg.n == 12);
    REQUIRE(cfg.expansion() == Rational(6, 5));
    REQUIRE(cfg.part_bits() == 24);

    REQUIRE_THROWS_AS(make_robust_config(base, -1, 0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(make_robust_config(base, 4, 0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(make_robust_config(base, 1, -0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(make_robust_config(base, 1, 1.5), std::invalid_argument);
    // 120 bits split 12 ways is fine for the baseline but not 10 ways in bytes
    REQUIRE_THROWS_AS(make_robust_config(make_scenario_t(2, 4, 2, 120), 1, 0.1),
                      std::invalid_argument);

    REQUIRE(minimal_robust_file_bits(4, 2, 1) == 240);
    REQUIRE(minimal_robust_file_bits(4, 2, 0) == 96);
    REQUIRE(minimal_robust_file_bits(4, 2, 3) == 48);
    REQUIRE(minimal_robust_file_bits(9, 4, 8) == 32256);  // 16-bit symbols once n > 255

    // t*binom(K,t) beyond the widest supported code
    REQUIRE_THROWS_AS(minimal_robust_file_bits(20, 10, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(make_robust_config(make_scenario_t(2, 20, 10, 1847560), 0, 0.1),
                      std::invalid_argument);
}

TEST_CASE("placement structure and the a = 0 identity") {
    SECTION("systematic prefix matches the source parts") {
        Scenario base = make_scenario_t(2, 4, 2, 240);
        RobustConfig cfg = make_robust_config(base, 1, 0.1);
        RobustPlacement rp = robust_placement(cfg, 7);
        REQUIRE(rp.coded.F == 288);
        REQUIRE(rp.coded.subpiece_bits() == cfg.part_bits());
        REQUIRE(static_cast<int64_t>(rp.store.pieces.size()) == base.N * cfg.n);
        for (int64_t q = 1; q <= base.N; ++q) {
            const BitBlock& file = rp.source.files[static_cast<size_t>(q - 1)];
            for (int64_t j = 0; j < cfg.m; ++j)
                REQUIRE(rp.store.pieces[static_cast<size_t>((q - 1) * cfg.n + j)] ==
                        file.slice(j * 24, 24));
        }
        // canonical (holders colex, owner ascending) order numbers the blocks 1..n
        int64_t expect = 1;
        for_each_subset(4, 2, [&](UserMask holders) {
            for (int owner : mask_members(holders)) {
                REQUIRE(coded_block_index(rp.coded, SubPieceId{1, holders, owner}) == expect);
                ++expect;
            }
        });
        REQUIRE(expect == cfg.n + 1);
    }

    SECTION("a = 0 reproduces the baseline bits") {
        Scenario base = make_scenario_t(2, 4, 2, 96);
        RobustConfig cfg = make_robust_config(base, 0, 0.25);
        REQUIRE(cfg.m == cfg.n);
        RobustPlacement rp = robust_placement(cfg, 11);
        Database db = generate_database(base, 11);
        SubPieceStore baseline = man_placement(base, db);
        REQUIRE(rp.store.pieces == baseline.pieces);

        Demand d = {1, 2, 1, 1};
        RobustDeliveryResult res = robust_place_and_deliver(cfg, d, full_mask(4), 11);
        TransmissionLog log = transmit_all(baseline, d);
        REQUIRE(res.measured_load == log.measured_load());
        REQUIRE(res.measured_load == Rational(11, 12));
        REQUIRE(res.all_active_ok());
        for (const RobustUserResult& ur : res.users)
            REQUIRE(ur.file == db.files[static_cast<size_t>(d[static_cast<size_t>(ur.user - 1)] - 1)]);
    }
}

TEST_CASE("end-to-end with one inactive user") {
    Scenario base = make_scenario_t(2, 4, 2, 240);
    RobustConfig cfg = make_robust_config(base, 1, 0.1);
    Demand d = {1, 2, 1, 1};

    SECTION("user 3 inactive, the rest decode with zero slack") {
        UserMask active = full_mask(4) & ~user_bit(3);
        RobustDeliveryResult res = robust_place_and_deliver(cfg, d, active, 42);
        REQUIRE(res.inactive_count == 1);
        REQUIRE(res.feasible);
        for (int k : {1, 2, 4}) {
            const RobustUserResult& ur = res.users[static_cast<size_t>(k - 1)];
            REQUIRE(ur.active);
            REQUIRE(ur.decoded);
            REQUIRE(ur.bit_exact);
            REQUIRE(ur.one_shot);
            REQUIRE(ur.cached_blocks == 6);
            REQUIRE(ur.received_blocks == 4);  // cached + received == m exactly
        }
        REQUIRE_FALSE(res.users[2].active);
        REQUIRE_FALSE(res.users[2].decoded);
    }

    SECTION("all active carries the full expansion") {
        RobustDeliveryResult res = robust_place_and_deliver(cfg, d, full_mask(4), 42);
        REQUIRE(res.feasible);
        REQUIRE(res.all_active_ok());
        REQUIRE(res.measured_load == Rational(11, 10));  // (11/12) * (12/10)
        for (const RobustUserResult& ur : res.users) REQUIRE(ur.received_blocks == 6);
    }

    SECTION("two inactive exceeds a = 1") {
        UserMask active = user_bit(1) | user_bit(2);
        RobustDeliveryResult res = robust_place_and_deliver(cfg, d, active, 42);
        REQUIRE(res.inactive_count == 2);
        REQUIRE_FALSE(res.feasible);
        for (int k : {1, 2}) {
            const RobustUserResult& ur = res.users[static_cast<size_t>(k - 1)];
            REQUIRE(ur.active);
            REQUIRE_FALSE(ur.decoded);
            REQUIRE(ur.cached_blocks == 6);
            REQUIRE(ur.received_blocks == 2);
        }
    }

    REQUIRE_THROWS_AS(robust_place_and_deliver(cfg, d, full_mask(4) | user_bit(5), 42),
                      std::invalid_argument);
}

TEST_CASE("decode succeeds exactly when tolerated") {
    auto sweep = [](int64_t N, int64_t K, const Demand& d, const std::vector<int64_t>& ts,
                    const std::vector<int64_t>& as) {
        for (int64_t t : ts) {
            // dropping one more tolerated sender removes one sender's pieces
            BigInt per_sender = robust_parts_m(K, t, 0) - robust_parts_m(K, t, 1);
            for (int64_t a : as) {
                Scenario base = make_scenario_t(N, K, t, minimal_robust_file_bits(K, t, a));
                RobustConfig cfg = make_robust_config(base, a, 0.2);
                for (UserMask act = 0; act < (UserMask{1} << K); ++act) {
                    RobustDeliveryResult res = robust_place_and_deliver(cfg, d, act, 5);
                    int64_t inactive = K - mask_size(act);
                    REQUIRE(res.inactive_count == inactive);
                    REQUIRE(res.feasible == (inactive <= a));
                    for (int k = 1; k <= K; ++k) {
                        const RobustUserResult& ur = res.users[static_cast<size_t>(k - 1)];
                        REQUIRE(ur.active == mask_has(act, k));
                        if (!ur.active) {
                            REQUIRE_FALSE(ur.decoded);
                            continue;
                        }
                        // at t = K the whole code lives in every cache
                        bool expect = t == K || inactive <= a;
                        REQUIRE(ur.decoded == expect);
                        REQUIRE(ur.bit_exact == expect);
                        REQUIRE(ur.one_shot);
                        REQUIRE(BigInt(ur.cached_blocks) == t * binom(K - 1, t - 1));
                        REQUIRE(BigInt(ur.received_blocks) ==
                                (K - 1 - inactive) * per_sender);
                    }
                }
            }
        }
    };
    sweep(2, 2, {1, 2}, {1, 2}, {0, 1});
    sweep(2, 4, {1, 2, 2, 1}, {1, 2, 3, 4}, {0, 1, 2, 3});
    sweep(3, 4, {1, 2, 3, 1}, {2}, {1});
    sweep(2, 5, {1, 2, 1, 2, 1}, {1, 2, 3, 4, 5}, {0, 2, 4});
}

TEST_CASE("parity slack covers any a senders") {
    auto drop_check = [](int64_t N, int64_t K, int64_t t, int64_t a, const Demand& d) {
        Scenario base = make_scenario_t(N, K, t, minimal_robust_file_bits(K, t, a));
        RobustConfig cfg = make_robust_config(base, a, 0.3);
        RobustPlacement rp = robust_placement(cfg, 3);
        TransmissionLog log = transmit_all(rp.store, d);
        for (int k = 1; k <= K; ++k) {
            CacheView cache(rp.store, k);
            int want = d[static_cast<size_t>(k - 1)];
            std::vector<std::pair<int64_t, BitBlock>> cached;
            for_each_subset(static_cast<int>(K), static_cast<int>(t), [&](UserMask holders) {
                if (!mask_has(holders, k)) return;
                for (int owner : mask_members(holders)) {
                    SubPieceId id{want, holders, owner};
                    cached.emplace_back(coded_block_index(rp.coded, id), cache.get(id));
                }
            });
            std::vector<std::vector<std::pair<int64_t, BitBlock>>> from_sender(
                static_cast<size_t>(K) + 1);
            for (int i = 1; i <= K; ++i) {
                if (i == k) continue;
                for (RecoveredPiece& piece : recover_from_sender(log, cache, i))
                    from_sender[static_cast<size_t>(i)].emplace_back(
                        coded_block_index(rp.coded, piece.provenance.id), std::move(piece.bits));
            }
            UserMask others = full_mask(static_cast<int>(K)) & ~user_bit(k);
            for_each_subset_of(others, static_cast<int>(a), [&](UserMask dropped) {
                std::vector<std::pair<int64_t, BitBlock>> blocks = cached;
                for (int i : mask_members(others & ~dropped))
                    for (const auto& blk : from_sender[static_cast<size_t>(i)])
                        blocks.push_back(blk);
                REQUIRE(static_cast<int64_t>(blocks.size()) == cfg.m);
                BitBlock file;
                for (BitBlock& part : mds_decode(blocks, rp.code)) file.append(part);
                REQUIRE(file == rp.source.files[static_cast<size_t>(want - 1)]);
            });
        }
    };
    drop_check(2, 4, 2, 1, {1, 2, 1, 2});
    drop_check(2, 5, 3, 2, {2, 1, 1, 2, 2});
}

TEST_CASE("measured load scales by the expansion factor") {
    Demand d = {1, 2, 2, 1};
    for (int64_t t : {1, 2, 3}) {
        for (int64_t a : {0, 1, 2}) {
            Scenario base = make_scenario_t(2, 4, t, minimal_robust_file_bits(4, t, a));
            RobustConfig cfg = make_robust_config(base, a, 0.1);
            RobustDeliveryResult res = robust_place_and_deliver(cfg, d, full_mask(4), 9);
            SubPieceStore store = man_placement(base, generate_database(base, 9));
            TransmissionLog log = transmit_all(store, d);
            REQUIRE(res.measured_load == log.measured_load() * robust_factor(4, t, a));
        }
    }
}

TEST_CASE("outage probability") {
    SECTION("degenerate probabilities") {
        for (int64_t a = 0; a <= 4; ++a) REQUIRE(outage_probability(5, 0.0, a) == 0);
        REQUIRE(outage_probability(5, 1.0, 3) == 1);
        REQUIRE(outage_probability(4, 0.5, 1) == Float50(11) / 16);
    }

    SECTION("single surviving term at a = K - 1") {
        REQUIRE(outage_probability(6, 0.3, 5) == pow(Float50(0.3), 6u));
        REQUIRE(outage_probability(100, 0.1, 99) == pow(Float50(0.1), 100u));
    }

    SECTION("deep tails against the exact rational") {
        Float50 far = outage_probability(100, 0.1, 32);
        REQUIRE(far > 3.15e-10);
        REQUIRE(far < 3.25e-10);
        REQUIRE(std::fabs(rel_err50(far, tenth_tail(100, 32))) < 1e-12);

        Float50 near = outage_probability(100, 0.1, 24);
        REQUIRE(near > 1.25e-5);
        REQUIRE(near < 1.35e-5);
        REQUIRE(std::fabs(rel_err50(near, tenth_tail(100, 24))) < 1e-12);
    }

    SECTION("monotone in a and p") {
        for (int64_t a = 1; a <= 9; ++a)
            REQUIRE(outage_probability(10, 0.3, a) <= outage_probability(10, 0.3, a - 1));
        for (int step = 1; step <= 10; ++step)
            REQUIRE(outage_probability(10, step / 10.0, 3) >=
                    outage_probability(10, (step - 1) / 10.0, 3));
    }

    REQUIRE_THROWS_AS(outage_probability(10, 0.5, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(outage_probability(10, -0.5, 3), std::invalid_argument);
}

TEST_CASE("monte carlo outage") {
    SECTION("no inactivity, no outage") {
        OutageEstimate est = monte_carlo_outage(8, 0.0, 2, 1000, 1);
        REQUIRE(est.hits == 0);
        REQUIRE(est.estimate == 0.0);
    }

    SECTION("small case against the sixteen-outcome enumeration") {
        int64_t bad = 0;
        for (UserMask pattern = 0; pattern < 16; ++pattern)
            if (mask_size(pattern) > 1) ++bad;  // bits mark inactive users
        REQUIRE(Rational(bad, 16) == Rational(11, 16));
        OutageEstimate est = monte_carlo_outage(4, 0.5, 1, 40000, 2026);
        REQUIRE(std::fabs(est.estimate - 11.0 / 16.0) <= est.half_width);
    }

    SECTION("medium tail within three sigma") {
        double analytic = outage_probability(20, 0.3, 9).convert_to<double>();
        OutageEstimate est = monte_carlo_outage(20, 0.3, 9, 100000, 77);
        double sigma = std::sqrt(analytic * (1.0 - analytic) / 100000.0);
        REQUIRE(std::fabs(est.estimate - analytic) <= 3.0 * sigma);
        REQUIRE(est.half_width ==
                3.0 * std::sqrt(est.estimate * (1.0 - est.estimate) / 100000.0));
    }

    SECTION("deterministic under the seed and any thread cap") {
        OutageEstimate first = monte_carlo_outage(12, 0.25, 3, 30000, 99);
        OutageEstimate again = monte_carlo_outage(12, 0.25, 3, 30000, 99);
        REQUIRE(first.hits == again.hits);
        const char* saved = std::getenv("CACHESIM_THREADS");
        std::string keep = saved ? saved : "";
        setenv("CACHESIM_THREADS", "1", 1);
        OutageEstimate serial = monte_carlo_outage(12, 0.25, 3, 30000, 99);
        if (saved) setenv("CACHESIM_THREADS", keep.c_str(), 1);
        else unsetenv("CACHESIM_THREADS");
        REQUIRE(first.hits == serial.hits);
    }

    REQUIRE_THROWS_AS(monte_carlo_outage(8, 0.1, 2, 0, 1), std::invalid_argument);
}

TEST_CASE("trade-off curves") {
    SECTION("a = 0 keeps the baseline corners") {
        InactivityCurve curve = inactivity_curve(10, 30, 0.1, 0, CurveKind::d2d_worst);
        REQUIRE(curve.points.size() == 30);
        for (const InactivityPoint& pt : curve.points) {
            REQUIRE(pt.M == Rational(10 * pt.t, 30));
            REQUIRE(pt.R == d2d_worst_optimal(10, 30, pt.t));
        }
        REQUIRE(curve.p_out == outage_probability(30, 0.1, 0));
    }

    SECTION("frozen corner points of the robust curves") {
        InactivityCurve ji32 = inactivity_curve(50, 100, 0.1, 32, CurveKind::ji_worst_case);
        const InactivityPoint& j4 = ji32.points[3];
        REQUIRE(j4.t == 4);
        REQUIRE(j4.M == Rational(1650, 569));
        REQUIRE(j4.R == Rational(19800, 569));
        REQUIRE(rel_err(to_double(j4.R), 34.7978910369064) < 1e-12);

        InactivityCurve worst24 = inactivity_curve(50, 100, 0.1, 24, CurveKind::d2d_worst);
        const InactivityPoint& w5 = worst24.points[4];
        REQUIRE(w5.t == 5);
        REQUIRE(rel_err(to_double(w5.M), 3.24803149606295) < 1e-12);
        REQUIRE(w5.R == Rational(6511725, 271018));
        REQUIRE(rel_err(to_double(w5.R), 24.0269096517571) < 1e-12);

        // Average-side anchors: the plotted averages are demand-sampled (a
        // 2e7-draw check puts the exact mean ~50 standard errors from the
        // plotted value), so agreement holds only to sampling noise.
        Rational avg24 = d2d_average_optimal(50, 100, 5) * robust_factor(100, 5, 24);
        REQUIRE(rel_err(to_double(avg24), 23.3794615291344) < 5e-4);
        Rational avg32 = d2d_average_optimal(50, 100, 4) * robust_factor(100, 4, 32);
        REQUIRE(rel_err(to_double(avg32), 31.425059982889) < 5e-4);
    }

    SECTION("envelope shape") {
        InactivityCurve curve = inactivity_curve(50, 100, 0.1, 24, CurveKind::d2d_worst);
        REQUIRE_FALSE(curve.envelope.empty());
        for (size_t i = 1; i < curve.envelope.size(); ++i) {
            REQUIRE(curve.envelope[i - 1].M < curve.envelope[i].M);
            REQUIRE(curve.envelope[i - 1].R >= curve.envelope[i].R);
        }
        for (const CurvePoint& v : curve.envelope) {
            bool found = false;
            for (const InactivityPoint& pt : curve.points)
                found = found || (pt.M == v.M && pt.R == v.R);
            REQUIRE(found);
        }
    }

    SECTION("outage column") {
        InactivityCurve tail = inactivity_curve(50, 100, 0.1, 99, CurveKind::d2d_worst);
        REQUIRE(tail.p_out == pow(Float50(0.1), 100u));
        std::vector<InactivityCurve> family =
            tradeoff_curve_inactivity(50, 100, 0.1, {0, 24, 32}, CurveKind::d2d_worst);
        REQUIRE(family.size() == 3);
        REQUIRE(family[0].a == 0);
        REQUIRE(family[1].a == 24);
        REQUIRE(family[2].a == 32);
        REQUIRE(family[1].p_out < family[0].p_out);
        REQUIRE(family[2].p_out < family[1].p_out);
    }

    REQUIRE_THROWS_AS(inactivity_curve(10, 30, 0.1, 2, CurveKind::shared_link_worst_case),
                      std::invalid_argument);
}
