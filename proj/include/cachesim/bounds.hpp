#pragma once

// Closed-form load evaluators: the proposed device-to-device scheme, the
// Ji-style splitting scheme, the shared-link baseline, and the cut-set and
// Sengupta-style converse bounds, plus trade-off curve assembly.
//
// Demand averages are expectations over uniform demands. Every per-demand
// load here depends on a demand only through (N_e, u) = (distinct files,
// files requested exactly once), so expectations run over the exact joint
// tally of those two statistics; small instances cross-check against the
// composition enumeration in tests.

#include "cachesim/combinatorics.hpp"
#include "cachesim/envelope.hpp"
#include "cachesim/rational.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <string>
#include <vector>

namespace cachesim {

inline void check_corner_params(int64_t N, int64_t K, int64_t t, int64_t t_min = 1) {
    if (N < 1 || K < 1) throw std::invalid_argument("bounds: need N >= 1, K >= 1");
    if (t < t_min || t > K) throw std::invalid_argument("bounds: t out of range");
}

// ---- per-demand loads ------------------------------------------------------

inline Rational ji_load(int64_t K, int64_t t, int64_t ne) {
    check_corner_params(1, K, t);
    Rational split(K - t, t);
    return std::min(split, Rational(ne));
}

inline Rational shared_link_per_demand(int64_t K, int64_t t, int64_t ne) {
    check_corner_params(1, K, t, 0);
    return Rational(binom(K, t + 1) - binom(K - ne, t + 1), binom(K, t));
}

// Proposed scheme, demand reduced to (N_e, u):
//   sum_i binom(K-1-N_e(d_{\i}), t) = u binom(K-N_e, t) + (K-u) binom(K-1-N_e, t)
inline Rational d2d_per_demand(int64_t K, int64_t t, int64_t ne, int64_t uniq) {
    check_corner_params(1, K, t);
    assert(uniq >= 0 && uniq <= ne && ne <= K);
    BigInt sum_i = uniq * binom(K - ne, t) + (K - uniq) * binom(K - 1 - ne, t);
    Rational numer = Rational(binom(K - 1, t)) - Rational(sum_i, K);
    return numer / Rational(binom(K - 1, t - 1));
}

inline Rational d2d_per_demand(int64_t K, int64_t t, const Composition& comp) {
    return d2d_per_demand(K, t, num_distinct(comp), num_unique(comp));
}

// ---- demand averages -------------------------------------------------------

template <typename Load>  // Load: (ne, uniq) -> Rational
inline Rational demand_average(int64_t N, int64_t K, Load&& load) {
    BigInt total = ipow(BigInt(N), K);
    Rational acc = 0;
    for (const EuCell& cell : joint_eu_counts(N, K))
        acc += Rational(cell.count, total) * load(cell.e, cell.u);
    return acc;
}

// Same expectation, summed over demand types; the small-instance cross-check.
template <typename Load>
inline Rational demand_average_by_composition(int64_t N, int64_t K, Load&& load) {
    BigInt total = ipow(BigInt(N), K);
    Rational acc = 0;
    for (const Composition& comp : enumerate_compositions(N, K))
        acc += Rational(demand_count(comp, K), total) *
               load(num_distinct(comp), num_unique(comp));
    return acc;
}

inline Rational d2d_average_optimal(int64_t N, int64_t K, int64_t t) {
    return demand_average(N, K, [&](int64_t ne, int64_t uniq) {
        return d2d_per_demand(K, t, ne, uniq);
    });
}

inline Rational ji_average(int64_t N, int64_t K, int64_t t) {
    return demand_average(N, K, [&](int64_t ne, int64_t) { return ji_load(K, t, ne); });
}

inline Rational shared_link_average(int64_t N, int64_t K, int64_t t) {
    return demand_average(N, K, [&](int64_t ne, int64_t) {
        return shared_link_per_demand(K, t, ne);
    });
}

// ---- worst cases -----------------------------------------------------------

inline Rational ji_worst(int64_t N, int64_t K, int64_t t) {
    return ji_load(K, t, std::min(N, K));
}

inline Rational shared_link_worst(int64_t N, int64_t K, int64_t t) {
    return shared_link_per_demand(K, t, std::min(N, K));
}

inline Rational d2d_worst_optimal(int64_t N, int64_t K, int64_t t) {
    check_corner_params(N, K, t);
    Rational denom(binom(K - 1, t - 1));
    if (K <= N) return Rational(binom(K - 1, t)) / denom;
    if (K >= 2 * N)
        return Rational(binom(K - 1, t) - binom(K - 1 - N, t)) / denom;
    // N < K < 2N: worst composition has 2N-K singleton files, K-N doubles
    Rational numer = Rational(binom(K - 1, t)) -
                     Rational(2 * N - K, K) * Rational(binom(K - N, t)) -
                     Rational(2 * (K - N), K) * Rational(binom(K - 1 - N, t));
    return numer / denom;
}

// ---- converse bounds (any rational M in [0, N]) ----------------------------

inline Rational cutset_bound(int64_t N, int64_t K, const Rational& M) {
    if (M < 0 || M > N) throw std::invalid_argument("cutset: M outside [0, N]");
    Rational best = 0;
    for (int64_t l = 1; l <= std::min(N, K); ++l) {
        Rational term = Rational(l) - Rational(l) * M / Rational(N / l);
        best = std::max(best, term);
    }
    if (K > 1 && N > 1) {
        Rational t = Rational(K) * M / N;
        best = std::max(best, (Rational(K) - t) / Rational(K - 1));
    }
    return best;
}

inline Rational sengupta_bound(int64_t N, int64_t K, const Rational& M) {
    if (M < 0 || M > N) throw std::invalid_argument("sengupta: M outside [0, N]");
    Rational best = 0;
    for (int64_t s = 1; s <= K; ++s) {
        if (s == K) continue;  // denominator l(K-s)/K vanishes
        int64_t l_max = (N + s - 1) / s;
        for (int64_t l = 1; l <= l_max; ++l) {
            int64_t mu = std::min((N + l - 1) / l, K) - s;
            int64_t excess = std::max<int64_t>(N - l * s, 0);
            Rational numer = Rational(N) - Rational(s) * M -
                             Rational(mu, s + mu) * Rational(excess);
            Rational term = numer / Rational(l * (K - s), K);
            best = std::max(best, term);
        }
    }
    return best;
}

// ---- order optimality ------------------------------------------------------

struct OrderOptimality {
    Rational shared_link_avg;
    Rational scaled_d2d_avg;  // (t/(t+1)) * d2d_average_optimal
    Rational d2d_avg;
    bool chain_holds = false;      // shared_link_avg >= scaled_d2d_avg
    bool within_factor_two = false;  // d2d_avg <= 2 * shared_link_avg
};

inline OrderOptimality order_optimality_margin(int64_t N, int64_t K, int64_t t) {
    OrderOptimality out;
    out.shared_link_avg = shared_link_average(N, K, t);
    out.d2d_avg = d2d_average_optimal(N, K, t);
    out.scaled_d2d_avg = Rational(t, t + 1) * out.d2d_avg;
    out.chain_holds = out.shared_link_avg >= out.scaled_d2d_avg;
    out.within_factor_two = out.d2d_avg <= 2 * out.shared_link_avg;
    return out;
}

// ---- trade-off curves ------------------------------------------------------

enum class CurveKind {
    d2d_worst,
    d2d_average,
    ji_worst_case,
    ji_average_case,
    shared_link_worst_case,
    shared_link_average_case,
};

inline std::string curve_label(CurveKind kind) {
    switch (kind) {
        case CurveKind::d2d_worst: return "d2d_worst";
        case CurveKind::d2d_average: return "d2d_average";
        case CurveKind::ji_worst_case: return "ji_worst";
        case CurveKind::ji_average_case: return "ji_average";
        case CurveKind::shared_link_worst_case: return "shared_link_worst";
        case CurveKind::shared_link_average_case: return "shared_link_average";
    }
    return "?";
}

inline Rational corner_load(CurveKind kind, int64_t N, int64_t K, int64_t t) {
    switch (kind) {
        case CurveKind::d2d_worst: return d2d_worst_optimal(N, K, t);
        case CurveKind::d2d_average: return d2d_average_optimal(N, K, t);
        case CurveKind::ji_worst_case: return ji_worst(N, K, t);
        case CurveKind::ji_average_case: return ji_average(N, K, t);
        case CurveKind::shared_link_worst_case: return shared_link_worst(N, K, t);
        case CurveKind::shared_link_average_case: return shared_link_average(N, K, t);
    }
    throw std::logic_error("corner_load: bad kind");
}

// Corner points at integer t; the device-to-device schemes need t >= 1, the
// shared-link scheme includes the no-cache corner t = 0.
inline std::vector<CurvePoint> corner_points(CurveKind kind, int64_t N, int64_t K) {
    bool shared = kind == CurveKind::shared_link_worst_case ||
                  kind == CurveKind::shared_link_average_case;
    std::vector<CurvePoint> points;
    for (int64_t t = shared ? 0 : 1; t <= K; ++t) {
        CurvePoint p;
        p.t = t;
        p.M = Rational(N * t, K);
        p.R = corner_load(kind, N, K, t);
        p.boundary = (t == K) || (t == 0);
        points.push_back(std::move(p));
    }
    return points;
}

struct TradeoffCurve {
    std::string label;
    std::vector<CurvePoint> corners;
    std::vector<CurvePoint> envelope;
};

inline TradeoffCurve build_curve(CurveKind kind, int64_t N, int64_t K) {
    TradeoffCurve curve;
    curve.label = curve_label(kind);
    curve.corners = corner_points(kind, N, K);
    curve.envelope = lower_convex_envelope(curve.corners);
    return curve;
}

}  // namespace cachesim
