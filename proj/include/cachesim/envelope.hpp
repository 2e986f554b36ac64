#pragma once

// Lower convex envelopes of memory/load corner points, kept exact.

#include "cachesim/rational.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace cachesim {

struct CurvePoint {
    Rational M;
    Rational R;
    int64_t t = -1;         // corner parameter when applicable, -1 otherwise
    bool boundary = false;  // endpoint outside the strict M < N regime
};

// Lower hull over points with pairwise distinct M. Collinear vertices are
// kept, so an already convex chain passes through unchanged.
inline std::vector<CurvePoint> lower_convex_envelope(std::vector<CurvePoint> points) {
    std::sort(points.begin(), points.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.M < b.M; });
    for (size_t i = 1; i < points.size(); ++i)
        if (points[i].M == points[i - 1].M)
            throw std::invalid_argument("envelope: duplicate M values");
    std::vector<CurvePoint> hull;
    for (const CurvePoint& p : points) {
        while (hull.size() >= 2) {
            const CurvePoint& a = hull[hull.size() - 2];
            const CurvePoint& b = hull[hull.size() - 1];
            // pop b only if it lies strictly above chord a..p
            Rational lhs = (b.R - a.R) * (p.M - a.M);
            Rational rhs = (p.R - a.R) * (b.M - a.M);
            if (lhs > rhs) hull.pop_back(); else break;
        }
        hull.push_back(p);
    }
    return hull;
}

inline Rational eval_envelope(const std::vector<CurvePoint>& hull, const Rational& M) {
    if (hull.empty()) throw std::invalid_argument("envelope: empty");
    if (M < hull.front().M || M > hull.back().M)
        throw std::out_of_range("envelope: M outside corner range");
    for (size_t i = 0; i + 1 < hull.size(); ++i) {
        const CurvePoint& a = hull[i];
        const CurvePoint& b = hull[i + 1];
        if (M >= a.M && M <= b.M) {
            if (M == a.M) return a.R;
            if (M == b.M) return b.R;
            return a.R + (b.R - a.R) * (M - a.M) / (b.M - a.M);
        }
    }
    return hull.back().R;
}

}  // namespace cachesim
