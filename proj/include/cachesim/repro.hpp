#pragma once

// Reproduction report for the embedded reference plots. Every plotted point
// is recomputed from the closed forms and compared against the stored value.
// Worst-case panels (and both converse curves) were generated exactly, so
// they must match to formatting precision; the average panels were generated
// by demand sampling and carry an empirically calibrated noise band.

#include "cachesim/figures.hpp"
#include "cachesim/rational.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace cachesim {

// Worst-case panels: absolute on plot 2 (loads are O(10)), relative on
// plot 3. Average panels: relative bands covering the observed sampling
// noise with headroom (max seen: 1.6e-3 on plot 2, 4.2e-4 on plot 3).
inline constexpr double kPlot2WorstAbsTol = 1e-9;
inline constexpr double kPlot3WorstRelTol = 1e-6;
inline constexpr double kPlot2SampledRelTol = 5e-3;
inline constexpr double kPlot3SampledRelTol = 1e-3;

struct ReproPoint {
    int64_t t = 0;
    double plotted_M = 0.0;
    double plotted_R = 0.0;
    Rational model_M;
    Rational model_R;
    double abs_dev = 0.0;
    double rel_dev = 0.0;
};

struct ReproCurve {
    const PlotCurve* curve = nullptr;
    bool sampled = false;    // average panel: noise band instead of exactness
    double tolerance = 0.0;  // bound on the deviation measure below
    bool absolute = false;   // deviation measured absolutely (plot 2 worst)
    double max_dev = 0.0;
    int64_t argmax_t = 0;
    bool ok = false;
    std::vector<ReproPoint> points;
};

inline ReproCurve repro_curve(const PlotCurve& c) {
    ReproCurve rc;
    rc.curve = &c;
    rc.sampled = c.average;
    rc.absolute = !c.average && c.figure == 2;
    if (c.average)
        rc.tolerance = c.figure == 2 ? kPlot2SampledRelTol : kPlot3SampledRelTol;
    else
        rc.tolerance = c.figure == 2 ? kPlot2WorstAbsTol : kPlot3WorstRelTol;
    for (int64_t row = 0; row < static_cast<int64_t>(c.points.size()); ++row) {
        ReproPoint pt;
        pt.t = plot_row_t(c, row);
        pt.plotted_M = c.points[row].M;
        pt.plotted_R = c.points[row].R;
        pt.model_M = plot_model_M(c, row);
        pt.model_R = plot_model_R(c, row);
        pt.abs_dev = std::fabs(pt.plotted_R - to_double(pt.model_R));
        pt.rel_dev = plot_rel_dev(pt.plotted_R, pt.model_R);
        double dev = rc.absolute ? pt.abs_dev : pt.rel_dev;
        if (dev >= rc.max_dev) {
            rc.max_dev = dev;
            rc.argmax_t = pt.t;
        }
        rc.points.push_back(std::move(pt));
    }
    rc.ok = rc.max_dev <= rc.tolerance;
    return rc;
}

inline std::vector<ReproCurve> repro_figure(int figure) {
    std::vector<ReproCurve> out;
    for (const PlotCurve& c : figure_curves(figure)) out.push_back(repro_curve(c));
    return out;
}

struct OutageLegendCheck {
    int64_t a = 0;
    double exact = 0.0;    // analytic tail probability
    double rounded = 0.0;  // two significant figures of the exact value
    double hint = 0.0;     // legend value
    bool ok = false;
};

}  // namespace cachesim
