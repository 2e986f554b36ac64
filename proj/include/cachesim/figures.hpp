#pragma once

// Embedded reference curves from the two published trade-off plots, plus the
// computed twin of every point. Worst-case panels follow the closed forms
// exactly (deviations are double formatting noise, ~1e-13 relative); the
// average panels were produced by demand sampling, so exact expectations
// agree only to sampling noise (up to ~1e-3 relative on plot 2 and ~3e-4 on
// plot 3). Plot 3 repeats the worst-case split-scheme form in both panels,
// and its legend states the outage to two significant figures.

#include "cachesim/bounds.hpp"
#include "cachesim/figure_data.hpp"
#include "cachesim/inactivity.hpp"
#include "cachesim/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cachesim {

enum class PlotScheme { ji, proposed, shared_link, sengupta, cutset };

struct PlotSetup {
    int64_t N = 0;
    int64_t K = 0;
    double p = 0.0;
};

inline constexpr PlotSetup kPlot2Setup{10, 30, 0.0};
inline constexpr PlotSetup kPlot3Setup{50, 100, 0.1};

struct PlotCurve {
    int figure = 2;            // 2 or 3
    bool average = false;      // worst-case or average panel
    PlotScheme scheme = PlotScheme::proposed;
    int64_t a = 0;             // tolerated inactive users (plot 3)
    double outage_hint = 0.0;  // legend outage, two significant figures
    std::string label;
    std::span<const PlotPoint> points;
};

inline const PlotSetup& plot_setup(const PlotCurve& c) {
    return c.figure == 2 ? kPlot2Setup : kPlot3Setup;
}

inline std::string plot_scheme_label(PlotScheme scheme, bool average) {
    std::string panel = average ? "average" : "worst";
    switch (scheme) {
        case PlotScheme::ji: return "ji_" + panel;
        case PlotScheme::proposed: return "d2d_" + panel;
        case PlotScheme::shared_link: return "shared_link_" + panel;
        case PlotScheme::sengupta: return "sengupta_bound";
        case PlotScheme::cutset: return "cutset_bound";
    }
    return "?";
}

inline const std::vector<PlotCurve>& figure2_curves() {
    static const std::vector<PlotCurve> curves = [] {
        auto make = [](bool avg, PlotScheme s, std::span<const PlotPoint> pts) {
            PlotCurve c;
            c.figure = 2;
            c.average = avg;
            c.scheme = s;
            c.label = plot_scheme_label(s, avg);
            c.points = pts;
            return c;
        };
        return std::vector<PlotCurve>{
            make(false, PlotScheme::ji, figdata::kFig2WorstJi),
            make(false, PlotScheme::proposed, figdata::kFig2WorstProposed),
            make(false, PlotScheme::shared_link, figdata::kFig2WorstSharedLink),
            make(false, PlotScheme::sengupta, figdata::kFig2WorstSengupta),
            make(false, PlotScheme::cutset, figdata::kFig2WorstCutset),
            make(true, PlotScheme::ji, figdata::kFig2AverageJi),
            make(true, PlotScheme::proposed, figdata::kFig2AverageProposed),
            make(true, PlotScheme::shared_link, figdata::kFig2AverageSharedLink),
        };
    }();
    return curves;
}

inline const std::vector<PlotCurve>& figure3_curves() {
    static const std::vector<PlotCurve> curves = [] {
        auto make = [](bool avg, PlotScheme s, int64_t a, double outage,
                       std::span<const PlotPoint> pts) {
            PlotCurve c;
            c.figure = 3;
            c.average = avg;
            c.scheme = s;
            c.a = a;
            c.outage_hint = outage;
            c.label = plot_scheme_label(s, avg) + "_a" + std::to_string(a);
            c.points = pts;
            return c;
        };
        return std::vector<PlotCurve>{
            make(false, PlotScheme::ji, 32, 3.2e-10, figdata::kFig3WorstJi32),
            make(false, PlotScheme::proposed, 32, 3.2e-10, figdata::kFig3WorstProposed32),
            make(false, PlotScheme::ji, 24, 1.3e-5, figdata::kFig3WorstJi24),
            make(false, PlotScheme::proposed, 24, 1.3e-5, figdata::kFig3WorstProposed24),
            make(false, PlotScheme::ji, 0, 1.0, figdata::kFig3WorstJi0),
            make(false, PlotScheme::proposed, 0, 1.0, figdata::kFig3WorstProposed0),
            make(true, PlotScheme::ji, 32, 3.2e-10, figdata::kFig3AverageJi32),
            make(true, PlotScheme::proposed, 32, 3.2e-10, figdata::kFig3AverageProposed32),
            make(true, PlotScheme::ji, 24, 1.3e-5, figdata::kFig3AverageJi24),
            make(true, PlotScheme::proposed, 24, 1.3e-5, figdata::kFig3AverageProposed24),
            make(true, PlotScheme::ji, 0, 1.0, figdata::kFig3AverageJi0),
            make(true, PlotScheme::proposed, 0, 1.0, figdata::kFig3AverageProposed0),
        };
    }();
    return curves;
}

inline const std::vector<PlotCurve>& figure_curves(int figure) {
    if (figure == 2) return figure2_curves();
    if (figure == 3) return figure3_curves();
    throw std::invalid_argument("figures: only plots 2 and 3 are embedded");
}

// Plotted rows sit on the integer-t grid: t = 3..18 on plot 2, t = 2..30 on
// plot 3.
inline int64_t plot_row_t(const PlotCurve& c, int64_t row) {
    if (row < 0 || row >= static_cast<int64_t>(c.points.size()))
        throw std::out_of_range("figures: row outside the plotted grid");
    return row + (c.figure == 2 ? 3 : 2);
}

inline Rational plot_model_M(const PlotCurve& c, int64_t row) {
    const PlotSetup& s = plot_setup(c);
    int64_t t = plot_row_t(c, row);
    Rational M(s.N * t, s.K);
    if (c.figure == 3) M = M * robust_factor(s.K, t, c.a);
    return M;
}

inline Rational plot_model_R(const PlotCurve& c, int64_t row) {
    const PlotSetup& s = plot_setup(c);
    int64_t t = plot_row_t(c, row);
    if (c.figure == 2) {
        switch (c.scheme) {
            case PlotScheme::ji:
                return c.average ? ji_average(s.N, s.K, t) : ji_worst(s.N, s.K, t);
            case PlotScheme::proposed:
                return c.average ? d2d_average_optimal(s.N, s.K, t)
                                 : d2d_worst_optimal(s.N, s.K, t);
            case PlotScheme::shared_link:
                return c.average ? shared_link_average(s.N, s.K, t)
                                 : shared_link_worst(s.N, s.K, t);
            case PlotScheme::sengupta:
                return sengupta_bound(s.N, s.K, plot_model_M(c, row));
            case PlotScheme::cutset:
                return cutset_bound(s.N, s.K, plot_model_M(c, row));
        }
        throw std::logic_error("figures: bad scheme");
    }
    Rational f = robust_factor(s.K, t, c.a);
    if (c.scheme == PlotScheme::ji) {
        // the split average saturates to the worst form once t >= 4 here
        Rational base = c.average ? ji_average(s.N, s.K, t) : ji_worst(s.N, s.K, t);
        return base * f;
    }
    if (c.scheme != PlotScheme::proposed)
        throw std::logic_error("figures: plot 3 has only the two schemes");
    Rational base = c.average ? d2d_average_optimal(s.N, s.K, t)
                              : d2d_worst_optimal(s.N, s.K, t);
    return base * f;
}

// ---- deviation report -------------------------------------------------------

struct PlotDeviation {
    const PlotCurve* curve = nullptr;
    double max_rel_M = 0.0;
    double max_rel_R = 0.0;
    int64_t argmax_row = 0;  // row attaining max_rel_R
};

inline double plot_rel_dev(double plotted, const Rational& model) {
    double m = to_double(model);
    if (m == 0.0) return plotted == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::fabs(plotted - m) / std::fabs(m);
}

inline PlotDeviation diff_plot_curve(const PlotCurve& c) {
    PlotDeviation dev;
    dev.curve = &c;
    for (int64_t row = 0; row < static_cast<int64_t>(c.points.size()); ++row) {
        double dm = plot_rel_dev(c.points[row].M, plot_model_M(c, row));
        double dr = plot_rel_dev(c.points[row].R, plot_model_R(c, row));
        dev.max_rel_M = std::max(dev.max_rel_M, dm);
        if (dr > dev.max_rel_R) {
            dev.max_rel_R = dr;
            dev.argmax_row = row;
        }
    }
    return dev;
}

inline std::vector<PlotDeviation> diff_figure(int figure) {
    std::vector<PlotDeviation> out;
    for (const PlotCurve& c : figure_curves(figure)) out.push_back(diff_plot_curve(c));
    return out;
}

// Round to two significant decimal figures (the legend's outage precision).
inline double two_sig_figs(double x) {
    if (x == 0.0) return 0.0;
    double ex = std::floor(std::log10(std::fabs(x)));
    double scale = std::pow(10.0, ex - 1);
    return std::round(x / scale) * scale;
}

}  // namespace cachesim
