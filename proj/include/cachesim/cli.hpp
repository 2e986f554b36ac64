#pragma once

// Command-line front end. run_cli drives every subcommand against caller
// supplied streams so tests exercise the exact production path; main() is a
// thin wrapper. All numeric output is exact or routed through format_g15,
// so one RunConfig and seed reproduce byte-identical output.
//
// Exit codes: 0 success, 1 an internal cross-check failed, 2 usage or
// domain error.

#include "cachesim/bounds.hpp"
#include "cachesim/converse.hpp"
#include "cachesim/csv.hpp"
#include "cachesim/delivery.hpp"
#include "cachesim/demand.hpp"
#include "cachesim/envelope.hpp"
#include "cachesim/inactivity.hpp"
#include "cachesim/placement.hpp"
#include "cachesim/rational.hpp"
#include "cachesim/repro.hpp"
#include "cachesim/scenario.hpp"
#include "cachesim/sharing.hpp"
#include "cachesim/wire.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cachesim {

struct RunConfig {
    std::string command;
    int64_t N = 0;
    int64_t K = 0;
    std::string M;               // rational literal; empty when -t drives
    int64_t t = 0;               // 0 = derive from M
    int64_t F = 0;               // 0 = smallest valid size
    uint64_t seed = 1;
    std::string demand = "worst";  // "q1,q2,..." | worst | average | all
    double p = 0.0;
    std::vector<int64_t> a_values;
    int64_t trials = 100000;
    std::string out;             // CSV/report sink; empty = stdout

    // per-subcommand extras
    bool envelope = false;
    std::string dump;
    std::string grid;            // lo:step:hi, rationals
    std::vector<std::string> curves;
    std::string kind = "worst";
    bool curve_mode = false;
    bool simulate_mode = false;
    bool outage_mode = false;
    std::vector<int64_t> inactive;
    bool draw = false;
    std::string figure = "all";
};

namespace detail {

// Routes to --out when set, the fallback stream otherwise.
class OutSink {
public:
    OutSink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open output file " + path);
            os_ = &file_;
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

inline bool is_demand_list(const std::string& spec) {
    return !spec.empty() && spec.find_first_not_of("0123456789, ") == std::string::npos;
}

inline Demand parse_demand_list(const std::string& spec) {
    Demand d;
    for (const std::string& part : split(spec, ',')) {
        if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("demand: bad entry '" + part + "'");
        d.push_back(std::stoi(part));
    }
    return d;
}

inline std::string type_string(const Composition& comp) {
    std::string s;
    for (int64_t part : comp) {
        if (part == 0) break;  // multiplicities are sorted descending
        if (!s.empty()) s += '+';
        s += std::to_string(part);
    }
    return s;
}

inline std::string load_string(const Rational& r) {
    return format_rational(r) + " = " + format_g15(to_double(r));
}

inline std::string yes_no(bool v) { return v ? "yes" : "no"; }

struct Grid {
    Rational lo, step, hi;
};

inline Grid parse_grid(const std::string& text) {
    auto parts = split(text, ':');
    if (parts.size() != 3) throw std::invalid_argument("grid: expected lo:step:hi");
    Grid g{parse_rational(parts[0]), parse_rational(parts[1]), parse_rational(parts[2])};
    if (g.step <= 0 || g.lo > g.hi) throw std::invalid_argument("grid: need step > 0 and lo <= hi");
    return g;
}

inline std::vector<Rational> grid_values(const Grid& g) {
    std::vector<Rational> vals;
    for (Rational m = g.lo; m <= g.hi; m += g.step) vals.push_back(m);
    return vals;
}

}  // namespace detail

// ---- simulate ----------------------------------------------------------------

namespace detail {

// One placed instance, single- or two-level, reused across demands.
struct SimEngine {
    bool sharing = false;
    int64_t N = 0, K = 0;
    Rational M;
    int64_t F = 0;

    Scenario s;          // single-level
    Database db;
    SubPieceStore store;

    SharedScenario ss;   // two-level
    SharedPlacement sp;

    std::string describe() const {
        std::ostringstream os;
        if (!sharing) {
            os << "scenario: N=" << N << " K=" << K << " t=" << s.t
               << " M=" << format_rational(M) << " F=" << F;
        } else {
            os << "scenario: N=" << N << " K=" << K << " M=" << format_rational(M)
               << " F=" << F << " (two levels)\n"
               << "split: alpha=" << format_rational(ss.alpha) << ", t=" << ss.lo.t
               << " F=" << ss.lo.F << " | t=" << ss.hi.t << " F=" << ss.hi.F;
        }
        return os.str();
    }

    Rational formula(const Composition& comp) const {
        if (!sharing) return d2d_per_demand(K, s.t, comp);
        return ss.alpha * d2d_per_demand(K, ss.lo.t, comp) +
               (1 - ss.alpha) * d2d_per_demand(K, ss.hi.t, comp);
    }

    Rational formula_worst() const {
        if (!sharing) return d2d_worst_optimal(N, K, s.t);
        return ss.alpha * d2d_worst_optimal(N, K, ss.lo.t) +
               (1 - ss.alpha) * d2d_worst_optimal(N, K, ss.hi.t);
    }

    Rational formula_average() const {
        if (!sharing) return d2d_average_optimal(N, K, s.t);
        return ss.alpha * d2d_average_optimal(N, K, ss.lo.t) +
               (1 - ss.alpha) * d2d_average_optimal(N, K, ss.hi.t);
    }
};

inline SimEngine make_engine(const RunConfig& cfg) {
    SimEngine eng;
    eng.N = cfg.N;
    eng.K = cfg.K;
    if (cfg.t != 0) {
        eng.M = Rational(cfg.N * cfg.t, cfg.K);
    } else {
        if (cfg.M.empty()) throw std::invalid_argument("simulate: pass -M or -t");
        eng.M = parse_rational(cfg.M);
    }
    eng.sharing = needs_sharing(cfg.N, cfg.K, eng.M);
    if (eng.sharing && !cfg.envelope)
        throw std::invalid_argument(
            "simulate: KM/N is not an integer; pass --envelope to memory-share "
            "between the neighboring corners");
    if (!eng.sharing) {
        int64_t t = cfg.t != 0
                        ? cfg.t
                        : (numerator(Rational(cfg.K) * eng.M / cfg.N)).convert_to<int64_t>();
        int64_t F = cfg.F != 0 ? cfg.F : minimal_file_bits(cfg.K, t);
        eng.s = make_scenario_t(cfg.N, cfg.K, t, F);
        eng.F = F;
        eng.db = generate_database(eng.s, cfg.seed);
        eng.store = man_placement(eng.s, eng.db);
    } else {
        int64_t F = cfg.F != 0 ? cfg.F : minimal_shared_file_bits(cfg.N, cfg.K, eng.M);
        eng.ss = make_shared_scenario(cfg.N, cfg.K, eng.M, F);
        eng.F = F;
        eng.sp = shared_placement(eng.ss, cfg.seed);
    }
    return eng;
}

struct SimRun {
    Rational measured;
    std::vector<int64_t> per_sender;
    bool decoded = false;  // every user reproduced its file bit-exactly
    bool audited = false;  // every decode passed the one-shot audit
};

inline SimRun run_demand(const SimEngine& eng, const Demand& d) {
    SimRun run;
    if (!eng.sharing) {
        TransmissionLog log = transmit_all(eng.store, d);
        run.measured = log.measured_load();
        run.decoded = true;
        run.audited = true;
        for (const SenderLog& sl : log.senders)
            run.per_sender.push_back(static_cast<int64_t>(sl.codewords.size()));
        for (int k = 1; k <= eng.K; ++k) {
            DecodeResult res = decode_all(log, CacheView(eng.store, k));
            run.decoded &= res.file == eng.db.files[static_cast<size_t>(d[size_t(k - 1)] - 1)];
            run.audited &= one_shot_audit(log, res);
        }
    } else {
        SharedDeliveryResult res = shared_deliver(eng.sp, d);
        run.measured = res.measured_load;
        run.per_sender = res.codewords_per_sender;
        run.decoded = true;
        run.audited = true;
        for (const SharedUserResult& u : res.users) {
            run.decoded &= u.bit_exact;
            run.audited &= u.one_shot;
        }
    }
    return run;
}

}  // namespace detail

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    detail::OutSink sink(cfg.out, out);
    std::ostream& rep = sink.stream();
    detail::SimEngine eng = detail::make_engine(cfg);

    bool ok = true;
    if (detail::is_demand_list(cfg.demand) || cfg.demand == "worst") {
        Demand d = detail::is_demand_list(cfg.demand) ? detail::parse_demand_list(cfg.demand)
                                                      : worst_case_demand(cfg.N, cfg.K);
        if (static_cast<int64_t>(d.size()) != cfg.K)
            throw std::invalid_argument("demand: need one entry per user");
        for (int q : d)
            if (q < 1 || q > cfg.N) throw std::invalid_argument("demand: file index out of range");

        detail::SimRun run = detail::run_demand(eng, d);
        Composition comp = composition_of(d, cfg.N);
        Rational formula = eng.formula(comp);

        rep << eng.describe() << '\n';
        rep << "demand:";
        for (size_t i = 0; i < d.size(); ++i) rep << (i ? "," : " ") << d[i];
        rep << " (type " << detail::type_string(comp) << ")\n";
        rep << "codewords per sender:";
        int64_t total = 0;
        for (int64_t n : run.per_sender) {
            rep << ' ' << n;
            total += n;
        }
        rep << " (total " << total << ")\n";
        rep << "measured load: " << detail::load_string(run.measured) << '\n';
        rep << "formula load: " << detail::load_string(formula) << '\n';
        if (cfg.demand == "worst")
            rep << "worst-case formula load: " << detail::load_string(eng.formula_worst()) << '\n';
        bool equal = run.measured == formula &&
                     (cfg.demand != "worst" || run.measured == eng.formula_worst());
        rep << "measured equals formula: " << detail::yes_no(equal) << '\n';
        rep << "decode: " << (run.decoded ? "all users bit-exact" : "FAILED") << ", one-shot audit "
            << (run.audited ? "pass" : "FAIL") << '\n';
        ok = equal && run.decoded && run.audited;

        if (!cfg.dump.empty()) {
            if (eng.sharing)
                throw std::invalid_argument("simulate: --dump needs a single-level run");
            TransmissionLog log = transmit_all(eng.store, d);
            std::vector<uint8_t> bytes = serialize_log(log);
            std::ofstream f(cfg.dump, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open dump file " + cfg.dump);
            f.write(reinterpret_cast<const char*>(bytes.data()),
                    static_cast<std::streamsize>(bytes.size()));
            rep << "wire dump: " << cfg.dump << " (" << bytes.size() << " bytes)\n";
        }
    } else if (cfg.demand == "average") {
        if (!cfg.dump.empty())
            throw std::invalid_argument("simulate: --dump needs a single demand");
        rep << eng.describe() << '\n';
        Rational acc = 0;
        BigInt total_demands = ipow(BigInt(cfg.N), cfg.K);
        rep << "type count measured\n";
        for (const Composition& comp : enumerate_compositions(cfg.N, cfg.K)) {
            Demand d = demand_from_composition(comp, cfg.K);
            detail::SimRun run = detail::run_demand(eng, d);
            BigInt count = demand_count(comp, cfg.K);
            ok &= run.measured == eng.formula(comp) && run.decoded && run.audited;
            acc += run.measured * Rational(count);
            rep << detail::type_string(comp) << ' ' << count << ' '
                << detail::load_string(run.measured) << '\n';
        }
        Rational average = acc / Rational(total_demands);
        Rational formula = eng.formula_average();
        rep << "measured average load: " << detail::load_string(average) << '\n';
        rep << "formula average load: " << detail::load_string(formula) << '\n';
        ok &= average == formula;
        rep << "measured equals formula: " << detail::yes_no(average == formula) << '\n';
        rep << "per-type checks: " << (ok ? "pass" : "FAIL") << '\n';
    } else if (cfg.demand == "all") {
        if (!cfg.dump.empty())
            throw std::invalid_argument("simulate: --dump needs a single demand");
        BigInt space = ipow(BigInt(cfg.N), cfg.K);
        if (space > 65536)
            throw std::invalid_argument(
                "simulate: demand space too large for -d all; use -d average");
        rep << eng.describe() << '\n';
        Rational acc = 0, max_measured = 0;
        int64_t count = 0;
        bool all_equal = true, all_decoded = true;
        for_each_demand(cfg.N, cfg.K, [&](const Demand& d) {
            detail::SimRun run = detail::run_demand(eng, d);
            all_equal &= run.measured == eng.formula(composition_of(d, cfg.N));
            all_decoded &= run.decoded && run.audited;
            acc += run.measured;
            max_measured = std::max(max_measured, run.measured);
            ++count;
        });
        Rational average = acc / count;
        rep << "demands simulated: " << count << '\n';
        rep << "every measured load equals its formula: " << detail::yes_no(all_equal) << '\n';
        rep << "every demand decoded bit-exact, one-shot: " << detail::yes_no(all_decoded) << '\n';
        rep << "maximum measured load: " << detail::load_string(max_measured) << '\n';
        rep << "worst-case formula load: " << detail::load_string(eng.formula_worst()) << '\n';
        rep << "average measured load: " << detail::load_string(average) << '\n';
        rep << "average formula load: " << detail::load_string(eng.formula_average()) << '\n';
        ok = all_equal && all_decoded && max_measured == eng.formula_worst() &&
             average == eng.formula_average();
        rep << "cross-checks: " << (ok ? "pass" : "FAIL") << '\n';
    } else {
        throw std::invalid_argument("simulate: -d expects a file list, worst, average, or all");
    }

    if (!ok) err << "simulate: cross-check FAILED\n";
    return ok ? 0 : 1;
}

// ---- bounds --------------------------------------------------------------

namespace detail {

inline std::optional<CurveKind> scheme_kind(const std::string& name) {
    for (CurveKind k : {CurveKind::d2d_worst, CurveKind::d2d_average, CurveKind::ji_worst_case,
                        CurveKind::ji_average_case, CurveKind::shared_link_worst_case,
                        CurveKind::shared_link_average_case})
        if (curve_label(k) == name) return k;
    return std::nullopt;
}

inline const std::vector<std::string>& all_bound_names() {
    static const std::vector<std::string> names = {
        "d2d_worst",          "d2d_average",         "ji_worst",      "ji_average",
        "shared_link_worst",  "shared_link_average", "sengupta_bound", "cutset_bound"};
    return names;
}

}  // namespace detail

inline int cmd_bounds(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    (void)err;
    detail::OutSink sink(cfg.out, out);
    CsvWriter csv(sink.stream());
    csv.row({"curve", "M_num", "M_den", "R_num", "R_den", "R_float"});

    std::vector<std::string> names = cfg.curves.empty() ? detail::all_bound_names() : cfg.curves;
    std::optional<detail::Grid> grid;
    if (!cfg.grid.empty()) grid = detail::parse_grid(cfg.grid);

    auto emit = [&](const std::string& name, const Rational& M, const Rational& R) {
        csv.row({name, csv_big(numerator(M)), csv_big(denominator(M)), csv_big(numerator(R)),
                 csv_big(denominator(R)), csv_float(R)});
    };

    for (const std::string& name : names) {
        if (auto kind = detail::scheme_kind(name)) {
            TradeoffCurve curve = build_curve(*kind, cfg.N, cfg.K);
            if (!grid) {
                for (const CurvePoint& c : curve.corners) emit(name, c.M, c.R);
            } else {
                // grid rows interpolate between adjacent corners (two-level
                // memory sharing), not along the lower convex envelope
                for (const Rational& M : detail::grid_values(*grid)) {
                    if (M < curve.corners.front().M || M > curve.corners.back().M) continue;
                    emit(name, M, eval_envelope(curve.corners, M));
                }
            }
        } else if (name == "sengupta_bound" || name == "cutset_bound") {
            auto value = [&](const Rational& M) {
                return name == "sengupta_bound" ? sengupta_bound(cfg.N, cfg.K, M)
                                                : cutset_bound(cfg.N, cfg.K, M);
            };
            if (!grid) {
                for (int64_t t = 1; t <= cfg.K; ++t) {
                    Rational M(cfg.N * t, cfg.K);
                    emit(name, M, value(M));
                }
            } else {
                for (const Rational& M : detail::grid_values(*grid)) {
                    if (M < 0 || M > cfg.N) continue;
                    emit(name, M, value(M));
                }
            }
        } else {
            throw std::invalid_argument("bounds: unknown curve '" + name + "'");
        }
    }
    return 0;
}

// ---- converse --------------------------------------------------------------

inline int cmd_converse(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    check_corner_params(cfg.N, cfg.K, cfg.t);
    detail::OutSink sink(cfg.out, out);
    CsvWriter csv(sink.stream());
    csv.row({"type", "t", "r_num", "r_den", "achievable_num", "achievable_den", "equal"});

    bool all_equal = true;
    for (const Composition& comp : enumerate_compositions(cfg.N, cfg.K)) {
        // bound corner from the type-summed coefficient identity
        Rational r = b_t_closed_form(cfg.N, cfg.K, cfg.t, comp) * cfg.N /
                     Rational(demand_count(comp, cfg.K));
        Rational ach = d2d_per_demand(cfg.K, cfg.t, comp);
        bool equal = r == ach;
        all_equal &= equal;
        csv.row({detail::type_string(comp), csv_int(cfg.t), csv_big(numerator(r)),
                 csv_big(denominator(r)), csv_big(numerator(ach)), csv_big(denominator(ach)),
                 detail::yes_no(equal)});
    }
    if (!all_equal) err << "converse: bound and achievable load disagree\n";
    return all_equal ? 0 : 1;
}

// ---- inactivity --------------------------------------------------------------

namespace detail {

inline CurveKind kind_from_name(const std::string& name) {
    if (name == "worst") return CurveKind::d2d_worst;
    if (name == "average") return CurveKind::d2d_average;
    throw std::invalid_argument("inactivity: --kind expects worst or average");
}

}  // namespace detail

inline int cmd_inactivity_curve(const RunConfig& cfg, std::ostream& out) {
    if (cfg.a_values.empty())
        throw std::invalid_argument("inactivity: pass -a with at least one value");
    detail::OutSink sink(cfg.out, out);
    CsvWriter csv(sink.stream());
    csv.row({"a", "t", "M_float", "R_float", "P_out"});
    for (const InactivityCurve& curve : tradeoff_curve_inactivity(
             cfg.N, cfg.K, cfg.p, cfg.a_values, detail::kind_from_name(cfg.kind))) {
        std::string p_out = csv_float(curve.p_out.convert_to<double>());
        for (const InactivityPoint& pt : curve.points)
            csv.row({csv_int(pt.a), csv_int(pt.t), csv_float(pt.M), csv_float(pt.R), p_out});
    }
    return 0;
}

inline int cmd_inactivity_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.a_values.size() != 1)
        throw std::invalid_argument("inactivity: pass exactly one -a value to simulate");
    int64_t a = cfg.a_values.front();
    int64_t t = cfg.t;
    if (t == 0) {
        if (cfg.M.empty()) throw std::invalid_argument("inactivity: pass -t or integral -M");
        Rational t_exact = Rational(cfg.K) * parse_rational(cfg.M) / cfg.N;
        if (denominator(t_exact) != 1)
            throw std::invalid_argument("inactivity: robust placement sits on the corner grid");
        t = numerator(t_exact).convert_to<int64_t>();
    }
    int64_t F = cfg.F != 0 ? cfg.F : minimal_robust_file_bits(cfg.K, t, a);
    RobustConfig rc = make_robust_config(make_scenario_t(cfg.N, cfg.K, t, F), a, cfg.p);

    Demand d = detail::is_demand_list(cfg.demand) ? detail::parse_demand_list(cfg.demand)
               : cfg.demand == "worst"
                   ? worst_case_demand(cfg.N, cfg.K)
                   : throw std::invalid_argument("inactivity: -d expects a file list or worst");
    validate_demand(rc.base, d);

    UserMask active = full_mask(static_cast<int>(cfg.K));
    if (!cfg.inactive.empty() && cfg.draw)
        throw std::invalid_argument("inactivity: --inactive and --draw are exclusive");
    if (!cfg.inactive.empty()) {
        for (int64_t u : cfg.inactive) {
            if (u < 1 || u > cfg.K)
                throw std::invalid_argument("inactivity: --inactive user out of range");
            active &= ~user_bit(static_cast<int>(u));
        }
    } else if (cfg.draw) {
        // trial 0 of the outage estimator's stream, so --draw matches it
        for (int u = 1; u <= cfg.K; ++u)
            if (uniform01(cfg.seed, 0, static_cast<uint64_t>(u)) < cfg.p)
                active &= ~user_bit(u);
    }

    RobustDeliveryResult res = robust_place_and_deliver(rc, d, active, cfg.seed);

    detail::OutSink sink(cfg.out, out);
    std::ostream& rep = sink.stream();
    rep << "robust scenario: N=" << cfg.N << " K=" << cfg.K << " t=" << t << " a=" << a
        << " p=" << format_g15(cfg.p) << '\n';
    rep << "file bits: F=" << F << " parts m=" << rc.m << " coded n=" << rc.n << " expansion "
        << format_rational(rc.expansion()) << '\n';
    rep << "demand:";
    for (size_t i = 0; i < d.size(); ++i) rep << (i ? "," : " ") << d[i];
    rep << '\n';
    rep << "inactive users (" << res.inactive_count << "):";
    for (int u = 1; u <= cfg.K; ++u)
        if (!mask_has(active, u)) rep << ' ' << u;
    rep << '\n';
    rep << "feasible: " << detail::yes_no(res.feasible) << " (tolerates up to " << a << ")\n";
    for (const RobustUserResult& u : res.users) {
        rep << "user " << u.user << ": " << (u.active ? "active" : "inactive")
            << " cached=" << u.cached_blocks;
        if (u.active)
            rep << " received=" << u.received_blocks << " decoded=" << detail::yes_no(u.decoded)
                << " bit-exact=" << detail::yes_no(u.bit_exact)
                << " one-shot=" << detail::yes_no(u.one_shot);
        rep << '\n';
    }
    rep << "measured load (active senders): " << detail::load_string(res.measured_load) << '\n';
    Rational formula =
        d2d_per_demand(cfg.K, t, composition_of(d, cfg.N)) * rc.expansion();
    rep << "all-active formula load: " << detail::load_string(formula) << '\n';
    if (res.inactive_count == 0)
        rep << "measured equals formula: " << detail::yes_no(res.measured_load == formula) << '\n';
    if (cfg.p > 0.0)
        rep << "outage probability: "
            << format_g15(outage_probability(cfg.K, cfg.p, a).convert_to<double>()) << '\n';

    bool ok;
    if (res.feasible) {
        ok = res.all_active_ok() && (res.inactive_count > 0 || res.measured_load == formula);
        rep << "delivery: " << (ok ? "all active users served" : "FAILED") << '\n';
    } else {
        bool none_decoded = true;
        for (const RobustUserResult& u : res.users) none_decoded &= !u.decoded;
        ok = none_decoded;
        rep << "delivery: outage (" << res.inactive_count << " > " << a << ")"
            << (ok ? "" : ", yet some user decoded: FAILED") << '\n';
    }
    if (!ok) err << "inactivity: cross-check FAILED\n";
    return ok ? 0 : 1;
}

inline int cmd_inactivity_outage(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.a_values.size() != 1)
        throw std::invalid_argument("inactivity: pass exactly one -a value");
    int64_t a = cfg.a_values.front();
    Float50 exact = outage_probability(cfg.K, cfg.p, a);
    OutageEstimate est = monte_carlo_outage(cfg.K, cfg.p, a, cfg.trials, cfg.seed);

    detail::OutSink sink(cfg.out, out);
    std::ostream& rep = sink.stream();
    double exact_d = exact.convert_to<double>();
    // band on the true probability, so rare events with zero hits still pass
    double true_band =
        3.0 * std::sqrt(exact_d * (1.0 - exact_d) / static_cast<double>(est.trials));
    double band = std::max(est.half_width, true_band);
    bool ok = std::fabs(est.estimate - exact_d) <= band;
    rep << "outage: K=" << cfg.K << " p=" << format_g15(cfg.p) << " a=" << a << '\n';
    rep << "analytic: " << format_g15(exact_d) << '\n';
    rep << "estimate: " << format_g15(est.estimate) << " (hits " << est.hits << "/" << est.trials
        << ")\n";
    rep << "three-sigma band: " << format_g15(band) << '\n';
    rep << "within band: " << detail::yes_no(ok) << '\n';
    if (!ok) err << "inactivity: estimate outside the three-sigma band\n";
    return ok ? 0 : 1;
}

inline int cmd_inactivity(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    int modes = int(cfg.curve_mode) + int(cfg.simulate_mode) + int(cfg.outage_mode);
    if (modes != 1)
        throw std::invalid_argument(
            "inactivity: pick exactly one of --curve, --simulate, --outage");
    if (cfg.K < 2) throw std::invalid_argument("inactivity: pass -K");
    if (!cfg.outage_mode && cfg.N < 1) throw std::invalid_argument("inactivity: pass -N");
    if (cfg.curve_mode) return cmd_inactivity_curve(cfg, out);
    if (cfg.simulate_mode) return cmd_inactivity_simulate(cfg, out, err);
    return cmd_inactivity_outage(cfg, out, err);
}

// ---- repro --------------------------------------------------------------

inline int cmd_repro(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::vector<int> figures;
    if (cfg.figure == "2") figures = {2};
    else if (cfg.figure == "3") figures = {3};
    else if (cfg.figure == "all") figures = {2, 3};
    else throw std::invalid_argument("repro: --figure expects 2, 3, or all");

    detail::OutSink sink(cfg.out, out);
    CsvWriter csv(sink.stream());
    csv.row({"figure", "curve", "t", "M_ref", "R_ref", "R_model", "abs_dev", "rel_dev"});

    bool ok = true;
    for (int fig : figures) {
        for (const ReproCurve& rc : repro_figure(fig)) {
            for (const ReproPoint& pt : rc.points)
                csv.row({csv_int(fig), rc.curve->label, csv_int(pt.t), csv_float(pt.plotted_M),
                         csv_float(pt.plotted_R), csv_float(pt.model_R), csv_float(pt.abs_dev),
                         csv_float(pt.rel_dev)});
            ok &= rc.ok;
            err << "figure " << fig << " " << rc.curve->label << ": max "
                << (rc.absolute ? "abs" : "rel") << " dev " << format_g15(rc.max_dev) << " at t="
                << rc.argmax_t << " ("
                << (rc.sampled ? "reference sampled demands; noise band" : "exact") << " "
                << format_g15(rc.tolerance) << "): " << (rc.ok ? "ok" : "BEYOND TOLERANCE")
                << '\n';
        }
        if (fig == 3) {
            for (int64_t a : {int64_t{32}, int64_t{24}, int64_t{0}}) {
                double exact = outage_probability(kPlot3Setup.K, kPlot3Setup.p, a)
                                   .convert_to<double>();
                double hint = 0.0;
                for (const PlotCurve& c : figure3_curves())
                    if (c.a == a) hint = c.outage_hint;
                bool match = two_sig_figs(exact) == two_sig_figs(hint);
                ok &= match;
                err << "figure 3 outage legend a=" << a << ": " << format_g15(hint)
                    << " is the two-figure rounding of " << format_g15(exact) << ": "
                    << (match ? "ok" : "MISMATCH") << '\n';
            }
        }
    }
    err << "repro: " << (ok ? "all curves within documented tolerance" : "FAILED") << '\n';
    return ok ? 0 : 1;
}

// ---- argument parsing ----------------------------------------------------

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"device-to-device coded caching simulator"};
    app.name("cachesim");
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub, bool need_nk) {
        auto* n = sub->add_option("-N,--files", cfg.N, "number of files");
        auto* k = sub->add_option("-K,--users", cfg.K, "number of users");
        if (need_nk) {
            n->required();
            k->required();
        }
        sub->add_option("--out", cfg.out, "write output to this file instead of stdout");
    };

    CLI::App* sim = app.add_subcommand("simulate", "place, deliver, decode, and cross-check");
    add_common(sim, true);
    auto* sim_m = sim->add_option("-M,--memory", cfg.M, "cache size in files (rational)");
    auto* sim_t = sim->add_option("-t,--corner", cfg.t, "corner parameter KM/N");
    sim_m->excludes(sim_t);
    sim_t->excludes(sim_m);
    sim->add_option("-F,--file-bits", cfg.F, "bits per file (default: smallest valid)");
    sim->add_option("-d,--demand", cfg.demand, "q1,q2,... | worst | average | all")->required();
    sim->add_option("--seed", cfg.seed, "database seed");
    sim->add_option("--dump", cfg.dump, "write the broadcast log to this file");
    sim->add_flag("--envelope", cfg.envelope, "memory-share when KM/N is not an integer");
    sim->callback([&] { cfg.command = "simulate"; });

    CLI::App* bnd = app.add_subcommand("bounds", "trade-off curves and converse bounds as CSV");
    add_common(bnd, true);
    bnd->add_option("--grid", cfg.grid, "evaluate at M = lo:step:hi (rationals)");
    bnd->add_option("--curves", cfg.curves, "subset of curves to emit")->delimiter(',');
    bnd->callback([&] { cfg.command = "bounds"; });

    CLI::App* con = app.add_subcommand("converse", "per-type bound corners versus achievable");
    add_common(con, true);
    con->add_option("-t,--corner", cfg.t, "corner parameter KM/N")->required();
    bool report = false;
    con->add_flag("--report", report, "emit the per-type CSV report (the default)");
    con->callback([&] { cfg.command = "converse"; });

    CLI::App* ina = app.add_subcommand("inactivity", "robust scheme: curves and end-to-end runs");
    add_common(ina, false);
    ina->add_flag("--curve", cfg.curve_mode, "emit memory/load curves as CSV");
    ina->add_flag("--simulate", cfg.simulate_mode, "run the coded placement end to end");
    ina->add_flag("--outage", cfg.outage_mode, "compare analytic outage with a Monte Carlo run");
    ina->add_option("-p,--prob", cfg.p, "independent inactivity probability");
    ina->add_option("-a,--tolerated", cfg.a_values, "tolerated inactive users")->delimiter(',');
    ina->add_option("--kind", cfg.kind, "worst | average (curve mode)");
    ina->add_option("-t,--corner", cfg.t, "corner parameter KM/N");
    ina->add_option("-M,--memory", cfg.M, "cache size in files (rational)");
    ina->add_option("-F,--file-bits", cfg.F, "bits per file (default: smallest valid)");
    ina->add_option("-d,--demand", cfg.demand, "q1,q2,... | worst");
    ina->add_option("--inactive", cfg.inactive, "users that stay silent")->delimiter(',');
    ina->add_flag("--draw", cfg.draw, "sample the inactive set from p instead");
    ina->add_option("--seed", cfg.seed, "database and sampling seed");
    ina->add_option("--trials", cfg.trials, "Monte Carlo trials (outage mode)");
    ina->callback([&] { cfg.command = "inactivity"; });

    CLI::App* rep = app.add_subcommand("repro", "recompute the embedded reference plots");
    rep->add_option("--figure", cfg.figure, "2 | 3 | all");
    rep->add_option("--out", cfg.out, "write the CSV to this file instead of stdout");
    rep->callback([&] { cfg.command = "repro"; });

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cfg.command == "simulate") return cmd_simulate(cfg, out, err);
        if (cfg.command == "bounds") return cmd_bounds(cfg, out, err);
        if (cfg.command == "converse") return cmd_converse(cfg, out, err);
        if (cfg.command == "inactivity") return cmd_inactivity(cfg, out, err);
        if (cfg.command == "repro") return cmd_repro(cfg, out, err);
        err << "error: no subcommand\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace cachesim
