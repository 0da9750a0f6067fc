#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subh/bifurcation.hpp"
#include "subh/config.hpp"
#include "subh/errors.hpp"
#include "subh/mechanical.hpp"
#include "subh/melnikov.hpp"
#include "subh/oracle.hpp"
#include "subh/series.hpp"
#include "subh/trees.hpp"
#include "subh/trig_system.hpp"

namespace {

using namespace subh;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

// Machine output goes to --out atomically (temp file, then rename) or to
// stdout when no path was given.
void emit_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::fputs(content.c_str(), stdout);
        return;
    }
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path dir = target.parent_path();
    fs::path tmp = (dir.empty() ? fs::path(".") : dir) / (target.filename().string() + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ConfigError("cannot open output file " + tmp.string());
        os << content;
        os.flush();
        if (!os) throw ConfigError("failed while writing " + tmp.string());
    }
    fs::rename(tmp, target);
}

// Grid mini-language: log:a:b:n (geometric) or lin:a:b:n (arithmetic),
// n points from a to b inclusive. two_sided prepends the negated mirror.
std::vector<double> parse_eps_grid(const std::string& spec, bool two_sided) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 4 || (parts[0] != "log" && parts[0] != "lin"))
        throw ConfigError("grid spec must be log:a:b:n or lin:a:b:n, got '" + spec + "'");
    double a, b;
    long n;
    try {
        a = std::stod(parts[1]);
        b = std::stod(parts[2]);
        n = std::stol(parts[3]);
    } catch (const std::exception&) {
        throw ConfigError("malformed grid spec '" + spec + "'");
    }
    if (n < 1 || n > 1000000) throw ConfigError("grid point count out of range in '" + spec + "'");
    bool logspace = parts[0] == "log";
    if (logspace && (a <= 0.0 || b <= 0.0))
        throw ConfigError("log grid endpoints must be positive in '" + spec + "'");
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        double s = n == 1 ? 0.0 : double(i) / double(n - 1);
        grid[std::size_t(i)] = logspace ? a * std::pow(b / a, s) : a + (b - a) * s;
    }
    if (two_sided) {
        std::vector<double> full;
        full.reserve(grid.size() * 2);
        for (auto it = grid.rbegin(); it != grid.rend(); ++it) full.push_back(-*it);
        full.insert(full.end(), grid.begin(), grid.end());
        return full;
    }
    return grid;
}

struct Options {
    std::string config;
    std::string out;
    int p = 1;
    int q = 1;
    int order = 4;
    int t0_grid = 0;
    int threads = 0;
    double a_lo = -10.0;
    double a_hi = 10.0;
    double c_bracket = 10.0;
    double e_lo = 1e-4;
    double e_hi = 100.0;
};

TrigSystem load_trig(const Options& opt) {
    if (opt.config.empty()) throw ConfigError("--config is required");
    return parse_system_file(opt.config);
}

MechanicalSystem load_mech(const Options& opt) {
    if (opt.config.empty()) throw ConfigError("--config is required");
    return parse_mechanical_file(opt.config);
}

Rhs trig_rhs(const TrigSystem& sys, double eps, double C) {
    return [&sys, eps, C](double t, const Vec2& y) -> Vec2 {
        return {sys.omega(y[1]) + eps * sys.eval_F(y[0], y[1], C, t),
                eps * sys.eval_G(y[0], y[1], C, t)};
    };
}

void json_spectrum(std::ostringstream& os, const Spectrum& s) {
    os << "[";
    bool first = true;
    for (const auto& [nu, v] : s) {
        if (!first) os << ",";
        first = false;
        os << "[" << nu << "," << fmt(v.real()) << "," << fmt(v.imag()) << "]";
    }
    os << "]";
}

int phase_grid_size(const TrigSystem& sys, const Options& opt) {
    return opt.t0_grid > 0 ? opt.t0_grid : default_grid_size(sys, std::max(opt.order, 1));
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

void run_melnikov(const Options& opt, bool mechanical, bool hierarchy, double fixed_C) {
    if (mechanical) {
        MechanicalSystem mech = load_mech(opt);
        Orbit orbit = orbit_with_period(mech, 2.0 * M_PI * opt.q / opt.p, opt.e_lo, opt.e_hi);
        int n = opt.t0_grid > 0 ? opt.t0_grid : 64;
        std::string csv = "t0,C0,D\n";
        for (int i = 0; i < n; ++i) {
            double t0 = 2.0 * M_PI * i / n;
            double C0 = mechanical_C0(mech, orbit, opt.p, opt.q, t0);
            // D is the exact friction response of the normalized threshold
            // function -C + C0(t0).
            csv += fmt(t0) + "," + fmt(C0) + "," + fmt(-1.0) + "\n";
        }
        emit_output(opt.out, csv);
        return;
    }
    TrigSystem sys = load_trig(opt);
    ResonanceContext ctx = resonance_context(sys, opt.p, opt.q, opt.a_lo, opt.a_hi);
    int n = phase_grid_size(sys, opt);
    if (hierarchy) {
        std::vector<double> grid(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) grid[std::size_t(i)] = 2.0 * M_PI * i / n;
        HierarchyResult hr = melnikov_hierarchy(sys, ctx, fixed_C, opt.order, grid);
        std::ostringstream os;
        os << "{\"C_fixed\":" << fmt(fixed_C) << ",\"K\":" << opt.order
           << ",\"kstar\":" << hr.kstar
           << ",\"exhausted\":" << (hr.exhausted ? "true" : "false") << ",\"t0_grid\":[";
        for (int i = 0; i < n; ++i) os << (i ? "," : "") << fmt(grid[std::size_t(i)]);
        os << "],\"levels\":[";
        for (std::size_t L = 0; L < hr.levels.size(); ++L) {
            const HierarchyLevel& lv = hr.levels[L];
            os << (L ? "," : "") << "{\"k\":" << lv.k << ",\"max_abs\":" << fmt(lv.max_abs)
               << ",\"values\":[";
            for (std::size_t i = 0; i < lv.values.size(); ++i)
                os << (i ? "," : "") << fmt(lv.values[i]);
            os << "]}";
        }
        os << "]}\n";
        emit_output(opt.out, os.str());
        return;
    }
    MelnikovCurve curve = melnikov_curve(sys, ctx, n, opt.c_bracket, opt.threads);
    std::string csv = "t0,C0,D\n";
    for (std::size_t i = 0; i < curve.t0_grid.size(); ++i)
        csv += fmt(curve.t0_grid[i]) + "," + fmt(curve.C0_values[i]) + "," +
               fmt(curve.D_values[i]) + "\n";
    emit_output(opt.out, csv);
}

void run_series(const Options& opt, double t0, const std::string& mode, double fixed_C) {
    TrigSystem sys = load_trig(opt);
    ResonanceContext ctx = resonance_context(sys, opt.p, opt.q, opt.a_lo, opt.a_hi);
    SeriesState st = mode == "c" ? SeriesState::init_c_mode(sys, ctx, t0, opt.c_bracket)
                                 : SeriesState::init_fixed_phase(sys, ctx, t0, fixed_C);
    st.compute_to(opt.order);
    std::ostringstream os;
    os << "{\"t0\":" << fmt(t0) << ",\"mode\":\"" << (mode == "c" ? "c" : "fixed") << "\",";
    if (mode == "c") {
        os << "\"C\":[";
        for (int k = 0; k <= opt.order; ++k) os << (k ? "," : "") << fmt(st.C(k));
        os << "],";
    } else {
        os << "\"C_fixed\":" << fmt(fixed_C) << ",\"alpha_bar\":[";
        for (int k = 0; k <= opt.order; ++k) os << (k ? "," : "") << fmt(st.alpha_bar(k));
        os << "],";
    }
    os << "\"orders\":[";
    for (int k = 0; k <= opt.order; ++k) {
        os << (k ? "," : "") << "{\"k\":" << k << ",\"alpha\":";
        json_spectrum(os, st.alpha(k));
        os << ",\"A\":";
        json_spectrum(os, st.A(k));
        os << "}";
    }
    os << "]}\n";
    emit_output(opt.out, os.str());
}

void run_curves(const Options& opt, const std::string& eps_spec, bool two_sided) {
    TrigSystem sys = load_trig(opt);
    ResonanceContext ctx = resonance_context(sys, opt.p, opt.q, opt.a_lo, opt.a_hi);
    CSurface surf = c_surface(sys, ctx, opt.order, opt.t0_grid, opt.c_bracket, opt.threads);
    std::vector<double> grid = parse_eps_grid(eps_spec, two_sided);
    BifurcationCurves bc = bifurcation_curves(surf, grid);
    std::string csv = "eps,gamma1,gamma2,tau1,tau2\n";
    for (std::size_t i = 0; i < bc.eps.size(); ++i)
        csv += fmt(bc.eps[i]) + "," + fmt(bc.gamma1[i]) + "," + fmt(bc.gamma2[i]) + "," +
               fmt(bc.tau1[i]) + "," + fmt(bc.tau2[i]) + "\n";
    emit_output(opt.out, csv);
}

void run_count(const Options& opt, double eps, double gamma) {
    TrigSystem sys = load_trig(opt);
    ResonanceContext ctx = resonance_context(sys, opt.p, opt.q, opt.a_lo, opt.a_hi);
    CSurface surf = c_surface(sys, ctx, opt.order, opt.t0_grid, opt.c_bracket, opt.threads);
    SubharmonicCount sc = count_subharmonics(surf, ctx, eps, gamma);
    std::printf("%d\n", sc.count);
    if (!opt.out.empty()) {
        std::ostringstream os;
        os << "{\"count\":" << sc.count << ",\"roots\":[";
        for (std::size_t i = 0; i < sc.roots.size(); ++i) os << (i ? "," : "") << fmt(sc.roots[i]);
        os << "],\"outside\":" << (sc.outside ? "true" : "false")
           << ",\"tangent\":" << (sc.tangent ? "true" : "false") << "}\n";
        emit_output(opt.out, os.str());
    }
}

void run_trees(const Options& opt, int kmax, double t0) {
    TrigSystem sys = load_trig(opt);
    ResonanceContext ctx = resonance_context(sys, opt.p, opt.q, opt.a_lo, opt.a_hi);
    SeriesState st = SeriesState::init_c_mode(sys, ctx, t0, opt.c_bracket);
    st.compute_to(kmax);
    int cap = std::max(3, kmax);
    int base = std::max(1, sys.max_base_index(opt.p, opt.q));
    std::string csv = "k,h,nu,tree_re,tree_im,series_re,series_im,abs_diff\n";
    for (int k = 1; k <= kmax; ++k) {
        for (Branch h : {Branch::Phase, Branch::Action, Branch::Param}) {
            int R = h == Branch::Param ? 0 : k * base;
            for (int nu = -R; nu <= R; ++nu) {
                if (h == Branch::Phase && nu == 0) continue;
                cplx tv = tree_sum(sys, ctx, t0, k, h, nu, cap);
                cplx sv;
                if (h == Branch::Phase) sv = st.alpha(k).at(nu);
                else if (h == Branch::Action) sv = st.A(k).at(nu);
                else sv = cplx(st.C(k), 0.0);
                csv += std::to_string(k) + "," + branch_name(h) + "," + std::to_string(nu) +
                       "," + fmt(tv.real()) + "," + fmt(tv.imag()) + "," + fmt(sv.real()) +
                       "," + fmt(sv.imag()) + "," + fmt(std::abs(tv - sv)) + "\n";
            }
        }
    }
    emit_output(opt.out, csv);
}

void run_verify(const Options& opt, double eps, double C, bool have_t0, double t0_user) {
    TrigSystem sys = load_trig(opt);
    ResonanceContext ctx = resonance_context(sys, opt.p, opt.q, opt.a_lo, opt.a_hi);
    const double T = 2.0 * M_PI * opt.q;
    const double drift = 2.0 * M_PI * opt.p;

    struct Seed {
        double t0 = 0.0;
        double C_pred = 0.0;
        Vec2 ic{0.0, 0.0};
    };
    std::vector<Seed> seeds;
    std::exception_ptr last_hyp;
    auto add_seed = [&](double t0) {
        try {
            SeriesState st = SeriesState::init_c_mode(sys, ctx, t0, opt.c_bracket);
            st.compute_to(opt.order);
            StatePoint sp = st.evaluate(eps, -t0);
            seeds.push_back({t0, st.C_of_eps(eps), {sp.alpha, sp.A}});
        } catch (const HypothesisError&) {
            last_hyp = std::current_exception();
        }
    };
    if (have_t0) {
        add_seed(t0_user);
    } else {
        for (int i = 0; i < 16; ++i) add_seed(2.0 * M_PI * i / 16);
    }
    if (seeds.empty()) {
        if (last_hyp) std::rethrow_exception(last_hyp);
        throw NoConvergence("no usable series seed for the shooting iteration");
    }
    std::stable_sort(seeds.begin(), seeds.end(), [&](const Seed& a, const Seed& b) {
        return std::abs(a.C_pred - C) < std::abs(b.C_pred - C);
    });

    Rhs rhs = trig_rhs(sys, eps, C);
    PeriodicOrbit best{};
    double best_t0 = seeds.front().t0;
    bool first = true;
    for (const Seed& s : seeds) {
        PeriodicOrbit r = try_shoot_periodic(rhs, s.ic, T, drift);
        if (first || r.defect < best.defect) {
            best = r;
            best_t0 = s.t0;
            first = false;
        }
        if (r.converged) break;
    }
    std::ostringstream os;
    os << "{\"eps\":" << fmt(eps) << ",\"C\":" << fmt(C)
       << ",\"converged\":" << (best.converged ? "true" : "false")
       << ",\"defect\":" << fmt(best.defect) << ",\"orbit_ic\":[" << fmt(best.ic[0]) << ","
       << fmt(best.ic[1]) << "],\"iterations\":" << best.iterations
       << ",\"t0_seed\":" << fmt(best_t0) << "}\n";
    emit_output(opt.out, os.str());
    if (!best.converged)
        throw NoConvergence("shooting did not converge from any series seed at eps = " +
                            fmt(eps) + ", C = " + fmt(C));
}

void run_scan(const Options& opt, const std::string& eps_spec, bool mechanical, double c_lo,
              double c_hi) {
    std::vector<double> grid = parse_eps_grid(eps_spec, false);
    if (std::isnan(c_lo)) c_lo = -opt.c_bracket;
    if (std::isnan(c_hi)) c_hi = opt.c_bracket;
    std::string csv = "eps,C_max_hat,C_min_hat\n";

    if (mechanical) {
        MechanicalSystem mech = load_mech(opt);
        Orbit orbit = orbit_with_period(mech, 2.0 * M_PI * opt.q / opt.p, opt.e_lo, opt.e_hi);
        const double T = 2.0 * M_PI * opt.q;
        std::vector<Vec2> ics;
        double cmax = -std::numeric_limits<double>::infinity(), cmin = -cmax;
        for (int i = 0; i < 16; ++i) {
            double t0 = 2.0 * M_PI * i / 16;
            ics.push_back(orbit.at(t0));
            double c0 = mechanical_C0(mech, orbit, opt.p, opt.q, t0);
            cmax = std::max(cmax, c0);
            cmin = std::min(cmin, c0);
        }
        double C_inner = 0.5 * (cmax + cmin);
        for (double eps : grid) {
            auto make_rhs = [&](double C) { return mechanical_rhs(mech, eps, C); };
            auto seeds_for = [&](double) { return ics; };
            EmpiricalThresholds th =
                empirical_curve(make_rhs, seeds_for, T, 0.0, C_inner, c_lo, c_hi);
            if (th.upper_saturated || th.lower_saturated)
                std::fprintf(stderr, "warning: existence region reaches the C bracket at eps = %s\n",
                             fmt(eps).c_str());
            csv += fmt(eps) + "," + fmt(th.C_max_hat) + "," + fmt(th.C_min_hat) + "\n";
        }
        emit_output(opt.out, csv);
        return;
    }

    TrigSystem sys = load_trig(opt);
    ResonanceContext ctx = resonance_context(sys, opt.p, opt.q, opt.a_lo, opt.a_hi);
    const double T = 2.0 * M_PI * opt.q;
    const double drift = 2.0 * M_PI * opt.p;
    std::vector<SeriesState> states;
    std::vector<double> t0s;
    std::exception_ptr last_hyp;
    for (int i = 0; i < 16; ++i) {
        double t0 = 2.0 * M_PI * i / 16;
        try {
            SeriesState st = SeriesState::init_c_mode(sys, ctx, t0, opt.c_bracket);
            st.compute_to(opt.order);
            states.push_back(std::move(st));
            t0s.push_back(t0);
        } catch (const HypothesisError&) {
            last_hyp = std::current_exception();
        }
    }
    if (states.empty()) {
        if (last_hyp) std::rethrow_exception(last_hyp);
        throw NoConvergence("no usable series seed for the shooting iteration");
    }
    for (double eps : grid) {
        std::vector<double> Cp(states.size());
        std::vector<Vec2> ics(states.size());
        double cmax = -std::numeric_limits<double>::infinity(), cmin = -cmax;
        for (std::size_t j = 0; j < states.size(); ++j) {
            Cp[j] = states[j].C_of_eps(eps);
            StatePoint sp = states[j].evaluate(eps, -t0s[j]);
            ics[j] = {sp.alpha, sp.A};
            cmax = std::max(cmax, Cp[j]);
            cmin = std::min(cmin, Cp[j]);
        }
        double C_inner = 0.5 * (cmax + cmin);
        auto make_rhs = [&](double C) { return trig_rhs(sys, eps, C); };
        auto seeds_for = [&](double C) {
            std::vector<std::size_t> idx(ics.size());
            for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                return std::abs(Cp[a] - C) < std::abs(Cp[b] - C);
            });
            std::vector<Vec2> ordered;
            ordered.reserve(idx.size());
            for (std::size_t j : idx) ordered.push_back(ics[j]);
            return ordered;
        };
        EmpiricalThresholds th = empirical_curve(make_rhs, seeds_for, T, drift, C_inner, c_lo, c_hi);
        if (th.upper_saturated || th.lower_saturated)
            std::fprintf(stderr, "warning: existence region reaches the C bracket at eps = %s\n",
                         fmt(eps).c_str());
        csv += fmt(eps) + "," + fmt(th.C_max_hat) + "," + fmt(th.C_min_hat) + "\n";
    }
    emit_output(opt.out, csv);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Subharmonic continuation toolkit: averaged thresholds, perturbation series, "
                 "bifurcation curves, and direct-integration verification for periodically "
                 "forced one-frequency systems"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--config", opt.config, "system description file (TOML)");
    app.add_option("--p", opt.p, "resonance numerator: oscillator cycles per period");
    app.add_option("--q", opt.q, "resonance denominator: forcing periods per period");
    app.add_option("--order", opt.order, "series truncation order K")->check(CLI::Range(0, 64));
    app.add_option("--t0-grid", opt.t0_grid, "phase grid size override (0 = automatic)");
    app.add_option("--threads", opt.threads,
                   "worker thread cap (0 = SUBH_THREADS or hardware)");
    app.add_option("--a-lo", opt.a_lo, "action bracket lower end for the resonance solve");
    app.add_option("--a-hi", opt.a_hi, "action bracket upper end for the resonance solve");
    app.add_option("--c-bracket", opt.c_bracket, "search bracket half-width for C roots");
    app.add_option("--e-lo", opt.e_lo, "energy bracket lower end (mechanical orbits)");
    app.add_option("--e-hi", opt.e_hi, "energy bracket upper end (mechanical orbits)");
    app.add_option("--out", opt.out, "output file (default: stdout)");

    auto* cmd_mel = app.add_subcommand("melnikov", "averaged-forcing threshold curve C0(t0)");
    bool mel_mechanical = false, mel_hierarchy = false;
    double mel_fixed_C = 0.0;
    cmd_mel->add_flag("--mechanical", mel_mechanical, "use the mechanical-oscillator pipeline");
    cmd_mel->add_flag("--hierarchy", mel_hierarchy,
                      "fixed-C obstruction hierarchy M_k instead of the root curve");
    cmd_mel->add_option("--fixed-C", mel_fixed_C, "C value for --hierarchy");

    auto* cmd_ser = app.add_subcommand("series", "order-by-order coefficients at one phase");
    double ser_t0 = 0.0, ser_fixed_C = 0.0;
    std::string ser_mode = "c";
    cmd_ser->add_option("--t0", ser_t0, "initial phase")->required();
    cmd_ser->add_option("--mode", ser_mode, "c (solve for C) or fixed (phase corrections)")
        ->check(CLI::IsMember({"c", "fixed"}));
    cmd_ser->add_option("--fixed-C", ser_fixed_C, "C value for --mode fixed");

    auto* cmd_cur = app.add_subcommand("curves", "bifurcation curves over an eps grid");
    std::string cur_eps;
    bool cur_two_sided = false;
    cmd_cur->add_option("--eps", cur_eps, "eps grid, log:a:b:n or lin:a:b:n")->required();
    cmd_cur->add_flag("--two-sided", cur_two_sided, "mirror the grid to negative eps");

    auto* cmd_cnt = app.add_subcommand("count", "subharmonic solution count at (eps, gamma)");
    double cnt_eps = 0.0, cnt_gamma = 0.0;
    cmd_cnt->add_option("--eps", cnt_eps, "perturbation size")->required();
    cmd_cnt->add_option("--gamma", cnt_gamma, "friction value gamma = eps C")->required();

    auto* cmd_tre = app.add_subcommand("trees", "expansion-tree cross-check of the recursion");
    bool tre_check = false;
    int tre_kmax = 2;
    double tre_t0 = 0.5;
    cmd_tre->add_flag("--check", tre_check, "compare tree sums against the recursion (default)");
    cmd_tre->add_option("--kmax", tre_kmax, "highest order to compare")->check(CLI::Range(1, 6));
    cmd_tre->add_option("--t0", tre_t0, "phase at which to compare");

    auto* cmd_ver = app.add_subcommand("verify", "shoot for a periodic orbit at (eps, C)");
    double ver_eps = 0.0, ver_C = 0.0, ver_t0 = 0.0;
    cmd_ver->add_option("--eps", ver_eps, "perturbation size")->required();
    cmd_ver->add_option("--C", ver_C, "friction parameter")->required();
    auto* ver_t0_opt = cmd_ver->add_option("--t0", ver_t0, "seed phase (default: best of 16)");

    auto* cmd_scn = app.add_subcommand("scan", "empirical existence thresholds over an eps grid");
    std::string scn_eps;
    bool scn_mechanical = false;
    double scn_c_lo = std::numeric_limits<double>::quiet_NaN();
    double scn_c_hi = std::numeric_limits<double>::quiet_NaN();
    cmd_scn->add_option("--eps", scn_eps, "eps grid, log:a:b:n or lin:a:b:n")->required();
    cmd_scn->add_option("--c-lo", scn_c_lo, "lower end of the C search bracket");
    cmd_scn->add_option("--c-hi", scn_c_hi, "upper end of the C search bracket");
    cmd_scn->add_flag("--mechanical", scn_mechanical, "use the mechanical-oscillator pipeline");

    for (auto* sub : {cmd_mel, cmd_ser, cmd_cur, cmd_cnt, cmd_tre, cmd_ver, cmd_scn})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    (void)tre_check;

    try {
        if (cmd_mel->parsed()) run_melnikov(opt, mel_mechanical, mel_hierarchy, mel_fixed_C);
        else if (cmd_ser->parsed()) run_series(opt, ser_t0, ser_mode, ser_fixed_C);
        else if (cmd_cur->parsed()) run_curves(opt, cur_eps, cur_two_sided);
        else if (cmd_cnt->parsed()) run_count(opt, cnt_eps, cnt_gamma);
        else if (cmd_tre->parsed()) run_trees(opt, tre_kmax, tre_t0);
        else if (cmd_ver->parsed()) run_verify(opt, ver_eps, ver_C, ver_t0_opt->count() > 0, ver_t0);
        else if (cmd_scn->parsed()) run_scan(opt, scn_eps, scn_mechanical, scn_c_lo, scn_c_hi);
    } catch (const HypothesisError& e) {
        std::fprintf(stderr, "hypothesis violation: %s\n", e.what());
        return 2;
    } catch (const NoConvergence& e) {
        std::fprintf(stderr, "no convergence: %s\n", e.what());
        return 3;
    } catch (const NoExistenceAnywhere& e) {
        std::fprintf(stderr, "no convergence: %s\n", e.what());
        return 3;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 4;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
