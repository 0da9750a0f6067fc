#include "subh/melnikov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "subh/parallel.hpp"
#include "subh/series.hpp"

namespace subh {

namespace {

bool resonant(const Mode& m, const ResonanceContext& ctx) {
    return m.nu0 * ctx.p + m.sigma0 * ctx.q == 0;
}

// Largest coefficient magnitude among resonant G modes; the scale against
// which "M does not respond to C" is judged.
double resonant_scale(const TrigSystem& sys, const ResonanceContext& ctx) {
    double s = 0.0;
    for (const auto& m : sys.g_modes())
        if (resonant(m, ctx)) s = std::max(s, m.poly.max_coeff());
    return s > 0.0 ? s : 1.0;
}

} // namespace

double melnikov_value(const TrigSystem& sys, const ResonanceContext& ctx, double t0, double C) {
    cplx s(0.0, 0.0);
    for (const auto& m : sys.g_modes())
        if (resonant(m, ctx))
            s += m.poly.eval(ctx.A0, C) * std::polar(1.0, m.sigma0 * t0);
    return s.real();
}

double melnikov_dC(const TrigSystem& sys, const ResonanceContext& ctx, double t0, double C) {
    cplx s(0.0, 0.0);
    for (const auto& m : sys.g_modes())
        if (resonant(m, ctx))
            s += m.poly.jet(0, 1, ctx.A0, C) * std::polar(1.0, m.sigma0 * t0);
    return s.real();
}

double melnikov_dt0(const TrigSystem& sys, const ResonanceContext& ctx, double t0, double C) {
    cplx s(0.0, 0.0);
    for (const auto& m : sys.g_modes())
        if (resonant(m, ctx))
            s += m.poly.eval(ctx.A0, C) * cplx(0.0, double(m.sigma0)) *
                 std::polar(1.0, m.sigma0 * t0);
    return s.real();
}

double melnikov_dalpha_avg(const TrigSystem& sys, const ResonanceContext& ctx, double t0,
                           double C) {
    cplx s(0.0, 0.0);
    for (const auto& m : sys.g_modes())
        if (resonant(m, ctx))
            s += m.poly.eval(ctx.A0, C) * cplx(0.0, double(m.nu0)) *
                 std::polar(1.0, m.sigma0 * t0);
    return s.real();
}

C0Result solve_C0(const TrigSystem& sys, const ResonanceContext& ctx, double t0, double bracket) {
    if (!(bracket > 0.0)) throw ConfigError("solve_C0 bracket must be positive");
    const double scale = resonant_scale(sys, ctx);
    const double dtol = 1e-10 * scale;
    auto M = [&](double C) { return melnikov_value(sys, ctx, t0, C); };
    auto dM = [&](double C) { return melnikov_dC(sys, ctx, t0, C); };

    // A forcing that never responds to C cannot be balanced by friction.
    {
        double dmax = 0.0, mmax = 0.0;
        for (int i = 0; i <= 16; ++i) {
            double C = -bracket + 2.0 * bracket * double(i) / 16.0;
            dmax = std::max(dmax, std::abs(dM(C)));
            mmax = std::max(mmax, std::abs(M(C)));
        }
        if (dmax < dtol) {
            if (mmax < 1e-14 * scale)
                throw MelnikovDegenerate(
                    "averaged forcing vanishes identically; every C is a degenerate root");
            throw MelnikovDegenerate(
                "averaged forcing does not respond to the friction parameter");
        }
    }

    auto polish = [&](double C) {
        for (int i = 0; i < 60; ++i) {
            double d = dM(C);
            if (std::abs(d) < dtol) break;
            double step = M(C) / d;
            C -= step;
            if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(C))) break;
        }
        return C;
    };

    double b = bracket;
    for (int expand = 0; expand <= 10; ++expand, b *= 2.0) {
        // Scan for the sign change nearest C = 0.
        const int N = 256;
        double best_lo = 0.0, best_hi = 0.0, best_mid = 1e308;
        bool found = false;
        double prevC = -b, prevM = M(prevC);
        for (int i = 1; i <= N; ++i) {
            double C = -b + 2.0 * b * double(i) / N;
            double v = M(C);
            if (prevM == 0.0) {
                double mid = std::abs(prevC);
                if (mid < best_mid) { best_lo = best_hi = prevC; best_mid = mid; found = true; }
            } else if (prevM * v < 0.0) {
                double mid = std::abs(0.5 * (prevC + C));
                if (mid < best_mid) { best_lo = prevC; best_hi = C; best_mid = mid; found = true; }
            }
            prevC = C;
            prevM = v;
        }
        if (!found) continue;
        double lo = best_lo, hi = best_hi;
        if (lo != hi) {
            double flo = M(lo);
            for (int i = 0; i < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo) + std::abs(hi));
                 ++i) {
                double mid = 0.5 * (lo + hi), fm = M(mid);
                if (fm == 0.0) { lo = hi = mid; break; }
                if (flo * fm < 0.0) hi = mid;
                else { lo = mid; flo = fm; }
            }
        }
        double C0 = polish(0.5 * (lo + hi));
        double D = dM(C0);
        if (std::abs(D) < dtol)
            throw MelnikovDegenerate("averaged forcing has a degenerate root in C (dM/dC = 0)");
        return {C0, D};
    }

    // No sign change anywhere: a root of even multiplicity might still hide
    // from the scan, so give Newton a chance before giving up.
    for (double start : {0.0, bracket * 0.5, -bracket * 0.5}) {
        double C = polish(start);
        if (std::abs(M(C)) <= 1e-10 * scale) {
            double D = dM(C);
            if (std::abs(D) < dtol)
                throw MelnikovDegenerate(
                    "averaged forcing has a degenerate root in C (dM/dC = 0)");
            return {C, D};
        }
    }
    throw MelnikovNoRoot("averaged forcing has no root in C inside the expanded bracket");
}

MelnikovCurve melnikov_curve(const TrigSystem& sys, const ResonanceContext& ctx, int n_grid,
                             double bracket, int threads) {
    if (n_grid < 2) throw ConfigError("melnikov_curve needs at least 2 grid points");
    MelnikovCurve out;
    out.t0_grid.resize(std::size_t(n_grid));
    out.C0_values.resize(std::size_t(n_grid));
    out.D_values.resize(std::size_t(n_grid));
    for (int i = 0; i < n_grid; ++i)
        out.t0_grid[std::size_t(i)] = 2.0 * M_PI * double(i) / double(n_grid);

    parallel_for(n_grid, threads, [&](int i) {
        double t0 = out.t0_grid[std::size_t(i)];
        auto tag = [t0](const Error& e) {
            std::ostringstream os;
            os << e.what() << " (at t0 = " << t0 << ")";
            return os.str();
        };
        try {
            C0Result r = solve_C0(sys, ctx, t0, bracket);
            out.C0_values[std::size_t(i)] = r.C0;
            out.D_values[std::size_t(i)] = r.D;
        } catch (const MelnikovNoRoot& e) {
            throw MelnikovNoRoot(tag(e));
        } catch (const MelnikovDegenerate& e) {
            throw MelnikovDegenerate(tag(e));
        }
    });

    // Exact Fourier degree of the sampled row.
    const int N = n_grid;
    double cmax = 0.0;
    std::vector<double> mag(std::size_t(N / 2 + 1), 0.0);
    for (int m = 0; m <= N / 2; ++m) {
        cplx c(0.0, 0.0);
        for (int j = 0; j < N; ++j)
            c += out.C0_values[std::size_t(j)] *
                 std::polar(1.0, -2.0 * M_PI * double(m) * double(j) / double(N));
        mag[std::size_t(m)] = std::abs(c) / double(N);
        cmax = std::max(cmax, mag[std::size_t(m)]);
    }
    out.trig_degree = 0;
    for (int m = N / 2; m >= 1; --m)
        if (mag[std::size_t(m)] > 1e-9 * std::max(cmax, 1e-300)) {
            out.trig_degree = m;
            break;
        }
    return out;
}

double melnikov_planar(const PlanarField& f_field, const PlanarField& g_field,
                       const PlanarOrbit& orbit, double t0) {
    const std::size_t n = orbit.samples.size();
    if (n < 3 || !(orbit.period > 0.0)) throw BadOrbit("orbit sampling is empty or unusable");
    const Vec2& a = orbit.samples.front();
    const Vec2& b = orbit.samples.back();
    double scale = 0.0;
    for (const auto& s : orbit.samples)
        scale = std::max({scale, std::abs(s[0]), std::abs(s[1])});
    double gap = std::hypot(a[0] - b[0], a[1] - b[1]);
    if (gap > 1e-8 * std::max(scale, 1.0))
        throw BadOrbit("orbit sampling does not close up over one period");

    // Uniform samples of a periodic integrand: the trapezoid rule is
    // spectrally accurate. The duplicated endpoint carries half weight twice.
    const std::size_t steps = n - 1;
    const double dt = orbit.period / double(steps);
    double sum = 0.0;
    for (std::size_t j = 0; j < steps; ++j) {
        double t = dt * double(j);
        Vec2 x = orbit.samples[j];
        Vec2 f = f_field(x, t);
        Vec2 g = g_field(x, t + t0);
        sum += f[0] * g[1] - f[1] * g[0];
    }
    return sum * dt / orbit.period;
}

HierarchyResult melnikov_hierarchy(const TrigSystem& sys, const ResonanceContext& ctx,
                                   double C_fixed, int K, const std::vector<double>& t0_grid) {
    if (t0_grid.empty()) throw ConfigError("hierarchy needs a nonempty t0 grid");
    if (K < 0) throw ConfigError("hierarchy order K must be nonnegative");

    HierarchyResult out;
    const double scale = jets_at(sys, ctx, C_fixed, 1).scale();
    const double tol = 1e-10 * std::max(scale, 1e-300);

    // Order 0 is the averaged forcing itself.
    HierarchyLevel l0;
    l0.k = 0;
    for (double t0 : t0_grid) {
        double v = melnikov_value(sys, ctx, t0, C_fixed);
        l0.values.push_back(v);
        l0.max_abs = std::max(l0.max_abs, std::abs(v));
    }
    out.levels.push_back(std::move(l0));
    if (out.levels.back().max_abs > tol) {
        out.kstar = 0;
        return out;
    }

    std::vector<SeriesState> states;
    states.reserve(t0_grid.size());
    for (double t0 : t0_grid)
        states.push_back(SeriesState::init_hierarchy(sys, ctx, t0, C_fixed));

    for (int k = 1; k <= K; ++k) {
        HierarchyLevel lv;
        lv.k = k;
        lv.values.resize(t0_grid.size());
        for (std::size_t i = 0; i < states.size(); ++i) {
            states[i].compute_order();
            lv.values[i] = states[i].obstruction(k);
            lv.max_abs = std::max(lv.max_abs, std::abs(lv.values[i]));
        }
        out.levels.push_back(std::move(lv));
        if (out.levels.back().max_abs > tol) {
            out.kstar = k;
            return out;
        }
    }
    out.exhausted = true;
    return out;
}

} // namespace subh
