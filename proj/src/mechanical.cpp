#include "subh/mechanical.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "subh/bifurcation.hpp"
#include "subh/parallel.hpp"

namespace subh {

namespace {

constexpr double TWO_PI = 6.283185307179586476925286766559;

Rhs free_rhs(const MechanicalSystem& mech) {
    return [mech](double, const Vec2& z) { return Vec2{z[1], -mech.eval_g(z[0])}; };
}

// Right turning point x > 0 with V(x) = E.
double turning_point(const MechanicalSystem& mech, double E) {
    if (!(E > 0.0)) throw BadOrbit("orbit energy must exceed the well minimum");
    double hi = 1e-3;
    int i = 0;
    while (mech.potential(hi) < E) {
        hi *= 2.0;
        if (++i > 60) throw BadOrbit("potential never reaches the requested energy");
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (mech.potential(mid) < E ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {
        double g = mech.eval_g(x);
        if (g == 0.0) break;
        x -= (mech.potential(x) - E) / g;
    }
    return x;
}

Orbit build_orbit(const MechanicalSystem& mech, double E, double ode_tol) {
    Orbit orbit;
    orbit.E = E;
    orbit.x_turn = turning_point(mech, E);

    Rhs rhs = free_rhs(mech);
    Vec2 start{orbit.x_turn, 0.0};
    double horizon = 50.0;
    for (int round = 0;; ++round) {
        Trajectory probe = integrate(rhs, start, 0.0, horizon, ode_tol);
        auto crossings = section_crossings(probe, 1, 1e-12, 2);
        if (crossings.size() >= 2) {
            orbit.period = crossings[1];
            break;
        }
        if (round >= 5) throw BadOrbit("orbit does not close up; no period found");
        horizon *= 4.0;
    }
    orbit.traj = integrate(rhs, start, 0.0, orbit.period, ode_tol);
    return orbit;
}

} // namespace

MechanicalSystem::MechanicalSystem(RealPoly g, std::vector<MechMode> f_modes, bool realify)
    : g_(std::move(g)) {
    if (!g_.coeffs().empty() && g_.coeffs()[0] != 0.0)
        throw ConfigError("restoring force must vanish at the origin");
    {
        std::vector<double> v(g_.coeffs().size() + 1, 0.0);
        for (std::size_t i = 0; i < g_.coeffs().size(); ++i)
            v[i + 1] = g_.coeffs()[i] / double(i + 1);
        V_ = RealPoly(std::move(v));
    }

    double scale = 0.0;
    for (const auto& m : f_modes)
        for (const auto& c : m.coeff) scale = std::max(scale, std::abs(c));
    double tol = 1e-14 * std::max(scale, 1e-300);

    std::map<int, const MechMode*> by_sigma;
    for (const auto& m : f_modes) {
        if (by_sigma.count(m.sigma)) throw ConfigError("duplicate forcing harmonic");
        by_sigma[m.sigma] = &m;
    }
    for (const auto& [sigma, m] : by_sigma) {
        if (sigma == 0) {
            for (const auto& c : m->coeff)
                if (std::abs(c.imag()) > tol)
                    throw RealityError("zero-frequency forcing harmonic must be real");
            continue;
        }
        auto partner = by_sigma.find(-sigma);
        if (partner == by_sigma.end()) {
            if (!realify)
                throw RealityError("forcing harmonic lacks its conjugate partner");
            continue;
        }
        const auto& a = m->coeff;
        const auto& b = partner->second->coeff;
        if (a.size() != b.size()) throw RealityError("conjugate forcing harmonics disagree");
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i] - std::conj(b[i])) > tol)
                throw RealityError("conjugate forcing harmonics disagree");
    }

    for (const auto& [sigma, m] : by_sigma) {
        f_.push_back(*m);
        if (sigma != 0 && !by_sigma.count(-sigma)) {
            MechMode conj_mode;
            conj_mode.sigma = -sigma;
            for (const auto& c : m->coeff) conj_mode.coeff.push_back(std::conj(c));
            f_.push_back(std::move(conj_mode));
        }
    }
    std::sort(f_.begin(), f_.end(),
              [](const MechMode& a, const MechMode& b) { return a.sigma < b.sigma; });
}

Vec2 Orbit::at(double t) const {
    double tm = std::fmod(t, period);
    if (tm < 0.0) tm += period;
    return traj.eval(tm);
}

double orbit_period(const MechanicalSystem& mech, double E, double ode_tol) {
    return build_orbit(mech, E, ode_tol).period;
}

Orbit orbit_with_period(const MechanicalSystem& mech, double T_target, double E_lo, double E_hi,
                        double ode_tol) {
    if (!(E_lo > 0.0) || !(E_hi > E_lo)) throw ConfigError("energy bracket must be 0 < lo < hi");
    if (!(T_target > 0.0)) throw ConfigError("target period must be positive");

    // The period map must be strictly monotone on the bracket; sample it
    // first so a flat or folded map is reported as such rather than as a
    // failed bisection.
    const int probes = 9;
    std::vector<double> P(probes);
    for (int i = 0; i < probes; ++i) {
        double E = E_lo + (E_hi - E_lo) * double(i) / double(probes - 1);
        P[std::size_t(i)] = orbit_period(mech, E, ode_tol);
    }
    double pmin = *std::min_element(P.begin(), P.end());
    double pmax = *std::max_element(P.begin(), P.end());
    double pmid = 0.5 * (pmin + pmax);
    if (pmax - pmin < 1e-8 * pmid) {
        if (std::abs(pmid - T_target) <= 1e-6 * T_target)
            throw AnisochronyViolation(
                "period map is flat at the requested period; the frequency map is degenerate");
        throw NoSuchPeriod("period map is flat and never attains the requested period");
    }
    bool increasing = P.back() > P.front();
    for (int i = 0; i + 1 < probes; ++i) {
        double d = P[std::size_t(i + 1)] - P[std::size_t(i)];
        if ((increasing ? -d : d) > 1e-10 * pmid)
            throw AnisochronyViolation("period map is not monotone on the energy bracket");
    }
    if (T_target < pmin - 1e-12 * pmid || T_target > pmax + 1e-12 * pmid)
        throw NoSuchPeriod("requested period lies outside the period map on the bracket");

    double lo = E_lo, hi = E_hi;
    double Plo = P.front();
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double Pm = orbit_period(mech, mid, ode_tol);
        if (std::abs(Pm - T_target) <= 1e-12 * T_target ||
            hi - lo <= 1e-15 * std::max(1.0, std::abs(mid)))
            return build_orbit(mech, mid, ode_tol);
        if ((Pm < T_target) == (Plo < T_target)) {
            lo = mid;
            Plo = Pm;
        } else {
            hi = mid;
        }
    }
    return build_orbit(mech, 0.5 * (lo + hi), ode_tol);
}

double mechanical_C0(const MechanicalSystem& mech, const Orbit& orbit, int p, int q, double t0) {
    const double T = TWO_PI * q;
    if (std::abs(p * orbit.period - T) > 1e-6 * T)
        throw BadOrbit("orbit period does not match the requested resonance");

    const int n = 4096;
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n; ++j) {
        double t = T * double(j) / double(n);
        Vec2 z = orbit.at(t);
        num += z[1] * mech.eval_f(z[0], t + t0);
        den += z[1] * z[1];
    }
    if (den < 1e-14 * double(n)) throw BadOrbit("orbit velocity vanishes; friction balance undefined");
    return num / den;
}

PlanarOrbit planar_orbit(const Orbit& orbit, int p, int n_samples) {
    PlanarOrbit out;
    out.period = p * orbit.period;
    out.samples.reserve(std::size_t(n_samples) + 1);
    for (int j = 0; j <= n_samples; ++j)
        out.samples.push_back(orbit.at(out.period * double(j) / double(n_samples)));
    return out;
}

MechanicalCurves mechanical_curves(const MechanicalSystem& mech, int p, int q,
                                   const std::vector<double>& eps_grid, int n_t0,
                                   double E_lo, double E_hi, int threads) {
    if (n_t0 < 4) throw ConfigError("mechanical_curves needs at least 4 phase samples");
    Orbit orbit = orbit_with_period(mech, TWO_PI * q / p, E_lo, E_hi);

    MechanicalCurves out;
    out.t0_grid.resize(std::size_t(n_t0));
    out.C0_row.resize(std::size_t(n_t0));
    for (int i = 0; i < n_t0; ++i)
        out.t0_grid[std::size_t(i)] = TWO_PI * double(i) / double(n_t0);
    parallel_for(n_t0, threads, [&](int i) {
        out.C0_row[std::size_t(i)] = mechanical_C0(mech, orbit, p, q, out.t0_grid[std::size_t(i)]);
    });

    double rowmax = 0.0, mean = 0.0;
    for (double v : out.C0_row) {
        rowmax = std::max(rowmax, std::abs(v));
        mean += v;
    }
    mean /= double(n_t0);
    out.mean_abs = std::abs(mean);

    // The phase average of C0 vanishes identically; a visible mean means the
    // orbit or the quadrature is broken.
    double fscale = 0.0;
    for (int j = 0; j < 64; ++j) {
        Vec2 z = orbit.at(orbit.period * double(j) / 64.0);
        for (int s = 0; s < 16; ++s)
            fscale = std::max(fscale, std::abs(mech.eval_f(z[0], TWO_PI * double(s) / 16.0)));
    }
    if (out.mean_abs > 1e-8 * std::max({rowmax, fscale, 1e-300}))
        throw Error("phase average of the friction threshold failed to vanish");

    out.eps_grid = eps_grid;
    out.gamma1.resize(eps_grid.size());
    out.gamma2.resize(eps_grid.size());
    if (rowmax <= 1e-10 * std::max(fscale, 1e-300)) {
        out.degenerate = true;
        return out;
    }

    TrigInterp interp(out.C0_row);
    auto refine = [&](double tg) {
        for (int it = 0; it < 40; ++it) {
            double d2 = interp.deriv2(tg);
            if (std::abs(d2) < 1e-12 * std::max(1.0, rowmax)) break;
            double step = interp.deriv(tg) / d2;
            tg -= step;
            if (std::abs(step) < 1e-14) break;
        }
        return tg;
    };
    std::size_t imax = 0, imin = 0;
    for (std::size_t i = 1; i < out.C0_row.size(); ++i) {
        if (out.C0_row[i] > out.C0_row[imax]) imax = i;
        if (out.C0_row[i] < out.C0_row[imin]) imin = i;
    }
    double cmax = interp.eval(refine(out.t0_grid[imax]));
    double cmin = interp.eval(refine(out.t0_grid[imin]));
    cmax = std::max(cmax, out.C0_row[imax]);
    cmin = std::min(cmin, out.C0_row[imin]);
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        out.gamma1[i] = eps_grid[i] * cmax;
        out.gamma2[i] = eps_grid[i] * cmin;
    }
    return out;
}

Rhs mechanical_rhs(const MechanicalSystem& mech, double eps, double C) {
    return [mech, eps, C](double t, const Vec2& z) {
        return Vec2{z[1], -mech.eval_g(z[0]) - eps * C * z[1] + eps * mech.eval_f(z[0], t)};
    };
}

} // namespace subh
