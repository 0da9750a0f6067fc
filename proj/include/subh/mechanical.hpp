#pragma once

#include <array>
#include <complex>
#include <vector>

#include "subh/errors.hpp"
#include "subh/oracle.hpp"
#include "subh/trig_system.hpp"

namespace subh {

// One time-harmonic of a mechanical forcing: e^{i sigma t} P(x) with a
// complex polynomial P, ascending coefficients.
struct MechMode {
    int sigma = 0;
    std::vector<cplx> coeff;

    cplx eval(double x) const {
        cplx s(0.0, 0.0);
        for (std::size_t i = coeff.size(); i-- > 0;) s = s * x + coeff[i];
        return s;
    }
};

// A dissipative oscillator  x'' + g(x) + gamma x' = eps f(x, t)  with
// gamma = eps C. The unperturbed well is centred at the origin: g(0) = 0.
class MechanicalSystem {
public:
    MechanicalSystem() = default;
    MechanicalSystem(RealPoly g, std::vector<MechMode> f_modes, bool realify = true);

    const RealPoly& g() const { return g_; }
    double eval_g(double x) const { return g_.eval(x); }
    double potential(double x) const { return V_.eval(x); }
    const std::vector<MechMode>& f_modes() const { return f_; }

    double eval_f(double x, double t) const {
        cplx s(0.0, 0.0);
        for (const auto& m : f_)
            s += m.eval(x) * std::polar(1.0, m.sigma * t);
        return s.real();
    }
    bool f_empty() const { return f_.empty(); }

private:
    RealPoly g_;
    RealPoly V_; // antiderivative of g with V(0) = 0
    std::vector<MechMode> f_;
};

// One unperturbed orbit of x'' + g(x) = 0 at energy E, cached with its
// dense trajectory over a single period for later sampling.
struct Orbit {
    double E = 0.0;
    double period = 0.0;
    double x_turn = 0.0; // right turning point, the orbit starts at (x_turn, 0)
    Trajectory traj;     // one period, starting at (x_turn, 0)

    Vec2 at(double t) const; // periodic evaluation for any t
};

// Measure the period of the energy-E orbit by two successive returns to the
// section y = 0, each crossing refined on the dense output.
double orbit_period(const MechanicalSystem& mech, double E, double ode_tol = 1e-12);

// Find the orbit whose period equals T_target by bisection of the period
// map over [E_lo, E_hi]. A flat period map throws AnisochronyViolation when
// the target is attained (no anisochronicity) and NoSuchPeriod otherwise;
// a non-monotone period map on the bracket throws AnisochronyViolation.
Orbit orbit_with_period(const MechanicalSystem& mech, double T_target, double E_lo, double E_hi,
                        double ode_tol = 1e-12);

// First-order friction threshold of the resonant orbit with period
// 2 pi q / p:  C0(t0) = <y0 f(x0, . + t0)> / <y0^2>, averages over 2 pi q.
double mechanical_C0(const MechanicalSystem& mech, const Orbit& orbit, int p, int q, double t0);

// Uniform closed sampling of the orbit over p full loops (duration 2 pi q),
// for the planar Melnikov integral.
PlanarOrbit planar_orbit(const Orbit& orbit, int p, int n_samples = 1024);

struct MechanicalCurves {
    std::vector<double> t0_grid;
    std::vector<double> C0_row;
    std::vector<double> eps_grid;
    std::vector<double> gamma1, gamma2;
    bool degenerate = false; // C0 vanishes identically; both curves collapse
    double mean_abs = 0.0;   // |<C0>| over the phase grid, should be ~0
};

// First-order bifurcation curves gamma_i(eps) = eps * extremum of C0.
// The zero-mean property of C0 is verified here; its failure indicates a
// broken orbit or quadrature and throws Error.
MechanicalCurves mechanical_curves(const MechanicalSystem& mech, int p, int q,
                                   const std::vector<double>& eps_grid, int n_t0,
                                   double E_lo, double E_hi, int threads = 0);

// Right-hand side of the full dissipative system as a planar field,
// for the shooting oracle: x' = y, y' = -g(x) - eps C y + eps f(x, t).
Rhs mechanical_rhs(const MechanicalSystem& mech, double eps, double C);

} // namespace subh
