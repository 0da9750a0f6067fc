#pragma once

#include <array>
#include <functional>
#include <vector>

#include "subh/errors.hpp"

namespace subh {

using Vec2 = std::array<double, 2>;
using Rhs = std::function<Vec2(double t, const Vec2& y)>;

// One accepted integrator step with its dense-output polynomial.
struct DenseStep {
    double t = 0.0;
    double h = 0.0;
    std::array<Vec2, 5> rcont{};

    Vec2 eval(double tq) const;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<Vec2> y;
    std::vector<DenseStep> dense;
    double tol = 0.0;

    double t_begin() const { return t.empty() ? 0.0 : t.front(); }
    double t_end() const { return t.empty() ? 0.0 : t.back(); }
    // Dense evaluation anywhere inside [t_begin, t_end].
    Vec2 eval(double tq) const;
};

// Adaptive embedded Runge-Kutta of order 5(4) with dense output.
// tol feeds both the absolute and relative error controls. Throws
// StepUnderflow when the step collapses or the step budget is exhausted.
Trajectory integrate(const Rhs& rhs, Vec2 y0, double t_begin, double t_end, double tol = 1e-12);

// Times in (from_t, t_end] where component comp crosses zero, refined on the
// dense output. direction: +1 rising, -1 falling, 0 both.
std::vector<double> section_crossings(const Trajectory& traj, int comp, double from_t,
                                      int max_count, int direction = 0);

struct PeriodicOrbit {
    Vec2 ic{};
    double period = 0.0;
    double defect = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Newton shooting on x -> Phi_T(x) - x - (drift0, 0). drift0 absorbs the
// secular advance of an angle variable (2 pi p per period for a subharmonic
// of order q/p); pass 0 for genuinely periodic coordinates. The Jacobian is
// formed by central differences with step 1e-6 * scale. Success means a
// defect <= tol_defect * max(1, |x|) within max_iter iterations.
PeriodicOrbit try_shoot_periodic(const Rhs& rhs, Vec2 guess, double T, double drift0 = 0.0,
                                 double tol_defect = 1e-10, int max_iter = 25,
                                 double ode_tol = 1e-12);

// As above but throws NoConvergence instead of returning converged = false.
PeriodicOrbit shoot_periodic(const Rhs& rhs, Vec2 guess, double T, double drift0 = 0.0,
                             double tol_defect = 1e-10, int max_iter = 25,
                             double ode_tol = 1e-12);

struct EmpiricalThresholds {
    double C_max_hat = 0.0;
    double C_min_hat = 0.0;
    bool upper_saturated = false; // predicate still true at the bracket edge
    bool lower_saturated = false;
};

// Empirical existence boundary in the friction parameter: bisect the
// predicate "shooting converges from one of the supplied seeds" against C,
// 50 steps per side, starting from a C value inside the existence region.
// make_rhs builds the flow at a given C; seeds_for supplies initial guesses
// ordered most promising first.
EmpiricalThresholds empirical_curve(const std::function<Rhs(double C)>& make_rhs,
                                    const std::function<std::vector<Vec2>(double C)>& seeds_for,
                                    double T, double drift0, double C_inner, double C_lo,
                                    double C_hi, double tol_defect = 1e-10,
                                    double ode_tol = 1e-10, int bisect_steps = 50);

// Uniform closed sampling of a T-periodic planar orbit: n + 1 points with
// samples.front() == samples.back() up to closure tolerance.
struct PlanarOrbit {
    std::vector<Vec2> samples;
    double period = 0.0;
};

} // namespace subh
