#pragma once

#include <vector>

#include "subh/oracle.hpp"
#include "subh/trig_system.hpp"

namespace subh {

// ============================================================================
// Averaged forcing along the resonant orbit (spectral form)
// ============================================================================

// M(t0, C): the time average of G along the unperturbed resonant orbit with
// phase shift t0. Only modes with nu0 p + sigma0 q = 0 survive, so this is
// the finite sum  sum_res e^{i sigma0 t0} G_{nu0 sigma0}(A0, C).
double melnikov_value(const TrigSystem& sys, const ResonanceContext& ctx, double t0, double C);

// Exact partial derivatives of the same sum.
double melnikov_dC(const TrigSystem& sys, const ResonanceContext& ctx, double t0, double C);
double melnikov_dt0(const TrigSystem& sys, const ResonanceContext& ctx, double t0, double C);

// Average of d_alpha G along the orbit: sum_res (i nu0) e^{i sigma0 t0} G_...
// Satisfies omega(A0) * this = -dM/dt0 identically on resonant sums.
double melnikov_dalpha_avg(const TrigSystem& sys, const ResonanceContext& ctx, double t0,
                           double C);

struct C0Result {
    double C0 = 0.0;
    double D = 0.0; // dM/dC at (t0, C0)
};

// Root of C -> M(t0, C) nearest zero. The search bracket [-b, b] doubles up
// to 2^10 times when no sign change is found. Throws MelnikovDegenerate when
// M does not respond to C or the root is degenerate, MelnikovNoRoot when no
// root can be located at all.
C0Result solve_C0(const TrigSystem& sys, const ResonanceContext& ctx, double t0,
                  double bracket = 10.0);

struct MelnikovCurve {
    std::vector<double> t0_grid;
    std::vector<double> C0_values;
    std::vector<double> D_values;
    int trig_degree = 0; // exact Fourier degree of C0(t0) detected from the samples
};

// solve_C0 over a uniform phase grid. Hypothesis failures are rethrown with
// the failing t0 in the message.
MelnikovCurve melnikov_curve(const TrigSystem& sys, const ResonanceContext& ctx, int n_grid,
                             double bracket = 10.0, int threads = 0);

// ============================================================================
// Planar (first-order) Melnikov integral
// ============================================================================

using PlanarField = std::function<Vec2(const Vec2& x, double t)>;

// (1/T) int_0^T [f1 g2 - f2 g1](orbit(t), t + t0) dt on a uniformly sampled
// closed orbit. Throws BadOrbit when the sampling does not close up.
double melnikov_planar(const PlanarField& f_field, const PlanarField& g_field,
                       const PlanarOrbit& orbit, double t0);

// ============================================================================
// Fixed-phase obstruction hierarchy
// ============================================================================

struct HierarchyLevel {
    int k = 0;
    std::vector<double> values; // M_k over the t0 grid
    double max_abs = 0.0;
};

struct HierarchyResult {
    std::vector<HierarchyLevel> levels; // orders 0 .. last computed
    int kstar = -1;                     // first order whose obstruction is nonzero
    bool exhausted = false;             // all obstructions vanish through K
};

// Evaluate the obstruction functions M_k(t0), k = 0..K, of the fixed-phase
// continuation at fixed C. Each level must vanish identically (<= 1e-10 *
// jet scale over the grid) for the next to be well-defined; the sweep stops
// at the first order that does not. exhausted = true is the full-torus
// persistence signal.
HierarchyResult melnikov_hierarchy(const TrigSystem& sys, const ResonanceContext& ctx,
                                   double C_fixed, int K, const std::vector<double>& t0_grid);

} // namespace subh
