#pragma once

#include <vector>

#include "subh/errors.hpp"
#include "subh/series.hpp"
#include "subh/spectrum.hpp"
#include "subh/trig_system.hpp"

namespace subh {

// Trigonometric interpolant through N uniform samples on [0, 2 pi), stored
// as one-sided Fourier coefficients 0..N/2. Exact on trig polynomials of
// degree < N/2; the sampled functions here are trig polynomials by
// construction, so evaluation between nodes is exact too.
class TrigInterp {
public:
    TrigInterp() = default;
    explicit TrigInterp(const std::vector<double>& samples, double rel_tol = 1e-9);

    double eval(double t) const;
    double deriv(double t) const;
    double deriv2(double t) const;

    int n() const { return n_; }
    // Highest harmonic whose coefficient exceeds rel_tol * max coefficient.
    int degree() const { return degree_; }
    double max_coeff() const { return max_coeff_; }
    cplx coeff(int m) const { return c_[std::size_t(m)]; }

private:
    std::vector<cplx> c_; // one-sided, 0..N/2
    int n_ = 0;
    int degree_ = 0;
    double max_coeff_ = 0.0;
};

// ============================================================================
// Friction surface C(eps, t0)
// ============================================================================

// Rows of the friction expansion: rows[k][i] = C_k(t0_i), so that
// C(eps, t0_i) = sum_k eps^k rows[k][i]. D_row holds the solvability
// divisor D(t0_i) of each column's series.
struct CSurface {
    std::vector<double> t0_grid;
    std::vector<std::vector<double>> rows;
    std::vector<double> D_row;
    int K = 0;
    double scale = 0.0; // largest jet magnitude seen across the grid
};

// Phase-grid size that resolves every row exactly: a power of two at least
// 8 * (1 + 3 K max|sigma0|).
int default_grid_size(const TrigSystem& sys, int K);

CSurface c_surface(const TrigSystem& sys, const ResonanceContext& ctx, int K, int n_t0 = 0,
                   double bracket = 10.0, int threads = 0);

// ============================================================================
// Bifurcation curves
// ============================================================================

// gamma1(eps) = eps * sup_{t0} C(eps, t0), gamma2(eps) = eps * inf.
// tau1 / tau2 are the extremal phases. Existence of the subharmonic at
// friction gamma = eps C requires gamma2(eps) <= gamma <= gamma1(eps).
struct BifurcationCurves {
    std::vector<double> eps;
    std::vector<double> gamma1, gamma2;
    std::vector<double> tau1, tau2;
};

BifurcationCurves bifurcation_curves(const CSurface& surf, const std::vector<double>& eps_grid);

// ============================================================================
// Phase diagnostics
// ============================================================================

// type: +1 local maximum, -1 local minimum, 0 degenerate (second derivative
// below tolerance).
struct StationaryPhase {
    double t0 = 0.0;
    double value = 0.0;
    int type = 0;
};

struct StationaryPhases {
    std::vector<StationaryPhase> points;
    bool all_stationary = false; // the row is constant; every phase is stationary
};

// Stationary points of one interpolated row; scale feeds the flatness
// tolerance.
StationaryPhases stationary_phases(const TrigInterp& row, double scale);

// First order whose row actually varies with the phase. kstar = -1 with
// all_constant set means every computed row is constant and the curves
// collapse to a line through this order.
struct DegeneracyInfo {
    int kstar = -1;
    bool all_constant = false;
    double t0_max = 0.0, t0_min = 0.0; // extremal phases of row kstar
    double curv_max = 0.0, curv_min = 0.0;
    bool nondegenerate = false; // both extremes have nonzero curvature
};

DegeneracyInfo degeneracy_order(const CSurface& surf);

// ============================================================================
// Counting
// ============================================================================

// Subharmonic solutions at a given (eps, gamma): q solutions per root of
// C(eps, .) = gamma / eps in [0, 2 pi), tangencies counted once. Only the
// p = 1 case carries this interpretation; other p are refused.
struct SubharmonicCount {
    int count = 0;
    std::vector<double> roots; // phases in [0, 2 pi)
    bool outside = false;      // gamma / eps misses the range of C(eps, .)
    bool tangent = false;      // some root is a tangency
};

SubharmonicCount count_subharmonics(const CSurface& surf, const ResonanceContext& ctx, double eps,
                                    double gamma);

} // namespace subh
