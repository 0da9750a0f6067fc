#pragma once

#include <vector>

#include "subh/errors.hpp"
#include "subh/melnikov.hpp"
#include "subh/spectrum.hpp"
#include "subh/trig_system.hpp"

namespace subh {

// Order-by-order construction of a subharmonic response
//   alpha(t) = (p/q) t + sum_{k>=1} eps^k alpha_k(t)
//   A(t)     = A0      + sum_{k>=1} eps^k A_k(t)
// with coefficients 2 pi q periodic in t and the forcing evaluated at t + t0.
// At every order the mean of the A-equation must vanish; the three flavours
// differ in which scalar absorbs it:
//   CMode      adjusts the friction series C(eps) = C0 + eps C1 + ...
//   FixedPhase keeps C fixed and shifts the order-k mean phase alpha_bar_k
//   Hierarchy  corrects nothing and records the leftover mean per order
enum class SeriesMode { CMode, FixedPhase, Hierarchy };

struct StatePoint {
    double alpha = 0.0;
    double A = 0.0;
};

class SeriesState {
public:
    // Roots C0 of the averaged forcing are found inside [-bracket, bracket].
    static SeriesState init_c_mode(const TrigSystem& sys, const ResonanceContext& ctx, double t0,
                                   double bracket = 10.0);
    // Same flavour with a root already in hand.
    static SeriesState init_c_mode_at(const TrigSystem& sys, const ResonanceContext& ctx,
                                      double t0, const C0Result& root);
    // Requires M(t0, C) = 0 with dM/dt0 != 0; throws PhaseDegenerate otherwise.
    static SeriesState init_fixed_phase(const TrigSystem& sys, const ResonanceContext& ctx,
                                        double t0, double C_fixed);
    static SeriesState init_hierarchy(const TrigSystem& sys, const ResonanceContext& ctx,
                                      double t0, double C_fixed);

    // Advances one order; returns the new highest order.
    int compute_order();
    void compute_to(int K) {
        while (order_ < K) compute_order();
    }

    int order() const { return order_; }
    SeriesMode mode() const { return mode_; }
    double t0() const { return t0_; }
    double C_center() const { return C_center_; }
    // Mean response of G to a shift of C at the base solution; the divisor
    // of the CMode corrections.
    double D() const { return D_; }
    // Mean response of G to a constant phase shift; the divisor of the
    // FixedPhase corrections. Equals -M'(t0) / omega(A0).
    double phase_divisor() const { return phase_div_; }
    double scale() const { return scale_; }
    const JetTable& jets() const { return jets_; }

    const Spectrum& alpha(int k) const { return apow_[1][std::size_t(k)]; }
    const Spectrum& A(int k) const { return Apow_[1][std::size_t(k)]; }
    const Spectrum& F_spec(int k) const { return F_[std::size_t(k)]; }
    const Spectrum& G_spec(int k) const { return G_[std::size_t(k)]; }

    double C(int k) const { return C_[std::size_t(k)]; }           // CMode
    double alpha_bar(int k) const { return abar_[std::size_t(k)]; } // FixedPhase
    // Mean of the A-equation at order k before any correction.
    double obstruction(int k) const { return obstruction_[std::size_t(k)]; }

    double C_of_eps(double eps) const;
    long double C_of_eps_ld(long double eps) const;

    // Truncated series evaluated at time t (forcing phase t + t0).
    StatePoint evaluate(double eps, double t) const;

    // Max norm over one period of the equation defect of the truncated
    // series, computed in extended precision. Scales like eps^{order+1}.
    double residual(double eps, int n_samples = 64) const;

private:
    SeriesState(const TrigSystem& sys, const ResonanceContext& ctx, SeriesMode mode, double t0,
                double C_center);
    void init_order_zero();
    std::vector<std::vector<Spectrum>> power_products(int k) const;
    Spectrum mode_sum(const std::vector<JetTable::ModeJets>& modes, int k,
                      const std::vector<std::vector<Spectrum>>& W2) const;

    const TrigSystem* sys_ = nullptr;
    ResonanceContext ctx_;
    SeriesMode mode_ = SeriesMode::CMode;
    double t0_ = 0.0;
    double C_center_ = 0.0;
    JetTable jets_;
    double scale_ = 1.0;
    std::vector<double> om_jets_; // omega^{(r)}(A0) / r!
    int R2cap_ = 0;               // highest action power any jet or omega needs
    int R3cap_ = 0;               // highest friction power any jet needs

    // Perturbations of G and F to first order in the correction scalars,
    // along the unperturbed solution. Fixed spectra, computed once.
    Spectrum d3F_, d3G_; // d/dC
    Spectrum d1F_, d1G_; // d/d alpha
    double D_ = 0.0;
    double phase_div_ = 0.0;

    // Power families: Xpow_[r][k] is the eps^k coefficient of the r-th power
    // of the correction family (which starts at eps^1, so row r starts at
    // order r). Row 1 holds the corrections themselves.
    std::vector<std::vector<Spectrum>> apow_; // powers of sum eps^k alpha_k
    std::vector<std::vector<Spectrum>> Apow_; // powers of sum eps^k A_k
    std::vector<std::vector<cplx>> cpow_;     // powers of sum eps^k C_k

    std::vector<Spectrum> F_, G_; // finalized forcing coefficients per order
    std::vector<double> C_;
    std::vector<double> abar_;
    std::vector<double> obstruction_;
    int order_ = -1;
};

} // namespace subh
