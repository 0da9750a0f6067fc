#pragma once

#include <complex>
#include <vector>

#include "subh/errors.hpp"
#include "subh/spectrum.hpp"

namespace subh {

// ============================================================================
// Polynomials
// ============================================================================

// Real polynomial in one variable, ascending coefficients.
class RealPoly {
public:
    RealPoly() = default;
    explicit RealPoly(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

    double eval(double x) const {
        double s = 0.0;
        for (std::size_t i = c_.size(); i-- > 0;) s = s * x + c_[i];
        return s;
    }
    long double eval_ld(long double x) const {
        long double s = 0.0L;
        for (std::size_t i = c_.size(); i-- > 0;) s = s * x + (long double)c_[i];
        return s;
    }
    RealPoly deriv() const {
        if (c_.size() <= 1) return RealPoly{};
        std::vector<double> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * double(i);
        return RealPoly(std::move(d));
    }
    int degree() const { return c_.empty() ? -1 : int(c_.size()) - 1; }
    const std::vector<double>& coeffs() const { return c_; }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    }
    std::vector<double> c_;
};

// One monomial coeff * A^degA * C^degC.
struct PolyTerm {
    int degA = 0;
    int degC = 0;
    cplx coeff{0.0, 0.0};
};

// Bivariate polynomial in the action A and the friction parameter C,
// sparse in (degA, degC), complex coefficients.
class BivarPoly {
public:
    BivarPoly() = default;
    explicit BivarPoly(std::vector<PolyTerm> terms);

    cplx eval(double A, double C) const;

    // Scaled jet  d_A^r2 d_C^r3 P / (r2! r3!)  evaluated at (A, C); exact.
    cplx jet(int r2, int r3, double A, double C) const;

    int degA() const { return degA_; }
    int degC() const { return degC_; }
    bool empty() const { return terms_.empty(); }
    double max_coeff() const;
    BivarPoly conjugated() const;
    const std::vector<PolyTerm>& terms() const { return terms_; }

private:
    std::vector<PolyTerm> terms_; // unique (degA, degC), sorted
    int degA_ = 0;
    int degC_ = 0;
};

// ============================================================================
// Trigonometric system
// ============================================================================

// One Fourier mode e^{i nu0 alpha} e^{i sigma0 t} P(A, C) of a forcing term.
struct Mode {
    int nu0 = 0;
    int sigma0 = 0;
    BivarPoly poly;
};

// A periodically forced one-frequency system in angle-action form,
//   alpha' = omega(A) + eps F(alpha, A, C, t)
//   A'     =            eps G(alpha, A, C, t),
// with F, G finite trigonometric polynomials in (alpha, t) whose
// coefficients are polynomials in (A, C).
class TrigSystem {
public:
    // With realify set, modes lacking their conjugate partner get one added
    // automatically; otherwise a missing or mismatched partner throws
    // RealityError. Duplicate (nu0, sigma0) entries in one list throw
    // ConfigError.
    TrigSystem(RealPoly omega, std::vector<Mode> f_modes, std::vector<Mode> g_modes,
               bool realify = true);

    const RealPoly& omega_poly() const { return omega_; }
    double omega(double A) const { return omega_.eval(A); }
    double omega_prime(double A) const { return omega_d_.eval(A); }

    const std::vector<Mode>& f_modes() const { return f_; }
    const std::vector<Mode>& g_modes() const { return g_; }

    // Direct real evaluation by mode summation.
    double eval_F(double alpha, double A, double C, double t) const;
    double eval_G(double alpha, double A, double C, double t) const;
    cplx eval_F_complex(double alpha, double A, double C, double t) const;
    cplx eval_G_complex(double alpha, double A, double C, double t) const;
    long double eval_F_ld(long double alpha, long double A, long double C, long double t) const;
    long double eval_G_ld(long double alpha, long double A, long double C, long double t) const;

    // max |nu0 * p + sigma0 * q| over all modes of both forcing terms.
    int max_base_index(int p, int q) const;
    // max |sigma0| over all modes.
    int max_sigma() const;
    // Largest coefficient magnitude over all mode polynomials.
    double coeff_scale() const;

private:
    RealPoly omega_;
    RealPoly omega_d_;
    std::vector<Mode> f_;
    std::vector<Mode> g_;
};

// ============================================================================
// Resonance
// ============================================================================

// Data of one resonant unperturbed orbit: omega(A0) = p/q, period T = 2 pi q.
// omega_base = 2 pi / T is the fundamental frequency of the Fourier
// expansion along the orbit.
struct ResonanceContext {
    int p = 1;
    int q = 1;
    double A0 = 0.0;
    double T = 0.0;
    double omega_base = 0.0;
    double omega_prime = 0.0;
};

// Locate A0 with omega(A0) = p/q inside [lo, hi] (sign change required;
// lo == hi is taken as a root candidate and polished). Throws NoResonance
// when the bracket carries no root and AnisochronyViolation when
// omega'(A0) vanishes.
ResonanceContext resonance_context(const TrigSystem& sys, int p, int q, double lo, double hi);

// ============================================================================
// Jets
// ============================================================================

// Scaled Taylor data  d_A^r2 d_C^r3 P / (r2! r3!)  of every mode coefficient
// at a fixed evaluation point (A0, C0). Entries beyond the polynomial
// degrees are exactly zero.
class JetTable {
public:
    struct ModeJets {
        int nu0 = 0;
        int sigma0 = 0;
        int degA = 0;
        int degC = 0;
        std::vector<cplx> v; // (degA + 1) x (degC + 1), row-major in r2

        cplx jet(int r2, int r3) const {
            if (r2 < 0 || r3 < 0 || r2 > degA || r3 > degC) return {0.0, 0.0};
            return v[std::size_t(r2) * std::size_t(degC + 1) + std::size_t(r3)];
        }
    };

    JetTable() = default;
    JetTable(const TrigSystem& sys, const ResonanceContext& ctx, double C0, int kmax);

    const std::vector<ModeJets>& F() const { return f_; }
    const std::vector<ModeJets>& G() const { return g_; }
    double A0() const { return A0_; }
    double C0() const { return C0_; }
    int kmax() const { return kmax_; }

    // Largest jet magnitude over both tables; the natural scale for
    // relative tolerances downstream.
    double scale() const { return scale_; }

private:
    std::vector<ModeJets> f_;
    std::vector<ModeJets> g_;
    double A0_ = 0.0;
    double C0_ = 0.0;
    int kmax_ = 0;
    double scale_ = 0.0;
};

inline JetTable jets_at(const TrigSystem& sys, const ResonanceContext& ctx, double C0, int kmax) {
    return JetTable(sys, ctx, C0, kmax);
}

} // namespace subh
