#include "subh/series.hpp"

#include <algorithm>
#include <cmath>

namespace subh {

namespace {

Spectrum unit_spectrum() {
    Spectrum s;
    s.add(0, cplx(1.0, 0.0));
    return s;
}

// c / (i nu), the harmonic inverse of d/d theta.
cplx div_i_nu(cplx c, int nu) {
    return cplx(c.imag() / nu, -c.real() / nu);
}

} // namespace

SeriesState::SeriesState(const TrigSystem& sys, const ResonanceContext& ctx, SeriesMode mode,
                         double t0, double C_center)
    : sys_(&sys), ctx_(ctx), mode_(mode), t0_(t0), C_center_(C_center),
      jets_(sys, ctx, C_center, 0) {
    scale_ = std::max(jets_.scale(), 1e-300);

    {
        RealPoly w = sys.omega_poly();
        double fact = 1.0;
        for (int r = 0; r <= sys.omega_poly().degree(); ++r) {
            if (r > 0) {
                fact *= double(r);
                w = w.deriv();
            }
            om_jets_.push_back(w.eval(ctx_.A0) / fact);
        }
    }

    auto fill_d = [&](const std::vector<JetTable::ModeJets>& modes, Spectrum& d3, Spectrum& d1) {
        for (const auto& m : modes) {
            int base = m.nu0 * ctx_.p + m.sigma0 * ctx_.q;
            cplx phase = std::polar(1.0, m.sigma0 * t0_);
            d3.add(base, phase * m.jet(0, 1));
            d1.add(base, phase * cplx(0.0, double(m.nu0)) * m.jet(0, 0));
        }
    };
    fill_d(jets_.F(), d3F_, d1F_);
    fill_d(jets_.G(), d3G_, d1G_);
    D_ = d3G_.at(0).real();
    phase_div_ = d1G_.at(0).real();

    R2cap_ = std::max(0, sys.omega_poly().degree());
    R3cap_ = 0;
    for (const auto& m : jets_.F()) R2cap_ = std::max(R2cap_, m.degA);
    for (const auto& m : jets_.G()) R2cap_ = std::max(R2cap_, m.degA);
    for (const auto& m : jets_.F()) R3cap_ = std::max(R3cap_, m.degC);
    for (const auto& m : jets_.G()) R3cap_ = std::max(R3cap_, m.degC);

    init_order_zero();
}

void SeriesState::init_order_zero() {
    apow_.assign(2, {});
    apow_[0].push_back(unit_spectrum());
    apow_[1].push_back(Spectrum{});
    Apow_.assign(std::size_t(R2cap_) + 1, {});
    Apow_[0].push_back(unit_spectrum());
    for (int r = 1; r <= R2cap_; ++r) Apow_[std::size_t(r)].push_back(Spectrum{});
    cpow_.assign(std::size_t(R3cap_) + 1, {});
    cpow_[0].push_back(cplx(1.0, 0.0));
    for (int r = 1; r <= R3cap_; ++r) cpow_[std::size_t(r)].push_back(cplx(0.0, 0.0));

    auto W2 = power_products(0);
    F_.push_back(mode_sum(jets_.F(), 0, W2));
    G_.push_back(mode_sum(jets_.G(), 0, W2));
    obstruction_.push_back(G_[0].at(0).real());
    C_.push_back(C_center_);
    abar_.push_back(0.0);
    order_ = 0;
}

SeriesState SeriesState::init_c_mode(const TrigSystem& sys, const ResonanceContext& ctx,
                                     double t0, double bracket) {
    return init_c_mode_at(sys, ctx, t0, solve_C0(sys, ctx, t0, bracket));
}

SeriesState SeriesState::init_c_mode_at(const TrigSystem& sys, const ResonanceContext& ctx,
                                        double t0, const C0Result& root) {
    SeriesState s(sys, ctx, SeriesMode::CMode, t0, root.C0);
    if (std::abs(s.D_) < 1e-12 * s.scale_)
        throw SolvabilityFailure("mean response to the friction parameter vanishes");
    if (std::abs(s.obstruction_[0]) > 1e-7 * s.scale_)
        throw SolvabilityFailure("series center is not a root of the averaged forcing");
    return s;
}

SeriesState SeriesState::init_fixed_phase(const TrigSystem& sys, const ResonanceContext& ctx,
                                          double t0, double C_fixed) {
    SeriesState s(sys, ctx, SeriesMode::FixedPhase, t0, C_fixed);
    if (std::abs(s.obstruction_[0]) > 1e-10 * s.scale_)
        throw PhaseDegenerate("phase is not a zero of the averaged forcing");
    if (std::abs(s.phase_div_) < 1e-10 * s.scale_)
        throw PhaseDegenerate("averaged forcing is stationary in the phase at this zero");
    return s;
}

SeriesState SeriesState::init_hierarchy(const TrigSystem& sys, const ResonanceContext& ctx,
                                        double t0, double C_fixed) {
    return SeriesState(sys, ctx, SeriesMode::Hierarchy, t0, C_fixed);
}

// (A-family^r2 * C-family^r3)[j] for every r2 <= R2cap_, r3 <= R3cap_,
// j <= k. Indexed [r2 * (R3cap_ + 1) + r3][j].
std::vector<std::vector<Spectrum>> SeriesState::power_products(int k) const {
    std::vector<std::vector<Spectrum>> W2(std::size_t((R2cap_ + 1) * (R3cap_ + 1)));
    for (int r2 = 0; r2 <= R2cap_; ++r2)
        for (int r3 = 0; r3 <= R3cap_; ++r3) {
            auto& fam = W2[std::size_t(r2 * (R3cap_ + 1) + r3)];
            fam.resize(std::size_t(k) + 1);
            for (int j = 0; j <= k; ++j)
                for (int i = 0; i <= j; ++i) {
                    cplx c = cpow_[std::size_t(r3)][std::size_t(j - i)];
                    if (c == cplx(0.0, 0.0)) continue;
                    for (const auto& [nu, v] : Apow_[std::size_t(r2)][std::size_t(i)])
                        fam[std::size_t(j)].add(nu, v * c);
                }
        }
    return W2;
}

// eps^k coefficient of X(alpha, A, C, t + t0) along the current families,
// for X the forcing term described by the given jet list.
Spectrum SeriesState::mode_sum(const std::vector<JetTable::ModeJets>& modes, int k,
                               const std::vector<std::vector<Spectrum>>& W2) const {
    Spectrum out;
    for (const auto& m : modes) {
        int base = m.nu0 * ctx_.p + m.sigma0 * ctx_.q;
        cplx phase = std::polar(1.0, m.sigma0 * t0_);

        // V[j]: the polynomial part P(A0 + dA, C0 + dC) at order j.
        std::vector<Spectrum> V(std::size_t(k) + 1);
        for (int r2 = 0; r2 <= m.degA; ++r2)
            for (int r3 = 0; r3 <= m.degC; ++r3) {
                cplx c = m.jet(r2, r3);
                if (c == cplx(0.0, 0.0)) continue;
                const auto& fam = W2[std::size_t(r2 * (R3cap_ + 1) + r3)];
                for (int j = 0; j <= k; ++j)
                    for (const auto& [nu, v] : fam[std::size_t(j)])
                        V[std::size_t(j)].add(nu, v * c);
            }

        // Combine with e^{i nu0 * d alpha} expanded through the alpha powers.
        Spectrum Xm;
        for (int j1 = 0; j1 <= k; ++j1) {
            Spectrum E;
            cplx fac(1.0, 0.0);
            for (int r1 = 0; r1 <= j1 && r1 < int(apow_.size()); ++r1) {
                if (r1 > 0) {
                    fac *= cplx(0.0, double(m.nu0)) / double(r1);
                    if (fac == cplx(0.0, 0.0)) break;
                }
                for (const auto& [nu, v] : apow_[std::size_t(r1)][std::size_t(j1)])
                    E.add(nu, v * fac);
            }
            if (E.empty() || V[std::size_t(k - j1)].empty()) continue;
            Xm += convolve(E, V[std::size_t(k - j1)]);
        }
        for (const auto& [nu, v] : Xm) out.add(nu + base, phase * v);
    }
    return out;
}

int SeriesState::compute_order() {
    const int k = order_ + 1;
    const int q = ctx_.q;
    const double wp = ctx_.omega_prime;

    // Powers >= 2 at order k involve correction orders < k only, so they can
    // be extended before the order-k corrections exist.
    while (int(apow_.size()) <= k) apow_.emplace_back(apow_[0].size());
    for (int r = 2; r <= k; ++r) {
        Spectrum s;
        for (int j = 1; j <= k - 1; ++j) {
            if (apow_[std::size_t(r - 1)][std::size_t(k - j)].empty()) continue;
            s += convolve(apow_[std::size_t(r - 1)][std::size_t(k - j)],
                          apow_[1][std::size_t(j)]);
        }
        apow_[std::size_t(r)].push_back(std::move(s));
    }
    for (int r = 2; r <= R2cap_; ++r) {
        Spectrum s;
        for (int j = 1; j <= k - 1; ++j) {
            if (Apow_[std::size_t(r - 1)][std::size_t(k - j)].empty()) continue;
            s += convolve(Apow_[std::size_t(r - 1)][std::size_t(k - j)],
                          Apow_[1][std::size_t(j)]);
        }
        Apow_[std::size_t(r)].push_back(std::move(s));
    }
    for (int r = 2; r <= R3cap_; ++r) {
        cplx s(0.0, 0.0);
        for (int j = 1; j <= k - 1; ++j)
            s += cpow_[std::size_t(r - 1)][std::size_t(k - j)] * cpow_[1][std::size_t(j)];
        cpow_[std::size_t(r)].push_back(s);
    }

    // Taylor tail of omega beyond the linear term.
    Spectrum Wk;
    for (int r = 2; r < int(om_jets_.size()); ++r) {
        if (om_jets_[std::size_t(r)] == 0.0) continue;
        for (const auto& [nu, v] : Apow_[std::size_t(r)][std::size_t(k)])
            Wk.add(nu, v * om_jets_[std::size_t(r)]);
    }

    // Order-k action correction. The nonzero harmonics integrate the
    // A-equation; the mean balances the alpha-equation.
    Spectrum A_k;
    for (const auto& [nu, v] : G_[std::size_t(k - 1)])
        if (nu != 0) A_k.add(nu, div_i_nu(v * double(q), nu));
    cplx A0_mean = -(F_[std::size_t(k - 1)].at(0) + Wk.at(0)) / wp;
    A_k.add(0, A0_mean);

    // Order-k angle correction from the nonzero harmonics of the
    // alpha-equation; the mean is the gauge (or FixedPhase) slot.
    Spectrum rhs = F_[std::size_t(k - 1)];
    rhs += Wk;
    rhs += A_k * wp;
    Spectrum alpha_k;
    for (const auto& [nu, v] : rhs)
        if (nu != 0) alpha_k.add(nu, div_i_nu(v * double(q), nu));

    apow_[0].push_back(Spectrum{});
    apow_[1].push_back(std::move(alpha_k));
    Apow_[0].push_back(Spectrum{});
    Apow_[1].push_back(std::move(A_k));
    cpow_[0].push_back(cplx(0.0, 0.0));
    if (R3cap_ >= 1) cpow_[1].push_back(cplx(0.0, 0.0));

    auto W2 = power_products(k);
    Spectrum Fk = mode_sum(jets_.F(), k, W2);
    Spectrum Gk = mode_sum(jets_.G(), k, W2);

    cplx mean_c = Gk.at(0);
    double gscale = std::max({scale_, Gk.max_abs(), std::abs(mean_c)});
    if (std::abs(mean_c.imag()) > 1e-7 * gscale)
        throw SolvabilityFailure("mean of the action equation lost reality");
    double mean = mean_c.real();
    obstruction_.push_back(mean);

    switch (mode_) {
    case SeriesMode::CMode: {
        double Ck = -mean / D_;
        Fk += d3F_ * cplx(Ck, 0.0);
        Gk += d3G_ * cplx(Ck, 0.0);
        C_.push_back(Ck);
        if (R3cap_ >= 1) cpow_[1][std::size_t(k)] = cplx(Ck, 0.0);
        break;
    }
    case SeriesMode::FixedPhase: {
        double ab = -mean / phase_div_;
        Fk += d1F_ * cplx(ab, 0.0);
        Gk += d1G_ * cplx(ab, 0.0);
        abar_.push_back(ab);
        apow_[1][std::size_t(k)].add(0, cplx(ab, 0.0));
        break;
    }
    case SeriesMode::Hierarchy:
        break;
    }

    if (mode_ != SeriesMode::Hierarchy &&
        std::abs(Gk.at(0).real()) > 1e-8 * std::max(scale_, Gk.max_abs()))
        throw SolvabilityFailure("order correction failed to cancel the action mean");

    F_.push_back(std::move(Fk));
    G_.push_back(std::move(Gk));
    order_ = k;
    return k;
}

double SeriesState::C_of_eps(double eps) const {
    double s = 0.0;
    for (std::size_t i = C_.size(); i-- > 0;) s = s * eps + C_[i];
    return s;
}

long double SeriesState::C_of_eps_ld(long double eps) const {
    long double s = 0.0L;
    for (std::size_t i = C_.size(); i-- > 0;) s = s * eps + (long double)C_[i];
    return s;
}

StatePoint SeriesState::evaluate(double eps, double t) const {
    double theta = ctx_.omega_base * t;
    StatePoint out;
    out.alpha = double(ctx_.p) / double(ctx_.q) * t;
    out.A = ctx_.A0;
    double epsk = 1.0;
    for (int k = 1; k <= order_; ++k) {
        epsk *= eps;
        out.alpha += epsk * apow_[1][std::size_t(k)].eval(theta).real();
        out.A += epsk * Apow_[1][std::size_t(k)].eval(theta).real();
    }
    return out;
}

double SeriesState::residual(double eps, int n_samples) const {
    const long double pi = 3.14159265358979323846264338327950288L;
    const long double T = 2.0L * pi * ctx_.q;
    const long double w0 = (long double)ctx_.p / ctx_.q;
    const long double C =
        mode_ == SeriesMode::CMode ? C_of_eps_ld(eps) : (long double)C_center_;

    auto eval_deriv = [&](const Spectrum& s, long double theta) {
        long double sum = 0.0L;
        for (const auto& [nu, v] : s) {
            long double a = nu * theta;
            // real part of i (nu / q) c e^{i nu theta}
            sum += (long double)nu / ctx_.q *
                   (-(long double)v.imag() * std::cos(a) - (long double)v.real() * std::sin(a));
        }
        return sum;
    };

    long double worst = 0.0L;
    for (int j = 0; j < n_samples; ++j) {
        long double t = T * j / n_samples;
        long double theta = t / ctx_.q;
        long double a = w0 * t, A = ctx_.A0;
        long double adot = w0, Adot = 0.0L;
        long double epsk = 1.0L;
        for (int k = 1; k <= order_; ++k) {
            epsk *= eps;
            a += epsk * apow_[1][std::size_t(k)].eval_ld(theta).real();
            A += epsk * Apow_[1][std::size_t(k)].eval_ld(theta).real();
            adot += epsk * eval_deriv(apow_[1][std::size_t(k)], theta);
            Adot += epsk * eval_deriv(Apow_[1][std::size_t(k)], theta);
        }
        long double r1 = adot - sys_->omega_poly().eval_ld(A) -
                         eps * sys_->eval_F_ld(a, A, C, t + t0_);
        long double r2 = Adot - eps * sys_->eval_G_ld(a, A, C, t + t0_);
        worst = std::max({worst, std::abs(r1), std::abs(r2)});
    }
    return double(worst);
}

} // namespace subh
