#include "subh/trig_system.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace subh {

namespace {

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * double(n - i) / double(i + 1);
    return r;
}

std::string mode_name(int nu0, int sigma0) {
    std::ostringstream os;
    os << "(" << nu0 << "," << sigma0 << ")";
    return os.str();
}

} // namespace

// ---------------------------------------------------------------------------
// BivarPoly
// ---------------------------------------------------------------------------

BivarPoly::BivarPoly(std::vector<PolyTerm> terms) {
    std::map<std::pair<int, int>, cplx> acc;
    for (const auto& t : terms) {
        if (t.degA < 0 || t.degC < 0)
            throw ConfigError("polynomial term with negative degree");
        acc[{t.degA, t.degC}] += t.coeff;
    }
    for (const auto& [dk, c] : acc) {
        if (c == cplx(0.0, 0.0)) continue;
        terms_.push_back({dk.first, dk.second, c});
        degA_ = std::max(degA_, dk.first);
        degC_ = std::max(degC_, dk.second);
    }
}

cplx BivarPoly::eval(double A, double C) const {
    cplx s(0.0, 0.0);
    for (const auto& t : terms_)
        s += t.coeff * std::pow(A, t.degA) * std::pow(C, t.degC);
    return s;
}

cplx BivarPoly::jet(int r2, int r3, double A, double C) const {
    cplx s(0.0, 0.0);
    for (const auto& t : terms_) {
        if (t.degA < r2 || t.degC < r3) continue;
        s += t.coeff * binom(t.degA, r2) * binom(t.degC, r3) *
             std::pow(A, t.degA - r2) * std::pow(C, t.degC - r3);
    }
    return s;
}

double BivarPoly::max_coeff() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
    return m;
}

BivarPoly BivarPoly::conjugated() const {
    std::vector<PolyTerm> out = terms_;
    for (auto& t : out) t.coeff = std::conj(t.coeff);
    return BivarPoly(std::move(out));
}

// ---------------------------------------------------------------------------
// TrigSystem
// ---------------------------------------------------------------------------

namespace {

// Enforce the reality structure of one mode list: every (nu0, sigma0) needs
// the conjugate partner (-nu0, -sigma0) with the conjugated polynomial.
std::vector<Mode> close_under_conjugation(std::vector<Mode> modes, bool realify, const char* which) {
    std::map<std::pair<int, int>, std::size_t> index;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        auto key = std::make_pair(modes[i].nu0, modes[i].sigma0);
        if (index.count(key))
            throw ConfigError(std::string(which) + " lists mode " +
                              mode_name(key.first, key.second) + " twice");
        index[key] = i;
    }
    std::vector<Mode> extra;
    for (const auto& m : modes) {
        double scale = std::max(m.poly.max_coeff(), 1e-300);
        if (m.nu0 == 0 && m.sigma0 == 0) {
            // Self-conjugate mode: coefficients must be real.
            for (const auto& t : m.poly.terms())
                if (std::abs(t.coeff.imag()) > 1e-14 * scale)
                    throw RealityError(std::string(which) +
                                       " mode (0,0) has a non-real coefficient");
            continue;
        }
        auto pkey = std::make_pair(-m.nu0, -m.sigma0);
        auto it = index.find(pkey);
        if (it == index.end()) {
            if (!realify)
                throw RealityError(std::string(which) + " mode " +
                                   mode_name(m.nu0, m.sigma0) +
                                   " lacks its conjugate partner");
            extra.push_back({-m.nu0, -m.sigma0, m.poly.conjugated()});
            index[pkey] = modes.size() + extra.size() - 1;
        } else {
            // Partner present: verify it actually conjugates this one.
            const BivarPoly want = m.poly.conjugated();
            const BivarPoly& have = modes[it->second].poly;
            if (want.terms().size() != have.terms().size())
                throw RealityError(std::string(which) + " modes " +
                                   mode_name(m.nu0, m.sigma0) + " and " +
                                   mode_name(-m.nu0, -m.sigma0) + " are not conjugate");
            for (std::size_t i = 0; i < want.terms().size(); ++i) {
                const auto& a = want.terms()[i];
                const auto& b = have.terms()[i];
                if (a.degA != b.degA || a.degC != b.degC ||
                    std::abs(a.coeff - b.coeff) > 1e-14 * scale)
                    throw RealityError(std::string(which) + " modes " +
                                       mode_name(m.nu0, m.sigma0) + " and " +
                                       mode_name(-m.nu0, -m.sigma0) + " are not conjugate");
            }
        }
    }
    for (auto& m : extra) modes.push_back(std::move(m));
    std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
        return std::make_pair(a.nu0, a.sigma0) < std::make_pair(b.nu0, b.sigma0);
    });
    return modes;
}

} // namespace

TrigSystem::TrigSystem(RealPoly omega, std::vector<Mode> f_modes, std::vector<Mode> g_modes,
                       bool realify)
    : omega_(std::move(omega)),
      omega_d_(omega_.deriv()),
      f_(close_under_conjugation(std::move(f_modes), realify, "F")),
      g_(close_under_conjugation(std::move(g_modes), realify, "G")) {}

namespace {

cplx eval_modes(const std::vector<Mode>& modes, double alpha, double A, double C, double t) {
    cplx s(0.0, 0.0);
    for (const auto& m : modes)
        s += m.poly.eval(A, C) * std::polar(1.0, m.nu0 * alpha + m.sigma0 * t);
    return s;
}

long double eval_modes_ld(const std::vector<Mode>& modes, long double alpha, long double A,
                          long double C, long double t) {
    long double s = 0.0L;
    for (const auto& m : modes) {
        long double ph = m.nu0 * alpha + m.sigma0 * t;
        std::complex<long double> e(std::cos(ph), std::sin(ph));
        std::complex<long double> P(0.0L, 0.0L);
        for (const auto& term : m.poly.terms()) {
            long double mono = 1.0L;
            for (int i = 0; i < term.degA; ++i) mono *= A;
            for (int i = 0; i < term.degC; ++i) mono *= C;
            P += std::complex<long double>(term.coeff.real(), term.coeff.imag()) * mono;
        }
        s += (P * e).real();
    }
    return s;
}

} // namespace

double TrigSystem::eval_F(double alpha, double A, double C, double t) const {
    return eval_modes(f_, alpha, A, C, t).real();
}
double TrigSystem::eval_G(double alpha, double A, double C, double t) const {
    return eval_modes(g_, alpha, A, C, t).real();
}
cplx TrigSystem::eval_F_complex(double alpha, double A, double C, double t) const {
    return eval_modes(f_, alpha, A, C, t);
}
cplx TrigSystem::eval_G_complex(double alpha, double A, double C, double t) const {
    return eval_modes(g_, alpha, A, C, t);
}
long double TrigSystem::eval_F_ld(long double alpha, long double A, long double C,
                                  long double t) const {
    return eval_modes_ld(f_, alpha, A, C, t);
}
long double TrigSystem::eval_G_ld(long double alpha, long double A, long double C,
                                  long double t) const {
    return eval_modes_ld(g_, alpha, A, C, t);
}

int TrigSystem::max_base_index(int p, int q) const {
    int m = 0;
    for (const auto* list : {&f_, &g_})
        for (const auto& mode : *list)
            m = std::max(m, std::abs(mode.nu0 * p + mode.sigma0 * q));
    return m;
}

int TrigSystem::max_sigma() const {
    int m = 0;
    for (const auto* list : {&f_, &g_})
        for (const auto& mode : *list) m = std::max(m, std::abs(mode.sigma0));
    return m;
}

double TrigSystem::coeff_scale() const {
    double m = 0.0;
    for (const auto* list : {&f_, &g_})
        for (const auto& mode : *list) m = std::max(m, mode.poly.max_coeff());
    return m;
}

// ---------------------------------------------------------------------------
// Resonance
// ---------------------------------------------------------------------------

ResonanceContext resonance_context(const TrigSystem& sys, int p, int q, double lo, double hi) {
    if (q < 1) throw ConfigError("resonance order q must be positive");
    if (p == 0) throw ConfigError("resonance order p must be nonzero");
    if (std::gcd(std::abs(p), q) != 1)
        throw ConfigError("resonance orders p, q must be coprime");
    if (hi < lo) std::swap(lo, hi);

    const double target = double(p) / double(q);
    auto f = [&](double A) { return sys.omega(A) - target; };
    const double tol = 1e-12 * std::max(1.0, std::abs(target));

    double A0;
    if (lo == hi) {
        A0 = lo; // caller supplied the root directly; polish below
        if (std::abs(f(A0)) > 1e-3 * std::max(1.0, std::abs(target)))
            throw NoResonance("supplied resonance point is not close to a root");
    } else {
        double flo = f(lo), fhi = f(hi);
        if (flo == 0.0) {
            A0 = lo;
        } else if (fhi == 0.0) {
            A0 = hi;
        } else {
            if (flo * fhi > 0.0)
                throw NoResonance("no sign change of omega(A) - p/q inside the bracket");
            double a = lo, b = hi, fa = flo;
            for (int i = 0; i < 200 && b - a > 1e-16 * std::max(1.0, std::abs(a) + std::abs(b));
                 ++i) {
                double m = 0.5 * (a + b), fm = f(m);
                if (fm == 0.0) { a = b = m; break; }
                if (fa * fm < 0.0) b = m;
                else { a = m; fa = fm; }
            }
            A0 = 0.5 * (a + b);
        }
    }
    // Newton polish; bisection already put us in the basin.
    for (int i = 0; i < 8; ++i) {
        double d = sys.omega_prime(A0);
        if (d == 0.0) break;
        double step = f(A0) / d;
        A0 -= step;
        if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(A0))) break;
    }
    if (std::abs(f(A0)) > tol)
        throw NoResonance("failed to resolve omega(A0) = p/q to tolerance");

    double op = sys.omega_prime(A0);
    if (std::abs(op) < 1e-10)
        throw AnisochronyViolation("frequency map is flat at the resonant orbit (omega'(A0) = 0)");

    ResonanceContext ctx;
    ctx.p = p;
    ctx.q = q;
    ctx.A0 = A0;
    ctx.T = 2.0 * M_PI * q;
    ctx.omega_base = 1.0 / double(q);
    ctx.omega_prime = op;
    return ctx;
}

// ---------------------------------------------------------------------------
// JetTable
// ---------------------------------------------------------------------------

JetTable::JetTable(const TrigSystem& sys, const ResonanceContext& ctx, double C0, int kmax)
    : A0_(ctx.A0), C0_(C0), kmax_(kmax) {
    auto build = [&](const std::vector<Mode>& modes, std::vector<ModeJets>& out) {
        for (const auto& m : modes) {
            ModeJets mj;
            mj.nu0 = m.nu0;
            mj.sigma0 = m.sigma0;
            mj.degA = m.poly.degA();
            mj.degC = m.poly.degC();
            mj.v.resize(std::size_t(mj.degA + 1) * std::size_t(mj.degC + 1));
            for (int r2 = 0; r2 <= mj.degA; ++r2)
                for (int r3 = 0; r3 <= mj.degC; ++r3) {
                    cplx j = m.poly.jet(r2, r3, A0_, C0_);
                    mj.v[std::size_t(r2) * std::size_t(mj.degC + 1) + std::size_t(r3)] = j;
                    scale_ = std::max(scale_, std::abs(j));
                }
            out.push_back(std::move(mj));
        }
    };
    build(sys.f_modes(), f_);
    build(sys.g_modes(), g_);
}

} // namespace subh
