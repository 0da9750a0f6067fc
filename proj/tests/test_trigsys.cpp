#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "subh/config.hpp"
#include "subh/errors.hpp"
#include "subh/spectrum.hpp"
#include "subh/trig_system.hpp"

using namespace subh;

namespace {

// G = -C + sin(alpha - t): the resonant pendulum-like benchmark.
TrigSystem pendulum() {
    std::vector<Mode> g;
    g.push_back({0, 0, BivarPoly({{0, 1, cplx(-1.0, 0.0)}})});
    g.push_back({1, -1, BivarPoly({{0, 0, cplx(0.0, -0.5)}})});
    return TrigSystem(RealPoly({0.0, 1.0}), {}, std::move(g));
}

} // namespace

TEST_CASE("real polynomial evaluation and derivative") {
    RealPoly p({1.0, -2.0, 0.0, 3.0}); // 1 - 2x + 3x^3
    CHECK(p.eval(0.0) == doctest::Approx(1.0));
    CHECK(p.eval(2.0) == doctest::Approx(1.0 - 4.0 + 24.0));
    RealPoly d = p.deriv();
    CHECK(d.eval(2.0) == doctest::Approx(-2.0 + 9.0 * 4.0));
    CHECK(RealPoly({5.0}).deriv().eval(3.0) == doctest::Approx(0.0));
}

TEST_CASE("bivariate polynomial jets are scaled Taylor coefficients") {
    // P = (2 + i) A^2 C + 3 A
    BivarPoly p({{2, 1, cplx(2.0, 1.0)}, {1, 0, cplx(3.0, 0.0)}});
    CHECK(p.degA() == 2);
    CHECK(p.degC() == 1);
    double A = 1.3, C = -0.7;
    CHECK(p.jet(0, 0, A, C) == p.eval(A, C));
    // d_A P / 1! = 2 (2+i) A C + 3
    cplx dA = cplx(2.0, 1.0) * 2.0 * A * C + 3.0;
    CHECK(std::abs(p.jet(1, 0, A, C) - dA) < 1e-14);
    // d_A^2 P / 2! = (2+i) C
    CHECK(std::abs(p.jet(2, 0, A, C) - cplx(2.0, 1.0) * C) < 1e-14);
    // d_A d_C P / 1!1! = 2 (2+i) A
    CHECK(std::abs(p.jet(1, 1, A, C) - cplx(2.0, 1.0) * 2.0 * A) < 1e-14);
    CHECK(p.jet(3, 0, A, C) == cplx(0.0, 0.0));
    CHECK(p.jet(0, 2, A, C) == cplx(0.0, 0.0));

    BivarPoly q = p.conjugated();
    CHECK(std::abs(q.eval(A, C) - std::conj(p.eval(A, C))) < 1e-14);
}

TEST_CASE("spectrum arithmetic") {
    Spectrum s;
    s.add(1, cplx(0.5, -0.25));
    s.add(1, cplx(0.5, 0.25));
    s.add(-1, cplx(1.0, 0.0));
    s.add(3, cplx(0.0, 0.0)); // exact zero is not stored
    CHECK(s.size() == 2);
    CHECK(s.at(1) == cplx(1.0, 0.0));
    CHECK(s.at(99) == cplx(0.0, 0.0));
    CHECK(s.max_index() == 1);
    CHECK(s.max_abs() == doctest::Approx(1.0));

    // eval agrees with the explicit exponential sum
    double th = 0.8;
    cplx direct = cplx(1.0, 0.0) * std::polar(1.0, th) + cplx(1.0, 0.0) * std::polar(1.0, -th);
    CHECK(std::abs(s.eval(th) - direct) < 1e-15);

    // reality defect vanishes iff coefficients pair up conjugately
    CHECK(s.reality_defect() == doctest::Approx(0.0));
    Spectrum bad;
    bad.add(2, cplx(1.0, 1.0));
    CHECK(bad.reality_defect() > 1.0);

    // convolution is pointwise multiplication after evaluation
    Spectrum a, b;
    a.add(0, cplx(2.0, 0.0));
    a.add(1, cplx(0.0, 1.0));
    b.add(-1, cplx(1.0, 0.5));
    b.add(2, cplx(-0.5, 0.0));
    Spectrum c = convolve(a, b);
    CHECK(std::abs(c.eval(th) - a.eval(th) * b.eval(th)) < 1e-14);
}

TEST_CASE("mode lists close under conjugation") {
    TrigSystem sys = pendulum();
    // sin(alpha - t) needs both (1,-1) and (-1,1)
    CHECK(sys.g_modes().size() == 3);
    double alpha = 0.9, A = 1.2, C = 0.4, t = 2.1;
    double expect = -C + std::sin(alpha - t);
    CHECK(sys.eval_G(alpha, A, C, t) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(std::abs(sys.eval_G_complex(alpha, A, C, t).imag()) < 1e-15);
    CHECK(sys.eval_F(alpha, A, C, t) == doctest::Approx(0.0));
    CHECK(sys.max_base_index(1, 1) == 0);  // every mode is resonant at 1:1
    CHECK(sys.max_base_index(2, 1) == 1);  // (1,-1) drifts at 2:1
    CHECK(sys.max_sigma() == 1);

    SUBCASE("missing partner throws without realify") {
        std::vector<Mode> g;
        g.push_back({1, -1, BivarPoly({{0, 0, cplx(0.0, -0.5)}})});
        CHECK_THROWS_AS(TrigSystem(RealPoly({0.0, 1.0}), {}, std::move(g), false), RealityError);
    }
    SUBCASE("non-real constant mode throws") {
        std::vector<Mode> g;
        g.push_back({0, 0, BivarPoly({{0, 0, cplx(0.0, 1.0)}})});
        CHECK_THROWS_AS(TrigSystem(RealPoly({0.0, 1.0}), {}, std::move(g)), RealityError);
    }
    SUBCASE("duplicate mode throws") {
        std::vector<Mode> g;
        g.push_back({1, -1, BivarPoly({{0, 0, cplx(0.0, -0.5)}})});
        g.push_back({1, -1, BivarPoly({{0, 0, cplx(0.0, 0.5)}})});
        CHECK_THROWS_AS(TrigSystem(RealPoly({0.0, 1.0}), {}, std::move(g)), ConfigError);
    }
}

TEST_CASE("resonance location") {
    TrigSystem sys = pendulum();
    ResonanceContext ctx = resonance_context(sys, 1, 1, -10.0, 10.0);
    CHECK(ctx.A0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ctx.T == doctest::Approx(2.0 * M_PI));
    CHECK(ctx.omega_base == doctest::Approx(1.0));
    CHECK(ctx.omega_prime == doctest::Approx(1.0));

    ResonanceContext ctx3 = resonance_context(sys, 1, 3, -10.0, 10.0);
    CHECK(ctx3.A0 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(ctx3.T == doctest::Approx(6.0 * M_PI));
    CHECK(ctx3.omega_base == doctest::Approx(1.0 / 3.0));

    SUBCASE("bracket without the root") {
        CHECK_THROWS_AS(resonance_context(sys, 1, 1, 2.0, 10.0), NoResonance);
    }
    SUBCASE("flat frequency map") {
        std::vector<Mode> g;
        g.push_back({0, 0, BivarPoly({{0, 1, cplx(-1.0, 0.0)}})});
        TrigSystem iso(RealPoly({1.0}), {}, std::move(g));
        CHECK_THROWS_AS(resonance_context(iso, 1, 1, -10.0, 10.0), AnisochronyViolation);
    }
    SUBCASE("invalid resonance fractions") {
        CHECK_THROWS_AS(resonance_context(sys, 0, 1, -10.0, 10.0), ConfigError);
        CHECK_THROWS_AS(resonance_context(sys, 1, 0, -10.0, 10.0), ConfigError);
        CHECK_THROWS_AS(resonance_context(sys, 2, 4, -10.0, 10.0), ConfigError);
    }
    SUBCASE("point bracket is polished as a root candidate") {
        ResonanceContext c = resonance_context(sys, 1, 1, 1.0, 1.0);
        CHECK(c.A0 == doctest::Approx(1.0));
    }
}

TEST_CASE("jet tables evaluate mode polynomials at the base point") {
    std::vector<Mode> g;
    g.push_back({0, 0, BivarPoly({{0, 1, cplx(-1.0, 0.0)}})});
    g.push_back({1, -1, BivarPoly({{2, 1, cplx(0.0, -0.5)}, {0, 0, cplx(1.0, 0.0)}})});
    TrigSystem sys(RealPoly({0.0, 1.0}), {}, std::move(g));
    ResonanceContext ctx = resonance_context(sys, 1, 1, -10.0, 10.0);
    double C0 = 0.3;
    JetTable jets = jets_at(sys, ctx, C0, 4);
    CHECK(jets.A0() == doctest::Approx(1.0));
    CHECK(jets.C0() == doctest::Approx(0.3));
    CHECK(jets.G().size() == 3);
    CHECK(jets.F().empty());
    for (const auto& mj : jets.G()) {
        const Mode* src = nullptr;
        for (const auto& m : sys.g_modes())
            if (m.nu0 == mj.nu0 && m.sigma0 == mj.sigma0) src = &m;
        REQUIRE(src != nullptr);
        for (int r2 = 0; r2 <= mj.degA + 1; ++r2)
            for (int r3 = 0; r3 <= mj.degC + 1; ++r3)
                CHECK(std::abs(mj.jet(r2, r3) - src->poly.jet(r2, r3, ctx.A0, C0)) < 1e-14);
    }
    CHECK(jets.scale() > 0.0);
}

TEST_CASE("config parsing") {
    const char* text = R"(
# comment
[system]
omega = [0.0, 1.0]

[[G.modes]]
nu = 0
sigma = 0
coeff = [[0, 1, -1.0, 0.0]]

[[G.modes]]
nu = 1
sigma = -1
coeff = [[0, 0, 0.0, -0.5]]
)";
    ParsedConfig cfg = parse_config_text(text);
    REQUIRE(cfg.trig.has_value());
    CHECK(!cfg.mechanical.has_value());
    CHECK(cfg.trig->g_modes().size() == 3);
    CHECK(cfg.trig->omega(2.0) == doctest::Approx(2.0));

    SUBCASE("mechanical section") {
        const char* mech = R"(
[mechanical]
g = [0.0, 0.0, 0.0, 1.0]

[[mechanical.f_modes]]
sigma = 1
coeff_x = [0.5]
)";
        ParsedConfig m = parse_config_text(mech);
        REQUIRE(m.mechanical.has_value());
        CHECK(!m.trig.has_value());
    }
    SUBCASE("rejects unknown tables and keys") {
        CHECK_THROWS_AS(parse_config_text("[bogus]\nx = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("[system]\nomega = [1.0]\nweird = 2\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("[system]\nomega = [1.0]\nomega = [2.0]\n"), ConfigError);
    }
    SUBCASE("rejects malformed values") {
        CHECK_THROWS_AS(parse_config_text("[system]\nomega = [1.0,]\nx"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("[system]\nomega = oops\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("key = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text(""), ConfigError);
    }
    SUBCASE("mode entries are validated") {
        CHECK_THROWS_AS(parse_config_text("[system]\nomega = [0.0, 1.0]\n[[G.modes]]\nnu = 1\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_text("[system]\nomega = [0.0, 1.0]\n[[G.modes]]\nnu = 0\n"
                                          "sigma = 0\ncoeff = [[0, 1, -1.0]]\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_text("[system]\nomega = [0.0, 1.0]\n[[G.modes]]\nnu = 0.5\n"
                                          "sigma = 0\ncoeff = [[0, 1, -1.0, 0.0]]\n"),
                        ConfigError);
    }
}
