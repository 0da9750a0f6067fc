#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "subh/errors.hpp"
#include "subh/melnikov.hpp"
#include "subh/oracle.hpp"
#include "subh/series.hpp"
#include "subh/trig_system.hpp"

using namespace subh;

namespace {

TrigSystem pendulum() {
    std::vector<Mode> g;
    g.push_back({0, 0, BivarPoly({{0, 1, cplx(-1.0, 0.0)}})});
    g.push_back({1, -1, BivarPoly({{0, 0, cplx(0.0, -0.5)}})});
    return TrigSystem(RealPoly({0.0, 1.0}), {}, std::move(g));
}

TrigSystem pendulum_cos() {
    std::vector<Mode> g;
    g.push_back({0, 0, BivarPoly({{0, 1, cplx(-1.0, 0.0)}})});
    g.push_back({1, -1, BivarPoly({{0, 0, cplx(0.0, -0.5)}})});
    g.push_back({0, 1, BivarPoly({{0, 0, cplx(0.5, 0.0)}})});
    return TrigSystem(RealPoly({0.0, 1.0}), {}, std::move(g));
}

Rhs trig_rhs(const TrigSystem& sys, double eps, double C) {
    return [&sys, eps, C](double t, const Vec2& y) -> Vec2 {
        return {sys.omega(y[1]) + eps * sys.eval_F(y[0], y[1], C, t),
                eps * sys.eval_G(y[0], y[1], C, t)};
    };
}

// Seed states on the unperturbed resonant orbit, one per phase.
Vec2 series_seed(const TrigSystem& sys, const ResonanceContext& ctx, double t0, double eps,
                 int order) {
    SeriesState st = SeriesState::init_c_mode(sys, ctx, t0);
    st.compute_to(order);
    StatePoint sp = st.evaluate(eps, -t0);
    return {sp.alpha, sp.A};
}

} // namespace

TEST_CASE("integrator closes the harmonic oscillator") {
    Rhs rhs = [](double, const Vec2& y) -> Vec2 { return {y[1], -y[0]}; };
    Vec2 y0{1.0, 0.0};
    Trajectory traj = integrate(rhs, y0, 0.0, 2.0 * M_PI, 1e-12);
    Vec2 yT = traj.y.back();
    CHECK(std::abs(yT[0] - 1.0) < 1e-10);
    CHECK(std::abs(yT[1]) < 1e-10);

    // dense output reproduces cos/sin between accepted steps
    for (double t : {0.31, 1.77, 3.9, 5.2}) {
        Vec2 y = traj.eval(t);
        CHECK(std::abs(y[0] - std::cos(t)) < 1e-10);
        CHECK(std::abs(y[1] + std::sin(t)) < 1e-10);
    }

    SUBCASE("tightening the tolerance tightens the closure") {
        double loose = 0.0, tight = 0.0;
        Vec2 a = integrate(rhs, y0, 0.0, 20.0 * M_PI, 1e-6).y.back();
        Vec2 b = integrate(rhs, y0, 0.0, 20.0 * M_PI, 1e-12).y.back();
        loose = std::hypot(a[0] - 1.0, a[1]);
        tight = std::hypot(b[0] - 1.0, b[1]);
        CHECK(tight < loose);
        CHECK(tight < 1e-9);
    }
    SUBCASE("step underflow is reported") {
        Rhs blowup = [](double t, const Vec2& y) -> Vec2 {
            double d = 1.0 - t;
            return {y[0] / (d * d), 0.0};
        };
        CHECK_THROWS_AS(integrate(blowup, {1.0, 0.0}, 0.0, 2.0, 1e-10), StepUnderflow);
    }
}

TEST_CASE("section crossings are refined on the dense output") {
    Rhs rhs = [](double, const Vec2& y) -> Vec2 { return {y[1], -y[0]}; };
    Trajectory traj = integrate(rhs, {1.0, 0.0}, 0.0, 10.0, 1e-12);
    // y0 = cos t crosses zero at odd multiples of pi/2
    auto all = section_crossings(traj, 0, 0.0, 10);
    REQUIRE(all.size() == 3);
    CHECK(all[0] == doctest::Approx(M_PI / 2.0).epsilon(1e-9));
    CHECK(all[1] == doctest::Approx(3.0 * M_PI / 2.0).epsilon(1e-9));
    CHECK(all[2] == doctest::Approx(5.0 * M_PI / 2.0).epsilon(1e-9));
    auto falling = section_crossings(traj, 0, 0.0, 10, -1);
    REQUIRE(falling.size() == 2);
    CHECK(falling[0] == doctest::Approx(M_PI / 2.0).epsilon(1e-9));
}

TEST_CASE("shooting finds the subharmonic orbit") {
    TrigSystem sys = pendulum();
    ResonanceContext ctx = resonance_context(sys, 1, 1, -10.0, 10.0);
    const double T = 2.0 * M_PI, drift = 2.0 * M_PI;
    double eps = 0.05;

    SUBCASE("inside the existence wedge") {
        Rhs rhs = trig_rhs(sys, eps, 0.3);
        // a phase whose predicted friction sits near C = 0.3: sin t0 = -0.3
        double t0 = M_PI + std::asin(0.3);
        PeriodicOrbit orb = shoot_periodic(rhs, series_seed(sys, ctx, t0, eps, 4), T, drift);
        CHECK(orb.converged);
        CHECK(orb.defect <= 1e-10);
        CHECK(orb.iterations <= 6);
        // the orbit closes: advance by T and compare against the drift
        Trajectory traj = integrate(rhs, orb.ic, 0.0, T, 1e-12);
        Vec2 yT = traj.y.back();
        CHECK(std::abs(yT[0] - orb.ic[0] - drift) < 1e-8);
        CHECK(std::abs(yT[1] - orb.ic[1]) < 1e-8);
    }
    SUBCASE("outside the existence wedge") {
        Rhs rhs = trig_rhs(sys, eps, 1.5);
        PeriodicOrbit orb = try_shoot_periodic(rhs, series_seed(sys, ctx, M_PI, eps, 4), T, drift);
        CHECK(!orb.converged);
        CHECK_THROWS_AS(shoot_periodic(rhs, series_seed(sys, ctx, M_PI, eps, 4), T, drift),
                        NoConvergence);
    }
    SUBCASE("initial conditions vary continuously in eps") {
        double t0 = M_PI + std::asin(0.3);
        double prev_gap = -1.0;
        for (double e : {0.08, 0.04, 0.02}) {
            Rhs rhs = trig_rhs(sys, e, 0.3);
            PeriodicOrbit orb = shoot_periodic(rhs, series_seed(sys, ctx, t0, e, 4), T, drift);
            Vec2 seed = series_seed(sys, ctx, t0, e, 4);
            double gap = std::hypot(orb.ic[0] - seed[0], orb.ic[1] - seed[1]);
            CHECK(gap <= 2.0 * e);
            if (prev_gap >= 0.0) CHECK(gap <= prev_gap + 1e-12);
            prev_gap = gap;
        }
    }
}

TEST_CASE("series predictions agree with shooting near the boundary") {
    // Convergence holds a safe margin inside the predicted existence region
    // and fails the same margin outside it.
    for (const TrigSystem& sys : {pendulum(), pendulum_cos()}) {
        ResonanceContext ctx = resonance_context(sys, 1, 1, -10.0, 10.0);
        const double T = 2.0 * M_PI, drift = 2.0 * M_PI;
        for (double eps : {0.01, 0.05}) {
            std::vector<SeriesState> states;
            for (int i = 0; i < 16; ++i) {
                SeriesState st =
                    SeriesState::init_c_mode(sys, ctx, 2.0 * M_PI * double(i) / 16.0);
                st.compute_to(4);
                states.push_back(std::move(st));
            }
            double cmax = -1e300, cmin = 1e300;
            for (const auto& st : states) {
                cmax = std::max(cmax, st.C_of_eps(eps));
                cmin = std::min(cmin, st.C_of_eps(eps));
            }
            auto converges_at = [&](double C) {
                Rhs rhs = trig_rhs(sys, eps, C);
                for (const auto& st : states) {
                    StatePoint sp = st.evaluate(eps, -st.t0());
                    PeriodicOrbit orb = try_shoot_periodic(rhs, {sp.alpha, sp.A}, T, drift);
                    if (orb.converged) return true;
                }
                return false;
            };
            CHECK(converges_at(0.9 * cmax + 0.1 * cmin));
            CHECK(converges_at(0.1 * cmax + 0.9 * cmin));
            double span = cmax - cmin;
            CHECK(!converges_at(cmax + 0.1 * span));
            CHECK(!converges_at(cmin - 0.1 * span));
        }
    }
}

TEST_CASE("empirical thresholds recover the analytic boundary") {
    TrigSystem sys = pendulum();
    ResonanceContext ctx = resonance_context(sys, 1, 1, -10.0, 10.0);
    const double T = 2.0 * M_PI, drift = 2.0 * M_PI;
    double eps = 0.05;
    std::vector<SeriesState> states;
    for (int i = 0; i < 16; ++i) {
        SeriesState st = SeriesState::init_c_mode(sys, ctx, 2.0 * M_PI * double(i) / 16.0);
        st.compute_to(4);
        states.push_back(std::move(st));
    }
    auto make_rhs = [&](double C) { return trig_rhs(sys, eps, C); };
    auto seeds_for = [&](double C) {
        std::vector<Vec2> seeds;
        for (const auto& st : states) {
            StatePoint sp = st.evaluate(eps, -st.t0());
            seeds.push_back({sp.alpha, sp.A});
        }
        std::sort(seeds.begin(), seeds.end(), [&](const Vec2&, const Vec2&) { return false; });
        (void)C;
        return seeds;
    };
    EmpiricalThresholds th = empirical_curve(make_rhs, seeds_for, T, drift, 0.0, -2.0, 2.0);
    CHECK(!th.upper_saturated);
    CHECK(!th.lower_saturated);
    CHECK(th.C_max_hat == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(th.C_min_hat == doctest::Approx(-1.0).epsilon(1e-6));

    SUBCASE("saturation is flagged when the bracket is too tight") {
        EmpiricalThresholds sat = empirical_curve(make_rhs, seeds_for, T, drift, 0.0, -0.5, 0.5);
        CHECK(sat.upper_saturated);
        CHECK(sat.lower_saturated);
        CHECK(sat.C_max_hat == doctest::Approx(0.5));
    }
}
