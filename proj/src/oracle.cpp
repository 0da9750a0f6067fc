#include "subh/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace subh {

namespace {

Vec2 axpy(Vec2 y, double a, const Vec2& x) {
    y[0] += a * x[0];
    y[1] += a * x[1];
    return y;
}

// Bisection to ~1e-14 relative on the dense output; the bracket comes from
// one integrator step, so the root inside it is simple.
double refine_root(const Trajectory& traj, int comp, double lo, double hi) {
    double flo = traj.eval(lo)[comp];
    if (flo == 0.0) return lo;
    for (int i = 0; i < 100 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo) + std::abs(hi));
         ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = traj.eval(mid)[comp];
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

Vec2 DenseStep::eval(double tq) const {
    double th = (tq - t) / h;
    double th1 = 1.0 - th;
    Vec2 out;
    for (int i = 0; i < 2; ++i)
        out[i] = rcont[0][i] +
                 th * (rcont[1][i] + th1 * (rcont[2][i] + th * (rcont[3][i] + th1 * rcont[4][i])));
    return out;
}

Vec2 Trajectory::eval(double tq) const {
    if (dense.empty()) {
        if (!y.empty()) return y.front();
        throw Error("dense evaluation on an empty trajectory");
    }
    double lo = t_begin(), hi = t_end();
    double span = std::abs(hi - lo);
    if (tq < std::min(lo, hi) - 1e-9 * span || tq > std::max(lo, hi) + 1e-9 * span)
        throw Error("dense evaluation outside the integrated interval");
    // t has one node per step boundary; step i covers [t[i], t[i+1]].
    auto it = std::upper_bound(t.begin(), t.end(), tq);
    std::size_t i = it == t.begin() ? 0 : std::size_t(it - t.begin()) - 1;
    if (i >= dense.size()) i = dense.size() - 1;
    return dense[i].eval(tq);
}

Trajectory integrate(const Rhs& rhs, Vec2 y0, double t_begin, double t_end, double tol) {
    // Dormand-Prince 5(4), first-same-as-last, with a quartic interpolant
    // per accepted step.
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    Trajectory traj;
    traj.tol = tol;
    traj.t.push_back(t_begin);
    traj.y.push_back(y0);
    if (t_end == t_begin) return traj;

    const double dir = t_end > t_begin ? 1.0 : -1.0;
    const double span = std::abs(t_end - t_begin);
    double t = t_begin;
    Vec2 y = y0;
    Vec2 k1 = rhs(t, y);
    double h = dir * std::min(span, std::max(1e-8, 0.01 * span));
    double facmax = 5.0;
    long steps = 0;

    while (dir * (t_end - t) > 0.0) {
        if (++steps > 2000000) throw StepUnderflow("integrator step budget exhausted");
        if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
            throw StepUnderflow("integrator step size underflow");
        if (dir * (t + h - t_end) > 0.0) h = t_end - t;

        Vec2 y2 = axpy(y, h * a21, k1);
        Vec2 k2 = rhs(t + c2 * h, y2);
        Vec2 y3 = axpy(axpy(y, h * a31, k1), h * a32, k2);
        Vec2 k3 = rhs(t + c3 * h, y3);
        Vec2 y4 = axpy(axpy(axpy(y, h * a41, k1), h * a42, k2), h * a43, k3);
        Vec2 k4 = rhs(t + c4 * h, y4);
        Vec2 y5 = axpy(axpy(axpy(axpy(y, h * a51, k1), h * a52, k2), h * a53, k3), h * a54, k4);
        Vec2 k5 = rhs(t + c5 * h, y5);
        Vec2 y6 = axpy(axpy(axpy(axpy(axpy(y, h * a61, k1), h * a62, k2), h * a63, k3), h * a64, k4),
                       h * a65, k5);
        Vec2 k6 = rhs(t + h, y6);
        Vec2 ynew = axpy(axpy(axpy(axpy(axpy(y, h * b1, k1), h * b3, k3), h * b4, k4), h * b5, k5),
                         h * b6, k6);
        Vec2 k7 = rhs(t + h, ynew);

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k7[i]);
            double sc = tol + tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(0.5 * err);

        if (err <= 1.0) {
            DenseStep ds;
            ds.t = t;
            ds.h = h;
            for (int i = 0; i < 2; ++i) {
                double ydiff = ynew[i] - y[i];
                double bspl = h * k1[i] - ydiff;
                ds.rcont[0][i] = y[i];
                ds.rcont[1][i] = ydiff;
                ds.rcont[2][i] = bspl;
                ds.rcont[3][i] = ydiff - h * k7[i] - bspl;
                ds.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                      d6 * k6[i] + d7 * k7[i]);
            }
            traj.dense.push_back(ds);
            t += h;
            y = ynew;
            k1 = k7;
            traj.t.push_back(t);
            traj.y.push_back(y);
            double fac = err == 0.0 ? facmax
                                    : std::min(facmax, std::max(0.2, 0.9 * std::pow(err, -0.2)));
            h *= fac;
            facmax = 5.0;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            facmax = 1.0;
        }
    }
    return traj;
}

std::vector<double> section_crossings(const Trajectory& traj, int comp, double from_t,
                                      int max_count, int direction) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < traj.t.size() && int(out.size()) < max_count; ++i) {
        double t1 = traj.t[i], t2 = traj.t[i + 1];
        if (t2 <= from_t) continue;
        double g1 = traj.y[i][comp], g2 = traj.y[i + 1][comp];
        if (g1 == 0.0) {
            if (t1 > from_t && (direction == 0 || direction * g2 > 0.0)) out.push_back(t1);
            continue;
        }
        if (g1 * g2 < 0.0) {
            if (direction != 0 && direction * (g2 - g1) < 0.0) continue;
            double root = refine_root(traj, comp, t1, t2);
            if (root > from_t) out.push_back(root);
        }
    }
    return out;
}

PeriodicOrbit try_shoot_periodic(const Rhs& rhs, Vec2 guess, double T, double drift0,
                                 double tol_defect, int max_iter, double ode_tol) {
    PeriodicOrbit orbit;
    orbit.period = T;
    Vec2 x = guess;

    auto residual = [&](const Vec2& x0) {
        Vec2 xe = integrate(rhs, x0, 0.0, T, ode_tol).y.back();
        return Vec2{xe[0] - x0[0] - drift0, xe[1] - x0[1]};
    };

    try {
        for (int it = 0; it <= max_iter; ++it) {
            Vec2 R = residual(x);
            double defect = std::max(std::abs(R[0]), std::abs(R[1]));
            double xn = std::max(std::abs(x[0]), std::abs(x[1]));
            orbit.ic = x;
            orbit.defect = defect;
            orbit.iterations = it;
            if (defect <= tol_defect * std::max(1.0, xn)) {
                orbit.converged = true;
                return orbit;
            }
            if (it == max_iter) break;

            double J[2][2];
            for (int col = 0; col < 2; ++col) {
                double d = 1e-6 * std::max(1.0, std::abs(x[col]));
                Vec2 xp = x, xm = x;
                xp[col] += d;
                xm[col] -= d;
                Vec2 Rp = residual(xp), Rm = residual(xm);
                J[0][col] = (Rp[0] - Rm[0]) / (2.0 * d);
                J[1][col] = (Rp[1] - Rm[1]) / (2.0 * d);
            }
            double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
            if (std::abs(det) < 1e-14) return orbit;
            Vec2 dx{(-R[0] * J[1][1] + R[1] * J[0][1]) / det,
                    (-R[1] * J[0][0] + R[0] * J[1][0]) / det};
            double mag = std::max(std::abs(dx[0]), std::abs(dx[1]));
            if (mag > 0.5) {
                dx[0] *= 0.5 / mag;
                dx[1] *= 0.5 / mag;
            }
            x[0] += dx[0];
            x[1] += dx[1];
        }
    } catch (const StepUnderflow&) {
        orbit.converged = false;
    }
    return orbit;
}

PeriodicOrbit shoot_periodic(const Rhs& rhs, Vec2 guess, double T, double drift0,
                             double tol_defect, int max_iter, double ode_tol) {
    PeriodicOrbit orbit = try_shoot_periodic(rhs, guess, T, drift0, tol_defect, max_iter, ode_tol);
    if (!orbit.converged) throw NoConvergence("shooting iteration did not converge");
    return orbit;
}

EmpiricalThresholds empirical_curve(const std::function<Rhs(double C)>& make_rhs,
                                    const std::function<std::vector<Vec2>(double C)>& seeds_for,
                                    double T, double drift0, double C_inner, double C_lo,
                                    double C_hi, double tol_defect, double ode_tol,
                                    int bisect_steps) {
    auto exists = [&](double C) {
        Rhs rhs = make_rhs(C);
        for (const Vec2& seed : seeds_for(C))
            if (try_shoot_periodic(rhs, seed, T, drift0, tol_defect, 25, ode_tol).converged)
                return true;
        return false;
    };

    if (!exists(C_inner))
        throw NoExistenceAnywhere("no periodic solution found even at the interior C value");

    EmpiricalThresholds out;
    if (exists(C_hi)) {
        out.C_max_hat = C_hi;
        out.upper_saturated = true;
    } else {
        double lo = C_inner, hi = C_hi;
        for (int i = 0; i < bisect_steps; ++i) {
            double mid = 0.5 * (lo + hi);
            (exists(mid) ? lo : hi) = mid;
        }
        out.C_max_hat = lo;
    }
    if (exists(C_lo)) {
        out.C_min_hat = C_lo;
        out.lower_saturated = true;
    } else {
        double lo = C_lo, hi = C_inner;
        for (int i = 0; i < bisect_steps; ++i) {
            double mid = 0.5 * (lo + hi);
            (exists(mid) ? hi : lo) = mid;
        }
        out.C_min_hat = hi;
    }
    return out;
}

} // namespace subh
