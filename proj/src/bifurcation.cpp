#include "subh/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "subh/parallel.hpp"

namespace subh {

namespace {

constexpr double TWO_PI = 6.283185307179586476925286766559;

double wrap_phase(double t) {
    double w = std::fmod(t, TWO_PI);
    if (w < 0.0) w += TWO_PI;
    return w;
}

// Newton on the derivative, seeded at a grid extremum. Falls back to the
// seed when the curvature is too flat to iterate.
double refine_extremum(const TrigInterp& f, double seed) {
    double t = seed;
    double curv_scale = f.max_coeff() * double(f.degree()) * double(f.degree());
    for (int it = 0; it < 50; ++it) {
        double d2 = f.deriv2(t);
        if (std::abs(d2) < 1e-10 * std::max(curv_scale, 1e-300)) return seed;
        double step = f.deriv(t) / d2;
        t -= step;
        if (std::abs(step) < 1e-14) break;
    }
    if (std::abs(t - seed) > TWO_PI / std::max(1, f.n())) return seed;
    return t;
}

} // namespace

TrigInterp::TrigInterp(const std::vector<double>& samples, double rel_tol) {
    n_ = int(samples.size());
    if (n_ < 1) throw ConfigError("trig interpolant needs at least one sample");
    int half = n_ / 2;
    c_.resize(std::size_t(half) + 1);
    for (int m = 0; m <= half; ++m) {
        cplx acc(0.0, 0.0);
        for (int j = 0; j < n_; ++j)
            acc += samples[std::size_t(j)] *
                   std::polar(1.0, -TWO_PI * double(m) * double(j) / double(n_));
        c_[std::size_t(m)] = acc / double(n_);
        max_coeff_ = std::max(max_coeff_, std::abs(c_[std::size_t(m)]));
    }
    for (int m = half; m >= 1; --m)
        if (std::abs(c_[std::size_t(m)]) > rel_tol * std::max(max_coeff_, 1e-300)) {
            degree_ = m;
            break;
        }
}

double TrigInterp::eval(double t) const {
    int half = n_ / 2;
    double s = c_[0].real();
    for (int m = 1; m <= half; ++m) {
        const cplx& c = c_[std::size_t(m)];
        double cs = std::cos(m * t), sn = std::sin(m * t);
        if (n_ % 2 == 0 && m == half)
            s += c.real() * cs;
        else
            s += 2.0 * (c.real() * cs - c.imag() * sn);
    }
    return s;
}

double TrigInterp::deriv(double t) const {
    int half = n_ / 2;
    double s = 0.0;
    for (int m = 1; m <= half; ++m) {
        const cplx& c = c_[std::size_t(m)];
        double cs = std::cos(m * t), sn = std::sin(m * t);
        if (n_ % 2 == 0 && m == half)
            s += -c.real() * m * sn;
        else
            s += 2.0 * double(m) * (-c.real() * sn - c.imag() * cs);
    }
    return s;
}

double TrigInterp::deriv2(double t) const {
    int half = n_ / 2;
    double s = 0.0;
    for (int m = 1; m <= half; ++m) {
        const cplx& c = c_[std::size_t(m)];
        double m2 = double(m) * double(m);
        double cs = std::cos(m * t), sn = std::sin(m * t);
        if (n_ % 2 == 0 && m == half)
            s += -c.real() * m2 * cs;
        else
            s += -2.0 * m2 * (c.real() * cs - c.imag() * sn);
    }
    return s;
}

int default_grid_size(const TrigSystem& sys, int K) {
    int target = 8 * (1 + 3 * K * std::max(1, sys.max_sigma()));
    int n = 8;
    while (n < target) n *= 2;
    return n;
}

CSurface c_surface(const TrigSystem& sys, const ResonanceContext& ctx, int K, int n_t0,
                   double bracket, int threads) {
    if (K < 0) throw ConfigError("surface order must be nonnegative");
    const int n = n_t0 > 0 ? n_t0 : default_grid_size(sys, K);
    if (n < 4) throw ConfigError("surface needs at least 4 phase samples");

    CSurface surf;
    surf.K = K;
    surf.t0_grid.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) surf.t0_grid[std::size_t(i)] = TWO_PI * double(i) / double(n);
    surf.rows.assign(std::size_t(K) + 1, std::vector<double>(std::size_t(n), 0.0));
    surf.D_row.resize(std::size_t(n));
    std::vector<double> col_scale(std::size_t(n), 0.0);

    parallel_for(n, threads, [&](int i) {
        double t0 = surf.t0_grid[std::size_t(i)];
        auto tag = [t0](const Error& e) {
            std::ostringstream os;
            os << e.what() << " (at t0 = " << t0 << ")";
            return os.str();
        };
        try {
            SeriesState s = SeriesState::init_c_mode(sys, ctx, t0, bracket);
            s.compute_to(K);
            for (int k = 0; k <= K; ++k) surf.rows[std::size_t(k)][std::size_t(i)] = s.C(k);
            surf.D_row[std::size_t(i)] = s.D();
            col_scale[std::size_t(i)] = s.scale();
        } catch (const MelnikovNoRoot& e) {
            throw MelnikovNoRoot(tag(e));
        } catch (const MelnikovDegenerate& e) {
            throw MelnikovDegenerate(tag(e));
        }
    });
    surf.scale = *std::max_element(col_scale.begin(), col_scale.end());
    return surf;
}

BifurcationCurves bifurcation_curves(const CSurface& surf, const std::vector<double>& eps_grid) {
    BifurcationCurves out;
    out.eps = eps_grid;
    const std::size_t n = surf.t0_grid.size();
    std::vector<double> row(n);
    for (double eps : eps_grid) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = surf.rows.size(); k-- > 0;) s = s * eps + surf.rows[k][i];
            row[i] = s;
        }
        std::size_t imax = 0, imin = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (row[i] > row[imax]) imax = i;
            if (row[i] < row[imin]) imin = i;
        }
        TrigInterp interp(row);
        double tmax = surf.t0_grid[imax], tmin = surf.t0_grid[imin];
        if (interp.degree() > 0) {
            tmax = refine_extremum(interp, tmax);
            tmin = refine_extremum(interp, tmin);
        }
        double cmax = std::max(interp.eval(tmax), row[imax]);
        double cmin = std::min(interp.eval(tmin), row[imin]);
        out.gamma1.push_back(eps * cmax);
        out.gamma2.push_back(eps * cmin);
        out.tau1.push_back(wrap_phase(tmax));
        out.tau2.push_back(wrap_phase(tmin));
    }
    return out;
}

StationaryPhases stationary_phases(const TrigInterp& row, double scale) {
    StationaryPhases out;
    if (row.degree() == 0) {
        out.all_stationary = true;
        return out;
    }
    double curv_scale =
        std::max({scale, row.max_coeff()}) * (double(row.degree()) * double(row.degree()) + 1.0);
    const int M = std::max(64, 16 * row.degree());
    double prev_t = 0.0, prev_g = row.deriv(0.0);
    for (int j = 1; j <= M; ++j) {
        double t = TWO_PI * double(j) / double(M);
        double g = row.deriv(t);
        bool hit = false;
        double root = 0.0;
        if (prev_g == 0.0) {
            hit = true;
            root = prev_t;
        } else if (prev_g * g < 0.0) {
            double lo = prev_t, hi = t, flo = prev_g;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = row.deriv(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (flo * fm < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            hit = true;
            root = 0.5 * (lo + hi);
        }
        if (hit) {
            root = wrap_phase(root);
            bool dup = false;
            for (const auto& pnt : out.points)
                if (std::abs(pnt.t0 - root) < 1e-9 * TWO_PI ||
                    std::abs(std::abs(pnt.t0 - root) - TWO_PI) < 1e-9 * TWO_PI)
                    dup = true;
            if (!dup) {
                double d2 = row.deriv2(root);
                StationaryPhase sp;
                sp.t0 = root;
                sp.value = row.eval(root);
                sp.type = d2 < -1e-8 * curv_scale ? +1 : (d2 > 1e-8 * curv_scale ? -1 : 0);
                out.points.push_back(sp);
            }
        }
        prev_t = t;
        prev_g = g;
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const StationaryPhase& a, const StationaryPhase& b) { return a.t0 < b.t0; });
    return out;
}

DegeneracyInfo degeneracy_order(const CSurface& surf) {
    DegeneracyInfo out;
    for (int k = 0; k <= surf.K; ++k) {
        const auto& row = surf.rows[std::size_t(k)];
        double lo = row[0], hi = row[0], amax = 0.0;
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            amax = std::max(amax, std::abs(v));
        }
        double scale_k = std::max(amax, surf.scale * double(k + 1));
        if (hi - lo <= 1e-9 * std::max(scale_k, 1e-300)) continue;

        out.kstar = k;
        TrigInterp interp(row);
        std::size_t imax = 0, imin = 0;
        for (std::size_t i = 1; i < row.size(); ++i) {
            if (row[i] > row[imax]) imax = i;
            if (row[i] < row[imin]) imin = i;
        }
        out.t0_max = wrap_phase(refine_extremum(interp, surf.t0_grid[imax]));
        out.t0_min = wrap_phase(refine_extremum(interp, surf.t0_grid[imin]));
        out.curv_max = interp.deriv2(out.t0_max);
        out.curv_min = interp.deriv2(out.t0_min);
        double curv_scale =
            scale_k * (double(interp.degree()) * double(interp.degree()) + 1.0);
        out.nondegenerate = std::min(std::abs(out.curv_max), std::abs(out.curv_min)) >
                            1e-9 * std::max(curv_scale, 1e-300);
        return out;
    }
    out.all_constant = true;
    return out;
}

SubharmonicCount count_subharmonics(const CSurface& surf, const ResonanceContext& ctx, double eps,
                                    double gamma) {
    if (ctx.p != 1)
        throw ConfigError("subharmonic counting is only defined for resonances with p = 1");
    if (!(eps > 0.0)) throw ConfigError("counting needs eps > 0");

    const std::size_t n = surf.t0_grid.size();
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = surf.rows.size(); k-- > 0;) s = s * eps + surf.rows[k][i];
        row[i] = s;
    }
    const double target = gamma / eps;
    TrigInterp interp(row);
    double scale = std::max({interp.max_coeff(), std::abs(target), 1e-300});

    SubharmonicCount out;
    if (interp.degree() == 0) {
        if (std::abs(interp.eval(0.0) - target) <= 1e-12 * scale)
            throw MelnikovDegenerate(
                "friction threshold is phase-independent at this order; the count is not finite");
        out.outside = true;
        return out;
    }

    auto f = [&](double t) { return interp.eval(t) - target; };

    std::vector<double> roots;
    const int M = 8 * int(n);
    double prev_t = 0.0, prev_g = f(0.0);
    for (int j = 1; j <= M; ++j) {
        double t = TWO_PI * double(j) / double(M);
        double g = f(t);
        if (prev_g == 0.0) {
            roots.push_back(prev_t);
        } else if (prev_g * g < 0.0) {
            double lo = prev_t, hi = t, flo = prev_g;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = f(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (flo * fm < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_t = t;
        prev_g = g;
    }

    // A tangency is a stationary point sitting on the target level. Grid
    // noise can split it into a pair of sign changes; those are absorbed
    // into the single tangency root.
    StationaryPhases st = stationary_phases(interp, surf.scale);
    std::vector<double> tangencies;
    for (const auto& sp : st.points)
        if (std::abs(sp.value - target) <= 1e-8 * scale) tangencies.push_back(sp.t0);
    for (double s : tangencies) {
        auto near_s = [&](double r) {
            double d = std::abs(wrap_phase(r) - s);
            d = std::min(d, TWO_PI - d);
            return d < 1e-3;
        };
        roots.erase(std::remove_if(roots.begin(), roots.end(), near_s), roots.end());
        roots.push_back(s);
        out.tangent = true;
    }

    for (double& r : roots) r = wrap_phase(r);
    std::sort(roots.begin(), roots.end());
    std::vector<double> dedup;
    for (double r : roots) {
        if (!dedup.empty() && r - dedup.back() < 1e-9 * TWO_PI) continue;
        dedup.push_back(r);
    }
    if (dedup.size() > 1 && dedup.back() - dedup.front() > TWO_PI - 1e-9 * TWO_PI)
        dedup.pop_back();

    out.roots = std::move(dedup);
    out.count = int(out.roots.size()) * ctx.q;
    out.outside = out.roots.empty();
    return out;
}

} // namespace subh
