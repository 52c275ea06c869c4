#include "qghjm/explosion.hpp"

#include <algorithm>
#include <cmath>

#include "qghjm/errors.hpp"
#include "qghjm/quadrature.hpp"
#include "qghjm/rk45.hpp"

namespace qghjm {

namespace {

void check_flat_args(double sigma, double lambda0) {
    if (!(sigma > 0.0)) throw InvalidArgument("explosion: sigma must be > 0");
    if (!(lambda0 > 0.0)) throw InvalidArgument("explosion: lambda0 must be > 0");
}

// Local development of the profile at x = lambda0 + s, used both to seed the
// ODE off the square-root degeneracy and for the analytic endpoint piece of
// the tau integral:
//   y(s) = a1 s + b s^{3/2} + a2 s^2 + O(s^{5/2})
//   a1 = 2 sigma^2 lambda0^2,  b = -4 beta sqrt(a1),  a2 = 2 sigma^2 lambda0 + 4 beta^2
struct SeedSeries {
    double a1, b, a2;
    SeedSeries(double sigma, double beta, double lambda0) {
        a1 = 2.0 * sigma * sigma * lambda0 * lambda0;
        b = -4.0 * beta * std::sqrt(a1);
        a2 = 2.0 * sigma * sigma * lambda0 + 4.0 * beta * beta;
    }
    double y(double s) const { return s * (a1 + b * std::sqrt(s) + a2 * s); }
    // int_0^s dx / sqrt(y), two orders
    double tau(double s) const {
        return 2.0 * std::sqrt(s / a1) - b * s / (2.0 * a1 * std::sqrt(a1));
    }
};

double profile_f(double sigma, double beta, double lambda0, double x) {
    return sigma * sigma * x * x - 2.0 * beta * beta * x
         + 2.0 * beta * beta * lambda0;
}

} // namespace

double blowup_time_constant() {
    const WpConstants& c = WpConstants::get();
    return std::sqrt(6.0 * c.p0) * c.omega2;
}

ExplosionReport explosion_time_beta0(double sigma, double lambda0) {
    check_flat_args(sigma, lambda0);
    const double tau = blowup_time_constant() / (sigma * std::sqrt(lambda0));
    // constants are exact to a few ulp; round generously
    return {tau, ExplosionMethod::ClosedFormBeta0, false, 1e-13 * tau, true};
}

ExplosionReport explosion_time_beta0(const ModelParams& p) {
    if (p.beta != 0.0)
        throw WrongRegime("explosion_time_beta0: beta != 0; use explosion_time_quadrature");
    ExplosionReport rep = explosion_time_beta0(p.sigma, p.curve.lambda0());
    rep.is_upper_bound = p.curve.kind() != CurveKind::Flat;
    return rep;
}

double explosion_time_energy_oracle(double sigma, double lambda0) {
    check_flat_args(sigma, lambda0);
    // I = int_0^1 du / (sqrt(u) sqrt(1 - u^3)); tau = sqrt(3/2) I / (sigma sqrt(lambda0)).
    // u = w^2 kills the left singularity, u = 1 - v^2 the right one.
    const double half = 1.0 / std::sqrt(2.0);
    const double left =
        2.0 * gk15_adaptive([](double w) {
            const double w3 = w * w * w;
            return 1.0 / std::sqrt(1.0 - w3 * w3);
        }, 0.0, half, 1e-13);
    const double right =
        2.0 * gk15_adaptive([](double v) {
            const double v2 = v * v;
            return 1.0 / std::sqrt((1.0 - v2) * (3.0 - 3.0 * v2 + v2 * v2));
        }, 0.0, half, 1e-13);
    return std::sqrt(1.5) * (left + right) / (sigma * std::sqrt(lambda0));
}

YProfile solve_y_profile(double sigma, double beta, double lambda0, double x_max) {
    check_flat_args(sigma, lambda0);
    if (!(beta >= 0.0)) throw InvalidArgument("explosion: beta must be >= 0");
    if (x_max <= 0.0) x_max = 4.0 * lambda0;
    if (!(x_max > lambda0))
        throw InvalidArgument("solve_y_profile: x_max must exceed lambda0");

    const SeedSeries seed(sigma, beta, lambda0);
    const double s0 = 1e-14 * lambda0;

    YProfile prof;
    prof.xs = {lambda0, lambda0 + s0};
    prof.ys = {0.0, seed.y(s0)};
    prof.vanished = false;

    auto f = [&](double x, const std::array<double, 1>& y,
                 std::array<double, 1>& dy) {
        const double sq = y[0] > 0.0 ? std::sqrt(y[0]) : 0.0;
        dy[0] = 2.0 * (profile_f(sigma, beta, lambda0, x) - 3.0 * beta * sq);
    };

    Rk45Options opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-20;   // resolve near-vanishing minima, not just the bulk
    opt.h_min = 1e-16 * x_max;
    opt.h_max = (x_max - lambda0) / 64.0;

    std::array<double, 1> y{prof.ys.back()};
    const Rk45Outcome out = rk45_integrate<1>(
        f, prof.xs.back(), x_max, y, opt,
        [&](double, const std::array<double, 1>&, double x_new,
            const std::array<double, 1>& y_new) {
            if (y_new[0] <= 0.0) {
                // linear zero between the bracketing samples
                const double x0 = prof.xs.back(), y0 = prof.ys.back();
                const double cross = y0 > 0.0
                    ? x0 + y0 * (x_new - x0) / (y0 - y_new[0])
                    : x0;
                prof.xs.push_back(cross);
                prof.ys.push_back(0.0);
                prof.vanished = true;
                return false;
            }
            prof.xs.push_back(x_new);
            prof.ys.push_back(y_new[0]);
            return true;
        });
    if (out == Rk45Outcome::StepUnderflow)
        throw Error("solve_y_profile: step underflow");

    if (prof.vanished) {
        prof.min_location = prof.xs.back();
        prof.min_value = 0.0;
        return prof;
    }

    // The profile leaves y(lambda0) = 0 rising, so the closed-interval minimum
    // is the pinned boundary sample; the dip of interest starts where the
    // profile first turns down.
    std::size_t lo = prof.ys.size() - 1;
    for (std::size_t i = 1; i + 1 < prof.ys.size(); ++i)
        if (prof.ys[i + 1] < prof.ys[i]) { lo = i + 1; break; }
    std::size_t im = lo;
    for (std::size_t i = lo + 1; i < prof.ys.size(); ++i)
        if (prof.ys[i] < prof.ys[im]) im = i;
    prof.min_location = prof.xs[im];
    prof.min_value = prof.ys[im];
    // quadratic refinement through the neighbours of the discrete minimum
    if (im > lo && im + 1 < prof.ys.size()) {
        const double x0 = prof.xs[im - 1], x1 = prof.xs[im], x2 = prof.xs[im + 1];
        const double y0 = prof.ys[im - 1], y1 = prof.ys[im], y2 = prof.ys[im + 1];
        const double m01 = 0.5 * (x0 + x1), m12 = 0.5 * (x1 + x2);
        const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
        const double curv = (d12 - d01) / (m12 - m01);
        if (curv > 0.0) {
            const double xv = m01 - d01 / curv;
            if (xv > x0 && xv < x2) {
                prof.min_location = xv;
                const double yv = y1 - 0.5 * curv * (x1 - xv) * (x1 - xv);
                prof.min_value = std::max(yv, 0.0);
            }
        }
    }
    return prof;
}

ExplosionReport explosion_time_quadrature(double sigma, double beta,
                                          double lambda0) {
    check_flat_args(sigma, lambda0);
    if (!(beta >= 0.0)) throw InvalidArgument("explosion: beta must be >= 0");
    const double beta_c = sigma * std::sqrt(2.0 * lambda0);
    if (beta >= beta_c)
        throw Supercritical("explosion_time_quadrature: beta >= beta_C, no finite explosion time");

    const SeedSeries seed(sigma, beta, lambda0);
    const double delta = 1e-6 * lambda0;

    const double x_floor = std::max(100.0 * lambda0,
                                    10.0 * beta * beta / (sigma * sigma));
    const double x_cap = 1e9 * lambda0;
    const double s2 = sigma * sigma;

    auto tail_at = [&](double x) { return std::sqrt(6.0 / s2) / std::sqrt(x); };
    // next-order tail error: the beta-drag term integrates to 9 beta/(5 s2 x);
    // the lambda0^3 curvature of the beta = 0 energy form adds tail*(l0/x)^3/2
    auto tail_err = [&](double x) {
        const double l = lambda0 / x;
        return 9.0 * beta / (5.0 * s2 * x) + 0.5 * tail_at(x) * l * l * l;
    };

    auto f = [&](double x, const std::array<double, 2>& v,
                 std::array<double, 2>& dv) {
        const double y = v[0];
        const double sq = y > 0.0 ? std::sqrt(y) : 0.0;
        dv[0] = 2.0 * (profile_f(sigma, beta, lambda0, x) - 3.0 * beta * sq);
        dv[1] = sq > 0.0 ? 1.0 / sq : 0.0;
    };

    Rk45Options opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-20;
    opt.h_min = 0.0;

    std::array<double, 2> v{seed.y(delta), seed.tau(delta)};
    double x_stop = x_cap;
    bool hit_zero = false;
    const Rk45Outcome out = rk45_integrate<2>(
        f, lambda0 + delta, x_cap, v, opt,
        [&](double, const std::array<double, 2>&, double x_new,
            const std::array<double, 2>& v_new) {
            if (v_new[0] <= 0.0) {
                hit_zero = true;
                return false;
            }
            if (x_new >= x_floor
                && tail_err(x_new) <= 1e-9 * (v_new[1] + tail_at(x_new))) {
                x_stop = x_new;
                return false;
            }
            return true;
        });
    if (hit_zero)
        throw Supercritical("explosion_time_quadrature: profile vanished (numerically supercritical)");
    if (out == Rk45Outcome::StepUnderflow)
        throw Error("explosion_time_quadrature: step underflow");
    if (out == Rk45Outcome::ReachedEnd) x_stop = x_cap;

    const double tau = v[1] + tail_at(x_stop);
    const double err = tail_err(x_stop) + 1e-9 * tau;
    return {tau, ExplosionMethod::QuadratureBetaPositive, false, err, true};
}

ExplosionReport explosion_time_quadrature(const ModelParams& p) {
    ExplosionReport rep =
        explosion_time_quadrature(p.sigma, p.beta, p.curve.lambda0());
    rep.is_upper_bound = p.curve.kind() != CurveKind::Flat;
    return rep;
}

double critical_beta(double sigma, double lambda0, double tol) {
    check_flat_args(sigma, lambda0);
    if (!(tol > 0.0)) throw InvalidArgument("critical_beta: tol must be > 0");
    const double probe_x = 5.0 * lambda0;
    auto vanishes = [&](double beta) {
        return solve_y_profile(sigma, beta, lambda0, probe_x).vanished;
    };
    double lo = 0.0;                                   // never vanishes
    double hi = 2.0 * sigma * std::sqrt(2.0 * lambda0); // always vanishes
    if (!vanishes(hi)) throw Error("critical_beta: top of bracket did not vanish");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (vanishes(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<VProfile> v_profiles_figure(double sigma, double lambda0,
                                        const std::vector<double>& betas,
                                        double x_max) {
    std::vector<VProfile> table;
    table.reserve(betas.size());
    for (const double beta : betas) {
        const YProfile prof = solve_y_profile(sigma, beta, lambda0, x_max);
        VProfile vp;
        vp.beta = beta;
        vp.vanished = prof.vanished;
        vp.terminal_x = prof.xs.back();
        vp.xs = prof.xs;
        vp.vs.reserve(prof.ys.size());
        for (const double y : prof.ys)
            vp.vs.push_back(y > 0.0 ? std::sqrt(y) : 0.0);
        table.push_back(std::move(vp));
    }
    return table;
}

} // namespace qghjm
