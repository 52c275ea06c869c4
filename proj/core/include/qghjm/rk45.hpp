#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace qghjm {

// Dormand-Prince 5(4) embedded pair with a PI step-size controller.
// Small fixed-dimension systems only; everything lives on the stack.

struct Rk45Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double h_min = 0.0;        // step underflow => StepUnderflow
    double h_max = std::numeric_limits<double>::infinity();
    double h_init = 0.0;       // 0 => pick from the first derivative
};

enum class Rk45Outcome { ReachedEnd, StoppedByCallback, StepUnderflow };

namespace rk45_detail {
// Butcher tableau (Dormand & Prince 1980), 5th-order solution + embedded 4th.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat (error weights, k7 = f at the 5th-order solution)
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
} // namespace rk45_detail

// rhs(t, y, dydt); on_step(t_prev, y_prev, t_new, y_new) -> bool, false stops.
// on_step sees every accepted step in order.
template <std::size_t N, class Rhs, class OnStep>
Rk45Outcome rk45_integrate(Rhs&& rhs, double t0, double t_end,
                           std::array<double, N>& y, const Rk45Options& opt,
                           OnStep&& on_step) {
    using namespace rk45_detail;
    using Vec = std::array<double, N>;

    if (t_end <= t0) return Rk45Outcome::ReachedEnd;

    auto finite = [](const Vec& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };

    double t = t0;
    Vec k1;
    rhs(t, y, k1);

    double h = opt.h_init;
    if (h <= 0.0) {
        // crude initial step from the explicit Euler scale
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
            d0 = std::max(d0, std::abs(y[i]) / sc);
            d1 = std::max(d1, std::abs(k1[i]) / sc);
        }
        h = (d1 > 1e-30) ? 0.01 * d0 / d1 : 1e-6 * (t_end - t0);
        h = std::clamp(h, 1e-12 * (t_end - t0), 0.1 * (t_end - t0));
    }
    h = std::min(h, opt.h_max);
    h = std::max(h, opt.h_min);   // start at the floor, never under it

    // PI controller state
    double err_prev = 1.0;
    bool rejected_last = false;

    while (t < t_end) {
        h = std::min(h, t_end - t);
        if (h < opt.h_min && t_end - t > opt.h_min) return Rk45Outcome::StepUnderflow;
        if (t + h == t) {
            // below the time resolution at t: grow until the step registers,
            // or conclude that nothing representable remains
            const double cap = std::min(t_end - t, opt.h_max);
            if (h >= cap) break;
            h = std::min(4.0 * h, cap);
            continue;
        }

        Vec k2, k3, k4, k5, k6, k7, ytmp, y5;
        auto stage = [&](const Vec& base) { return base; };
        (void)stage;

        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i]
                    + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i]
                           + a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            y5[i] = y[i]
                  + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, y5, k7);

        double err = 0.0;
        bool ok = finite(y5);
        if (ok) {
            for (std::size_t i = 0; i < N; ++i) {
                const double ei = h
                    * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i]
                       + e7 * k7[i]);
                const double sc = opt.abs_tol
                    + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
                err = std::max(err, std::abs(ei) / sc);
            }
            ok = std::isfinite(err);
        }

        if (!ok) {        // overflow inside the step: retry shorter
            h *= 0.25;
            rejected_last = true;
            continue;
        }

        if (err <= 1.0) {
            const double t_new = t + h;
            if (!on_step(t, y, t_new, y5)) {
                y = y5;
                return Rk45Outcome::StoppedByCallback;
            }
            t = t_new;
            y = y5;
            k1 = k7;      // FSAL
            // PI: 0.7/0.4 per-order exponents work well for a 5th-order pair
            const double e = std::max(err, 1e-20);
            double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
            fac = std::clamp(fac, 0.2, rejected_last ? 1.0 : 10.0);
            h = std::min(h * fac, opt.h_max);
            err_prev = e;
            rejected_last = false;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            rejected_last = true;
        }
    }
    return Rk45Outcome::ReachedEnd;
}

} // namespace qghjm
