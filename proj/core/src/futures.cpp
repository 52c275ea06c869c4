#include "qghjm/futures.hpp"

#include <cmath>
#include <limits>

namespace qghjm {
namespace futures {

double g_factor(double beta, double t, double T) {
    if (!(T >= t)) throw InvalidArgument("g_factor: need T >= t");
    const double u = T - t;
    if (beta < 1e-12) return u;
    return -std::expm1(-beta * u) / beta;
}

FuturesBound futures_bound(const BondParams& bond, double T, double delta,
                           const Trajectory& traj,
                           const ForwardCurve& discount_curve) {
    if (!(delta > 0.0)) throw InvalidArgument("futures_bound: delta must be > 0");
    if (!(T >= 0.0)) throw InvalidArgument("futures_bound: T must be >= 0");

    const double inf = std::numeric_limits<double>::infinity();
    if (traj.times.empty() || T > traj.times.back()) {
        if (traj.blown_up) return {inf, inf, inf, inf};
        throw InvalidArgument("futures_bound: T beyond the trajectory's coverage");
    }

    const DetState sT = interp_state(traj, bond.model, T);
    const double x = sT.r - bond.model.curve.value(T);
    const double g = bond.g(T, T + delta);
    // P(0,T)/P(0,T+delta) = exp(int_T^{T+delta} lambda)
    const double ratio =
        std::exp(discount_curve.integral(T + delta) - discount_curve.integral(T));
    const double one = ratio * std::exp(g * x);
    const double two = ratio * std::exp(g * x + 0.5 * g * g * sT.y);
    return {one, two, x, sT.y};
}

std::optional<double> divergence_maturity(const BondParams& bond, double delta,
                                          double threshold, double t_max,
                                          double grid_dt) {
    if (!(threshold > 0.0))
        throw InvalidArgument("divergence_maturity: threshold must be > 0");
    if (!(t_max > 0.0) || !(grid_dt > 0.0))
        throw InvalidArgument("divergence_maturity: t_max and grid_dt must be > 0");

    StepControl ctrl;
    ctrl.dt_out = grid_dt;
    const Trajectory traj = solve(bond.model, t_max, ctrl);
    const double covered = traj.times.back();

    const int n = static_cast<int>(std::floor(t_max / grid_dt + 1e-9));
    for (int k = 0; k <= n; ++k) {
        const double T = std::min(k * grid_dt, t_max);
        if (T > covered) {
            if (traj.blown_up) return T;   // past the blow-up: bound diverged
            break;
        }
        const FuturesBound fb =
            futures_bound(bond, T, delta, traj, bond.model.curve);
        if (fb.bound > threshold) return T;
    }
    return std::nullopt;
}

} // namespace futures
} // namespace qghjm
