#pragma once

#include <functional>
#include <optional>

#include "qghjm/detsys.hpp"

namespace qghjm {
namespace futures {

// G(t, T) = (1 - e^{-beta (T - t)}) / beta, the deterministic bond-exponent
// factor; continuous beta -> 0 limit T - t (taken below 1e-12).
double g_factor(double beta, double t, double T);

struct BondParams {
    ModelParams model;
    // override point for the exponent factor; defaults to g_factor(model.beta)
    std::function<double(double, double)> g;

    explicit BondParams(ModelParams m) : model(std::move(m)) {
        const double beta = model.beta;
        g = [beta](double t, double T) { return g_factor(beta, t, T); };
    }
};

// Jensen lower bound on the expected inverse compounding factor of the
// (T, T+delta) bill:  P(0,T)/P(0,T+delta) * exp(G(T,T+delta) x_T) with
// x_T = r(T) - lambda(T) along the deterministic trajectory.  `bound` drops
// the y-term (the reported number); `two_term` keeps exp(G x + G^2 y / 2).
// T past a blown-up trajectory's coverage yields +inf (divergence signal).
struct FuturesBound {
    double bound;
    double two_term;
    double x_T;
    double y_T;
};

FuturesBound futures_bound(const BondParams& bond, double T, double delta,
                           const Trajectory& traj,
                           const ForwardCurve& discount_curve);

// Smallest maturity on the uniform grid where `bound` exceeds threshold,
// integrating the deterministic system internally (blow-up aware); absent if
// the bound stays below threshold up to t_max on a non-explosive trajectory.
std::optional<double> divergence_maturity(const BondParams& bond, double delta,
                                          double threshold, double t_max = 500.0,
                                          double grid_dt = 0.1);

} // namespace futures
} // namespace qghjm
