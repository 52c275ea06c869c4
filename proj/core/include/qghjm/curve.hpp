#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qghjm/spline.hpp"

namespace qghjm {

enum class CurveKind { Flat, Linear, Exponential, Tabulated };

// Initial forward curve lambda(t), t >= 0.  lambda(0) must be positive for
// every kind; the model equations consume lambda, lambda', lambda''.
//
//   Flat         lambda0
//   Linear       lambda0 + slope * t
//   Exponential  lambda_inf + (lambda0 - lambda_inf) * exp(-decay * t)
//   Tabulated    natural cubic spline through the knots, flat outside them
class ForwardCurve {
  public:
    static ForwardCurve flat(double lambda0);
    static ForwardCurve linear(double lambda0, double slope);
    static ForwardCurve exponential(double lambda_inf, double lambda0, double decay);
    // knots: (time, rate) pairs, times strictly increasing, first time >= 0
    static ForwardCurve tabulated(std::vector<std::pair<double, double>> knots);

    CurveKind kind() const { return kind_; }

    double value(double t) const;   // lambda(t)
    double d1(double t) const;      // lambda'(t)
    double d2(double t) const;      // lambda''(t)

    // int_0^t lambda(s) ds, exact per kind (spline: per-piece antiderivative)
    double integral(double t) const;

    // sup of lambda over [0, inf); +inf for Linear with positive slope
    double sup_rate() const;

    // lambda(inf) when the limit exists: Flat/zero-slope Linear -> lambda0,
    // Exponential -> lambda_inf, Tabulated -> last knot rate (flat tail).
    // Linear with nonzero slope has no limit.
    std::optional<double> limit_rate() const;

    double lambda0() const { return value(0.0); }

  private:
    ForwardCurve() = default;

    CurveKind kind_ = CurveKind::Flat;
    double a_ = 0.0;   // Flat/Linear: lambda0; Exponential: lambda_inf
    double b_ = 0.0;   // Linear: slope;       Exponential: lambda0
    double c_ = 0.0;   // Exponential: decay
    std::optional<NaturalCubicSpline> spline_;
};

// Minimum over a uniform time grid of
//   Lambda(t) = 2 beta^2 (lambda(t) - lambda(0)) + 3 beta lambda'(t) + lambda''(t),
// the forcing that must stay nonnegative for the flat-curve comparison to
// apply.  A finite-horizon scan, not a proof for all t.
struct Assumption1Result {
    double margin;      // min of Lambda over the grid
    double argmin_t;
    bool holds;         // margin >= -1e-12
};

Assumption1Result assumption1_margin(const ForwardCurve& curve, double beta,
                                     double horizon, int grid_points = 2001);

} // namespace qghjm
