#include "qghjm/curve.hpp"

#include <cmath>
#include <limits>

#include "qghjm/errors.hpp"

namespace qghjm {

namespace {
constexpr double kAssumptionTol = 1e-12;

void require_positive_lambda0(double l0) {
    if (!(l0 > 0.0) || !std::isfinite(l0))
        throw InvalidArgument("curve: lambda(0) must be positive and finite");
}

void require_nonnegative_time(double t) {
    if (!(t >= 0.0)) throw InvalidArgument("curve: t must be >= 0");
}
} // namespace

ForwardCurve ForwardCurve::flat(double lambda0) {
    require_positive_lambda0(lambda0);
    ForwardCurve c;
    c.kind_ = CurveKind::Flat;
    c.a_ = lambda0;
    return c;
}

ForwardCurve ForwardCurve::linear(double lambda0, double slope) {
    require_positive_lambda0(lambda0);
    if (!std::isfinite(slope)) throw InvalidArgument("curve: slope must be finite");
    ForwardCurve c;
    c.kind_ = CurveKind::Linear;
    c.a_ = lambda0;
    c.b_ = slope;
    return c;
}

ForwardCurve ForwardCurve::exponential(double lambda_inf, double lambda0, double decay) {
    require_positive_lambda0(lambda0);
    if (!(lambda_inf >= 0.0)) throw InvalidArgument("curve: lambda_inf must be >= 0");
    if (!(decay > 0.0)) throw InvalidArgument("curve: decay must be positive");
    ForwardCurve c;
    c.kind_ = CurveKind::Exponential;
    c.a_ = lambda_inf;
    c.b_ = lambda0;
    c.c_ = decay;
    return c;
}

ForwardCurve ForwardCurve::tabulated(std::vector<std::pair<double, double>> knots) {
    if (knots.size() < 2) throw InvalidArgument("curve: tabulated needs >= 2 knots");
    if (knots.front().first < 0.0)
        throw InvalidArgument("curve: knot times must be >= 0");
    std::vector<double> ts, vs;
    ts.reserve(knots.size());
    vs.reserve(knots.size());
    for (const auto& [t, v] : knots) {
        ts.push_back(t);
        vs.push_back(v);
    }
    ForwardCurve c;
    c.kind_ = CurveKind::Tabulated;
    c.spline_.emplace(std::move(ts), std::move(vs));
    require_positive_lambda0(c.value(0.0));
    return c;
}

double ForwardCurve::value(double t) const {
    require_nonnegative_time(t);
    switch (kind_) {
        case CurveKind::Flat: return a_;
        case CurveKind::Linear: return a_ + b_ * t;
        case CurveKind::Exponential: return a_ + (b_ - a_) * std::exp(-c_ * t);
        case CurveKind::Tabulated: return spline_->value(t);
    }
    return 0.0;
}

double ForwardCurve::d1(double t) const {
    require_nonnegative_time(t);
    switch (kind_) {
        case CurveKind::Flat: return 0.0;
        case CurveKind::Linear: return b_;
        case CurveKind::Exponential: return -c_ * (b_ - a_) * std::exp(-c_ * t);
        case CurveKind::Tabulated: return spline_->d1(t);
    }
    return 0.0;
}

double ForwardCurve::d2(double t) const {
    require_nonnegative_time(t);
    switch (kind_) {
        case CurveKind::Flat: return 0.0;
        case CurveKind::Linear: return 0.0;
        case CurveKind::Exponential: return c_ * c_ * (b_ - a_) * std::exp(-c_ * t);
        case CurveKind::Tabulated: return spline_->d2(t);
    }
    return 0.0;
}

double ForwardCurve::integral(double t) const {
    if (t <= 0.0) return 0.0;
    switch (kind_) {
        case CurveKind::Flat: return a_ * t;
        case CurveKind::Linear: return a_ * t + 0.5 * b_ * t * t;
        case CurveKind::Exponential:
            return a_ * t + (b_ - a_) * (-std::expm1(-c_ * t)) / c_;
        case CurveKind::Tabulated: return spline_->integral(t);
    }
    return 0.0;
}

double ForwardCurve::sup_rate() const {
    switch (kind_) {
        case CurveKind::Flat: return a_;
        case CurveKind::Linear:
            return b_ > 0.0 ? std::numeric_limits<double>::infinity() : a_;
        case CurveKind::Exponential: return std::max(a_, b_);
        case CurveKind::Tabulated: return spline_->supremum();
    }
    return 0.0;
}

std::optional<double> ForwardCurve::limit_rate() const {
    switch (kind_) {
        case CurveKind::Flat: return a_;
        case CurveKind::Linear:
            if (b_ == 0.0) return a_;
            return std::nullopt;
        case CurveKind::Exponential: return a_;
        case CurveKind::Tabulated: return spline_->v_back();
    }
    return std::nullopt;
}

Assumption1Result assumption1_margin(const ForwardCurve& curve, double beta,
                                     double horizon, int grid_points) {
    if (!(beta >= 0.0)) throw InvalidArgument("assumption1_margin: beta must be >= 0");
    if (!(horizon > 0.0)) throw InvalidArgument("assumption1_margin: horizon must be > 0");
    if (grid_points < 2) throw InvalidArgument("assumption1_margin: need >= 2 grid points");

    const double l0 = curve.value(0.0);
    const double dt = horizon / (grid_points - 1);
    double margin = std::numeric_limits<double>::infinity();
    double argmin = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double t = i * dt;
        const double forcing = 2.0 * beta * beta * (curve.value(t) - l0)
                             + 3.0 * beta * curve.d1(t) + curve.d2(t);
        if (forcing < margin) {
            margin = forcing;
            argmin = t;
        }
    }
    return {margin, argmin, margin >= -kAssumptionTol};
}

} // namespace qghjm
