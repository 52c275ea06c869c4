#pragma once

#include <cstddef>
#include <vector>

namespace qghjm {

// Natural cubic spline through (t_i, v_i): C2, zero second derivative at both
// ends, flat extrapolation outside [t_front, t_back].  Knot times must be
// strictly increasing; at least two knots.
class NaturalCubicSpline {
  public:
    NaturalCubicSpline(std::vector<double> ts, std::vector<double> vs);

    double value(double t) const;
    double d1(double t) const;    // 0 outside the knot range
    double d2(double t) const;    // 0 outside the knot range

    // int_0^t value(s) ds, flat extension on both sides of the knot range.
    double integral(double t) const;

    // Exact supremum over [t_front, inf): per-segment cubic extrema, not sampling.
    double supremum() const;

    double t_front() const { return ts_.front(); }
    double t_back() const { return ts_.back(); }
    double v_back() const { return vs_.back(); }
    std::size_t size() const { return ts_.size(); }

  private:
    std::size_t segment(double t) const;

    std::vector<double> ts_;
    std::vector<double> vs_;
    std::vector<double> m_;      // second derivatives at knots, m_.front() = m_.back() = 0
    std::vector<double> cum_;    // integral of the spline from ts_[0] to ts_[i]
};

} // namespace qghjm
