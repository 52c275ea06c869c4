#include "qghjm/spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qghjm/errors.hpp"

namespace qghjm {

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> ts, std::vector<double> vs)
    : ts_(std::move(ts)), vs_(std::move(vs)) {
    const std::size_t n = ts_.size();
    if (n < 2 || vs_.size() != n)
        throw InvalidArgument("spline: need >= 2 knots and matching value count");
    for (std::size_t i = 1; i < n; ++i)
        if (!(ts_[i] > ts_[i - 1]))
            throw InvalidArgument("spline: knot times must be strictly increasing");

    // Tridiagonal system for the interior second derivatives (Thomas algorithm).
    // Natural boundary: m_0 = m_{n-1} = 0.
    m_.assign(n, 0.0);
    if (n > 2) {
        const std::size_t k = n - 2;          // unknowns m_1 .. m_{n-2}
        std::vector<double> diag(k), rhs(k), upper(k);
        for (std::size_t i = 0; i < k; ++i) {
            const double h0 = ts_[i + 1] - ts_[i];
            const double h1 = ts_[i + 2] - ts_[i + 1];
            diag[i] = (h0 + h1) / 3.0;
            upper[i] = h1 / 6.0;
            rhs[i] = (vs_[i + 2] - vs_[i + 1]) / h1 - (vs_[i + 1] - vs_[i]) / h0;
        }
        for (std::size_t i = 1; i < k; ++i) {
            const double lower = (ts_[i + 1] - ts_[i]) / 6.0;
            const double w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m_[k] = rhs[k - 1] / diag[k - 1];
        for (std::size_t i = k - 1; i >= 1; --i)
            m_[i] = (rhs[i - 1] - upper[i - 1] * m_[i + 1]) / diag[i - 1];
    }

    // Cumulative exact integrals knot-to-knot.
    cum_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = ts_[i + 1] - ts_[i];
        // int over one segment of the standard (m_i, m_{i+1}) cubic form
        cum_[i + 1] = cum_[i] + 0.5 * h * (vs_[i] + vs_[i + 1])
                    - h * h * h * (m_[i] + m_[i + 1]) / 24.0;
    }
}

std::size_t NaturalCubicSpline::segment(double t) const {
    // Largest i with ts_[i] <= t, clamped to a valid segment index.
    const auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - ts_.begin());
    if (i == 0) return 0;
    if (i >= ts_.size()) return ts_.size() - 2;
    return i - 1;
}

double NaturalCubicSpline::value(double t) const {
    if (t <= ts_.front()) return vs_.front();
    if (t >= ts_.back()) return vs_.back();
    const std::size_t i = segment(t);
    const double h = ts_[i + 1] - ts_[i];
    const double a = (ts_[i + 1] - t) / h;
    const double b = (t - ts_[i]) / h;
    return a * vs_[i] + b * vs_[i + 1]
         + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double NaturalCubicSpline::d1(double t) const {
    if (t <= ts_.front() || t >= ts_.back()) return 0.0;
    const std::size_t i = segment(t);
    const double h = ts_[i + 1] - ts_[i];
    const double a = (ts_[i + 1] - t) / h;
    const double b = (t - ts_[i]) / h;
    return (vs_[i + 1] - vs_[i]) / h
         + ((1.0 - 3.0 * a * a) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
}

double NaturalCubicSpline::d2(double t) const {
    if (t <= ts_.front() || t >= ts_.back()) return 0.0;
    const std::size_t i = segment(t);
    const double h = ts_[i + 1] - ts_[i];
    const double a = (ts_[i + 1] - t) / h;
    const double b = (t - ts_[i]) / h;
    return a * m_[i] + b * m_[i + 1];
}

double NaturalCubicSpline::integral(double t) const {
    if (t <= 0.0) return 0.0;
    double acc = 0.0;
    if (ts_.front() > 0.0) {
        // flat extension before the first knot
        acc += vs_.front() * std::min(t, ts_.front());
        if (t <= ts_.front()) return acc;
    }
    if (t >= ts_.back()) {
        acc += cum_.back() + vs_.back() * (t - ts_.back());
        return acc;
    }
    const std::size_t i = segment(t);
    acc += cum_[i];
    // partial segment [ts_[i], t]; with b = (t - ts_[i])/h, a = 1-b the exact
    // antiderivative of the (m_i, m_{i+1}) cubic form is
    const double h = ts_[i + 1] - ts_[i];
    const double b = (t - ts_[i]) / h;
    const double a = 1.0 - b;
    acc += h * (vs_[i] * b * (1.0 - 0.5 * b) + vs_[i + 1] * 0.5 * b * b
        + (h * h / 6.0) * (m_[i] * ((1.0 - a * a * a * a) / 4.0 - (1.0 - a * a) / 2.0)
                           + m_[i + 1] * (b * b * b * b / 4.0 - b * b / 2.0)));
    return acc;
}

double NaturalCubicSpline::supremum() const {
    double best = std::max(vs_.front(), vs_.back());
    for (std::size_t i = 0; i + 1 < ts_.size(); ++i) {
        best = std::max(best, vs_[i + 1]);
        // d1 on segment i is quadratic in t; check its real roots inside the segment
        const double h = ts_[i + 1] - ts_[i];
        // derivative in terms of b in [0,1]: value'(b)/h
        // v' = (v1-v0)/h + h/6 * ( (1-3a^2) m0 + (3b^2-1) m1 ),  a = 1-b
        // -> quadratic in b: h/6 * 3 (m1 - m0) b^2 + h m0 b + [(v1-v0)/h + h/6 (1 - 3) ... ]
        const double c2 = 0.5 * h * (m_[i + 1] - m_[i]);
        const double c1 = h * m_[i];
        const double c0 = (vs_[i + 1] - vs_[i]) / h - h / 6.0 * (2.0 * m_[i] + m_[i + 1]);
        auto consider = [&](double b) {
            if (b <= 0.0 || b >= 1.0) return;
            best = std::max(best, value(ts_[i] + b * h));
        };
        if (std::abs(c2) < 1e-300) {
            if (std::abs(c1) > 1e-300) consider(-c0 / c1);
        } else {
            const double disc = c1 * c1 - 4.0 * c2 * c0;
            if (disc >= 0.0) {
                const double s = std::sqrt(disc);
                consider((-c1 + s) / (2.0 * c2));
                consider((-c1 - s) / (2.0 * c2));
            }
        }
    }
    return best;
}

} // namespace qghjm
