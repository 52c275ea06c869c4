#pragma once

#include <cmath>
#include <cstddef>

namespace qghjm {

// Adaptive Gauss-Kronrod 7-15 on [a, b].  Bisects while the embedded error
// estimate exceeds max(abs_tol, rel_tol * |whole|); integrands are expected
// smooth (transform endpoint singularities away before calling).
template <class F>
double gk15_adaptive(F&& f, double a, double b, double rel_tol = 1e-12,
                     double abs_tol = 1e-300, int max_depth = 40) {
    static const double xgk[8] = {
        0.991455371120812639206854697526, 0.949107912342758524526189684048,
        0.864864423359769072789712788641, 0.741531185599394439863864773281,
        0.586087235467691130294144838259, 0.405845151377397166906606412077,
        0.207784955007898467600689403773, 0.0};
    static const double wgk[8] = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static const double wg[4] = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    struct Rule {
        double integral;
        double error;
    };
    auto rule = [&](double lo, double hi) -> Rule {
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        const double fc = f(c);
        double resk = wgk[7] * fc;
        double resg = wg[3] * fc;
        for (int j = 0; j < 7; ++j) {
            const double x = h * xgk[j];
            const double fs = f(c - x) + f(c + x);
            resk += wgk[j] * fs;
            if (j % 2 == 1) resg += wg[j / 2] * fs;
        }
        return {resk * h, std::abs((resk - resg) * h)};
    };

    struct Seg {
        double lo, hi;
        int depth;
    };
    Seg stack[128];
    int top = 0;
    stack[top++] = {a, b, 0};

    double total = 0.0;
    const double whole = std::abs(rule(a, b).integral) + abs_tol;
    while (top > 0) {
        const Seg s = stack[--top];
        const Rule r = rule(s.lo, s.hi);
        // error budget proportional to segment length so the sum stays within tol
        const double budget =
            std::max(abs_tol, rel_tol * whole) * (s.hi - s.lo) / (b - a);
        if (r.error <= budget || s.depth >= max_depth || top >= 126) {
            total += r.integral;
        } else {
            const double mid = 0.5 * (s.lo + s.hi);
            stack[top++] = {s.lo, mid, s.depth + 1};
            stack[top++] = {mid, s.hi, s.depth + 1};
        }
    }
    return total;
}

} // namespace qghjm
