#include "qghjm/weierstrass.hpp"

#include <cmath>

#include "qghjm/errors.hpp"

namespace qghjm {

const WpConstants& WpConstants::get() {
    static const WpConstants c = [] {
        // 4 p^3 = 1 by Newton from 0.6; converges to full precision in a few steps
        double p = 0.6;
        for (int i = 0; i < 60; ++i) {
            const double f = 4.0 * p * p * p - 1.0;
            const double step = f / (12.0 * p * p);
            p -= step;
            if (std::abs(step) < 1e-17 * p) break;
        }
        const double g13 = std::tgamma(1.0 / 3.0);
        const double omega2 = g13 * g13 * g13 / (4.0 * M_PI);
        return WpConstants{p, omega2};
    }();
    return c;
}

namespace {

// Laurent development about the origin.  With g2 = 0 only the c_{3m} survive:
//   wp = z^-2 + z^4/28 + z^10/10192 + z^16/5422144 + z^22 * c12 + ...
// where c_k = 3/((2k+1)(k-3)) sum c_m c_{k-m}.  At |z| <= 1/2 the truncation
// sits below 1e-16 relative.
double wp_series(double z) {
    const double z2 = z * z;
    const double z6 = z2 * z2 * z2;
    constexpr double c3 = 1.0 / 28.0;
    constexpr double c6 = 1.0 / 10192.0;
    constexpr double c9 = 1.0 / 5422144.0;
    constexpr double c12 = 3.0402201445949054e-10;   // (1/75)(2 c3 c9 + c6^2)
    return 1.0 / z2 + z2 * z2 * (c3 + z6 * (c6 + z6 * (c9 + z6 * c12)));
}

// wp(2z) = 9 wp^4 / (4 wp^3 - 1) - 2 wp  (g2 = 0, so wp'' = 6 wp^2 and
// (wp')^2 = 4 wp^3 - 1).  Only used where 4 wp^3 - 1 is safely positive.
double duplicate(double p) {
    return 9.0 * p * p * p * p / (4.0 * p * p * p - 1.0) - 2.0 * p;
}

} // namespace

double wp_equianharmonic(double z) {
    if (!std::isfinite(z)) throw InvalidArgument("wp: z must be finite");
    const double om2 = WpConstants::get().omega2;
    const double period = 2.0 * om2;

    double u = std::fmod(z, period);
    if (u < 0.0) u += period;
    // evenness + periodicity fold [omega2, 2 omega2) onto (0, omega2]
    if (u > om2) u = period - u;

    if (u < 1e-10)
        throw PoleProximity("wp: z within 1e-10 of a lattice point");

    if (u <= 0.5) return wp_series(u);
    if (u <= 1.0) return duplicate(wp_series(0.5 * u));
    return duplicate(duplicate(wp_series(0.25 * u)));
}

} // namespace qghjm
