#pragma once

namespace qghjm {

// Equianharmonic constants for wp(.; g2 = 0, g3 = 1), computed at startup:
//   p0:     the real minimum of wp on (0, 2 omega2), root of 4 p^3 = 1
//   omega2: the real half-period, Gamma(1/3)^3 / (4 pi)
// Nothing here is hard-coded from quoted decimals.
struct WpConstants {
    double p0;
    double omega2;

    static const WpConstants& get();
};

// Weierstrass wp(z; 0, 1) for real z.  Reduction into (0, omega2] by the real
// period 2*omega2 and evenness, truncated Laurent series for |z| <= 1/2, at
// most two applications of the duplication formula otherwise.  Relative
// accuracy ~1e-13 away from the poles; throws PoleProximity within 1e-10 of a
// lattice point 2 k omega2.
double wp_equianharmonic(double z);

} // namespace qghjm
