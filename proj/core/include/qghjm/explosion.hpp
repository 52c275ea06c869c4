#pragma once

#include <vector>

#include "qghjm/detsys.hpp"
#include "qghjm/weierstrass.hpp"

namespace qghjm {

enum class ExplosionMethod { ClosedFormBeta0, QuadratureBetaPositive, OdeBracket };

struct ExplosionReport {
    double tau;                    // years
    ExplosionMethod method;
    bool is_upper_bound;           // true unless the curve is Flat
    double error_estimate;         // years
    bool subcritical;              // beta < beta_C = sigma sqrt(2 lambda0)
};

// Flat curve, beta = 0: the second-order reduction r'' = sigma^2 r^2 with
// r(0) = lambda0, r'(0) = 0 blows up at
//   tau = sqrt(6 p0) omega2 / (sigma sqrt(lambda0)),
// with (p0, omega2) the equianharmonic constants.  blowup_time_constant()
// returns the dimensionless sqrt(6 p0) omega2 (~2.9744774).
double blowup_time_constant();
ExplosionReport explosion_time_beta0(double sigma, double lambda0);

// Model-level wrappers.  For non-flat curves satisfying the comparison
// hypothesis the flat-lambda(0) value dominates the true explosion time, so
// is_upper_bound = (curve not Flat).  beta != 0 in the closed-form route is a
// WrongRegime error pointing at the quadrature route.
ExplosionReport explosion_time_beta0(const ModelParams& p);
ExplosionReport explosion_time_quadrature(const ModelParams& p);

// Independent check on the closed form: the energy first integral
//   (r')^2 = (2 sigma^2 / 3) (r^3 - lambda0^3)
// gives tau as an integral over the profile, mapped by u = lambda0/r onto
// [0, 1] and split so both halves are smooth; adaptive quadrature from there.
// Shares nothing with the (p0, omega2) route.
double explosion_time_energy_oracle(double sigma, double lambda0);

// First-order profile of v^2 where v(x) = r'(t(x)) along the flat-curve
// trajectory:  y'(x)/2 + 3 beta sqrt(y) = f(x) = sigma^2 x^2 - 2 beta^2 x
// + 2 beta^2 lambda0, y(lambda0) = 0, y'(lambda0) = 2 sigma^2 lambda0^2.
// Subcritical profiles stay positive; at or above beta_C they vanish again
// at some x in (lambda0, 2 lambda0].
struct YProfile {
    std::vector<double> xs;
    std::vector<double> ys;
    // Interior dip past the forced rise off y(lambda0) = 0: the refined
    // minimum over samples after the profile first turns down.  Vanished
    // profiles put the vanish point here with value 0; profiles that never
    // turn down (small beta) report their terminal sample.
    double min_location;
    double min_value;
    bool vanished;
};

// x_max <= 0 picks 4 * lambda0.
YProfile solve_y_profile(double sigma, double beta, double lambda0,
                         double x_max = 0.0);

// Subcritical beta (strictly below sigma sqrt(2 lambda0); throws Supercritical
// otherwise):  tau = int_{lambda0}^inf dx / sqrt(y(x)), assembled from an
// analytic sqrt-singularity piece on [lambda0, lambda0 + 1e-6 lambda0], the
// profile ODE driven jointly with the tau integrand, and an analytic cubic
// tail y ~ (2 sigma^2/3) x^3 once its next-order correction bound drops below
// 1e-9 of tau.  The correction bound lands in error_estimate.
ExplosionReport explosion_time_quadrature(double sigma, double beta,
                                          double lambda0);

// Bisection of the profile vanish/no-vanish indicator over
// [0, 2 sigma sqrt(2 lambda0)]; independent of the closed form it must
// reproduce to ~tol.
double critical_beta(double sigma, double lambda0, double tol = 1e-5);

struct VProfile {
    double beta;
    std::vector<double> xs;
    std::vector<double> vs;    // v = sqrt(y)
    bool vanished;
    double terminal_x;         // vanish point, or the probe limit
};

std::vector<VProfile> v_profiles_figure(double sigma, double lambda0,
                                        const std::vector<double>& betas,
                                        double x_max = 0.0);

} // namespace qghjm
