#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qghjm/curve.hpp"
#include "qghjm/errors.hpp"

namespace qghjm {

// Small-noise deterministic limit of the one-factor model:
//   r' = y - beta r + beta lambda(t) + lambda'(t)
//   y' = sigma^2 r^2 - 2 beta y,          r(0) = lambda(0), y(0) = 0.
struct ModelParams {
    double sigma;
    double beta;
    ForwardCurve curve;

    ModelParams(double sigma_, double beta_, ForwardCurve curve_)
        : sigma(sigma_), beta(beta_), curve(std::move(curve_)) {
        if (!(sigma >= 0.0)) throw InvalidArgument("params: sigma must be >= 0");
        if (!(beta >= 0.0)) throw InvalidArgument("params: beta must be >= 0");
    }
};

struct DetState {
    double r;
    double y;
};

struct StepControl {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double r_ceiling = 1e6;        // stop and bracket blow-up past this
    double h_min_scale = 1e-14;    // h_min = h_min_scale * t_end
    double dt_out = 0.0;           // > 0: record exactly on the uniform grid
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DetState> states;
    bool blown_up = false;
    // (last time with r below the ceiling, time of the state that crossed it)
    std::optional<std::pair<double, double>> blowup_bracket;
};

// Integration failed before t_end and before any ceiling crossing.
struct SolveFailure : Error {
    SolveFailure(std::string what, Trajectory partial_)
        : Error(std::move(what)), partial(std::move(partial_)) {}
    Trajectory partial;
};

DetState rhs(const ModelParams& p, double t, const DetState& s);

// From (lambda(0), 0).  If dt_out > 0 the integrator lands exactly on the
// grid times (no dense-output interpolation error); otherwise every accepted
// step is recorded.
Trajectory solve(const ModelParams& p, double t_end, const StepControl& ctrl = {});

// Same integrator from an arbitrary start; used by the phase-portrait probe.
Trajectory solve_from(const ModelParams& p, DetState s0, double t0, double t_end,
                      const StepControl& ctrl = {});

// Cubic Hermite on the stored samples, nodal derivatives from the vector field.
DetState interp_state(const Trajectory& traj, const ModelParams& p, double t);

// Fixed-point iteration of the equivalent integral equation
//   r_{k+1}(t) = lambda(t) + sigma^2 int_0^t r_k^2(s) K_beta(t-s) ds,
//   K_beta(u)  = (exp(-beta u) - exp(-2 beta u)) / beta   (-> u as beta -> 0),
// trapezoid rule on a uniform grid; y reconstructed from the same quadrature.
// Wholly independent of the RK path; the two must agree on non-explosive
// parameter sets.
Trajectory picard_solve(const ModelParams& p, double t_end, int grid_points = 4001,
                        int max_iters = 100, double tol = 1e-10,
                        double r_ceiling = 1e6);

// sup_t r(t) <= (beta^2/sigma^2) (1 - sqrt(1 - 2 lambda_max sigma^2 / beta^2))
// whenever 2 lambda_max sigma^2 <= beta^2; absent otherwise (or lambda unbounded).
std::optional<double> uniform_bound(const ModelParams& p);

struct Corollary1Gap {
    double measured_gap;   // sup over the output grid of |r(t) - lambda(t)|
    double bound;          // lambda_max^2 sigma^2 / (2 beta^2), leading order
};
Corollary1Gap corollary1_gap(const ModelParams& p, double horizon,
                             double dt_out = 0.05);

// r(inf) = (beta^2/sigma^2) (1 - sqrt(1 - 2 lambda(inf) sigma^2 / beta^2));
// absent when lambda has no limit or the discriminant is negative.
std::optional<double> stationary_limit(const ModelParams& p);

enum class FixedPointRegime { NoFixedPoints, Degenerate, TwoFixedPoints };
enum class StabilityClass { AttractiveNode, SaddlePoint, Degenerate };

// Flat-curve stationary analysis.  beta_C = sigma sqrt(2 lambda0); above it
// two fixed points Pi_1 (attractive node) and Pi_2 (saddle), eigenvalues
//   (1/2) (-3 beta +- 3 beta sqrt(1 -+ (8/9) sqrt(Delta))),
//   Delta = 1 - 2 lambda0 sigma^2 / beta^2.
struct FixedPointReport {
    double beta_critical;
    FixedPointRegime regime;
    std::optional<DetState> pi1, pi2;
    std::optional<std::array<double, 2>> eigen1, eigen2;
    std::optional<StabilityClass> class1, class2;
};

// Requires a Flat curve and sigma > 0.
FixedPointReport fixed_points(const ModelParams& p);

} // namespace qghjm
