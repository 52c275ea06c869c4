#include "qghjm/detsys.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qghjm/rk45.hpp"

namespace qghjm {

DetState rhs(const ModelParams& p, double t, const DetState& s) {
    const double lam = p.curve.value(t);
    const double dlam = p.curve.d1(t);
    return {s.y - p.beta * s.r + p.beta * lam + dlam,
            p.sigma * p.sigma * s.r * s.r - 2.0 * p.beta * s.y};
}

namespace {

Trajectory integrate(const ModelParams& p, DetState s0, double t0, double t_end,
                     const StepControl& ctrl) {
    Trajectory traj;
    traj.times.push_back(t0);
    traj.states.push_back(s0);
    if (t_end <= t0) return traj;

    auto f = [&p](double t, const std::array<double, 2>& v,
                  std::array<double, 2>& dv) {
        const DetState d = rhs(p, t, {v[0], v[1]});
        dv[0] = d.r;
        dv[1] = d.y;
    };

    Rk45Options opt;
    opt.rel_tol = ctrl.rel_tol;
    opt.abs_tol = ctrl.abs_tol;
    opt.h_min = ctrl.h_min_scale * t_end;

    std::array<double, 2> v{s0.r, s0.y};
    const bool record_all = ctrl.dt_out <= 0.0;

    auto on_step = [&](double t_prev, const std::array<double, 2>&, double t_new,
                       const std::array<double, 2>& v_new) {
        if (v_new[0] > ctrl.r_ceiling) {
            traj.times.push_back(t_new);
            traj.states.push_back({v_new[0], v_new[1]});
            traj.blown_up = true;
            traj.blowup_bracket = {t_prev, t_new};
            return false;
        }
        if (record_all) {
            traj.times.push_back(t_new);
            traj.states.push_back({v_new[0], v_new[1]});
        }
        return true;
    };

    double t = t0;
    std::size_t k = 1;
    while (t < t_end && !traj.blown_up) {
        double target = record_all ? t_end : std::min(t0 + k * ctrl.dt_out, t_end);
        if (target <= t) {  // at or past the grid point already
            ++k;
            continue;
        }
        const Rk45Outcome out = rk45_integrate<2>(f, t, target, v, opt, on_step);
        if (out == Rk45Outcome::StepUnderflow)
            throw SolveFailure("solve: step size underflow before t_end", traj);
        if (traj.blown_up) break;
        t = target;
        ++k;
        if (!record_all) {
            traj.times.push_back(t);
            traj.states.push_back({v[0], v[1]});
        }
    }
    return traj;
}

} // namespace

Trajectory solve(const ModelParams& p, double t_end, const StepControl& ctrl) {
    return integrate(p, {p.curve.value(0.0), 0.0}, 0.0, t_end, ctrl);
}

Trajectory solve_from(const ModelParams& p, DetState s0, double t0, double t_end,
                      const StepControl& ctrl) {
    return integrate(p, s0, t0, t_end, ctrl);
}

DetState interp_state(const Trajectory& traj, const ModelParams& p, double t) {
    if (traj.times.empty()) throw InvalidArgument("interp_state: empty trajectory");
    if (t < traj.times.front() || t > traj.times.back())
        throw InvalidArgument("interp_state: t outside the covered range");
    const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - traj.times.begin());
    if (i < traj.times.size() && traj.times[i] == t) return traj.states[i];
    --i;

    // cubic Hermite; nodal derivatives come from the vector field itself
    const double t0 = traj.times[i], t1 = traj.times[i + 1];
    const double h = t1 - t0, u = (t - t0) / h;
    const DetState s0 = traj.states[i], s1 = traj.states[i + 1];
    const DetState d0 = rhs(p, t0, s0), d1 = rhs(p, t1, s1);

    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    const double h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u);
    const double h11 = u * u * (u - 1);
    return {h00 * s0.r + h10 * h * d0.r + h01 * s1.r + h11 * h * d1.r,
            h00 * s0.y + h10 * h * d0.y + h01 * s1.y + h11 * h * d1.y};
}

Trajectory picard_solve(const ModelParams& p, double t_end, int grid_points,
                        int max_iters, double tol, double r_ceiling) {
    if (!(t_end > 0.0)) throw InvalidArgument("picard_solve: t_end must be > 0");
    if (grid_points < 2) throw InvalidArgument("picard_solve: need >= 2 grid points");
    const int n = grid_points;
    const double dt = t_end / (n - 1);
    const double s2 = p.sigma * p.sigma;
    const double beta = p.beta;

    std::vector<double> lam(n), kern(n), r(n), g(n), r_next(n);
    for (int i = 0; i < n; ++i) {
        const double u = i * dt;
        lam[i] = p.curve.value(u);
        // K_beta(u) = (e^{-bu} - e^{-2bu})/b = e^{-bu} (-expm1(-bu))/b, cancellation-free
        kern[i] = beta == 0.0
            ? u
            : std::exp(-beta * u) * (-std::expm1(-beta * u)) / beta;
        r[i] = lam[i];
    }

    auto partial = [&](const std::vector<double>& rr) {
        Trajectory tr;
        tr.times.resize(rr.size());
        tr.states.resize(rr.size());
        for (std::size_t i = 0; i < rr.size(); ++i) {
            tr.times[i] = static_cast<double>(i) * dt;
            tr.states[i] = {rr[i], 0.0};
        }
        return tr;
    };

    bool converged = false;
    for (int it = 0; it < max_iters && !converged; ++it) {
        for (int i = 0; i < n; ++i) g[i] = r[i] * r[i];
        double change = 0.0;
        r_next[0] = lam[0];
        for (int i = 1; i < n; ++i) {
            // trapezoid over [0, t_i]; kern[0] = 0 kills the right endpoint term
            double acc = 0.5 * g[0] * kern[i];
            for (int j = 1; j < i; ++j) acc += g[j] * kern[i - j];
            const double v = lam[i] + s2 * dt * acc;
            if (!(v < r_ceiling) || !std::isfinite(v))
                throw SolveFailure("picard_solve: iterate exceeded the ceiling (divergent parameters?)",
                                   partial(r));
            change = std::max(change, std::abs(v - r[i]));
            r_next[i] = v;
        }
        r.swap(r_next);
        converged = change < tol;
    }
    if (!converged)
        throw SolveFailure("picard_solve: no convergence within max_iters", partial(r));

    // y(t_i) = sigma^2 int_0^{t_i} r^2(s) e^{2 beta (s - t_i)} ds, same trapezoid
    Trajectory traj = partial(r);
    for (int i = 0; i < n; ++i) g[i] = r[i] * r[i];
    for (int i = 0; i < n; ++i) {
        double acc = 0.5 * g[0] * std::exp(-2.0 * beta * (i * dt));
        for (int j = 1; j < i; ++j) acc += g[j] * std::exp(-2.0 * beta * ((i - j) * dt));
        if (i > 0) acc += 0.5 * g[i];
        traj.states[i].y = s2 * dt * (i == 0 ? 0.0 : acc);
    }
    return traj;
}

std::optional<double> uniform_bound(const ModelParams& p) {
    const double lmax = p.curve.sup_rate();
    if (!std::isfinite(lmax)) return std::nullopt;
    if (p.sigma == 0.0) return lmax;
    if (p.beta == 0.0) return std::nullopt;
    const double x = 2.0 * lmax * p.sigma * p.sigma / (p.beta * p.beta);
    if (x > 1.0) return std::nullopt;
    // (beta^2/sigma^2)(1 - sqrt(1-x)) rewritten to avoid cancellation for small x
    return 2.0 * lmax / (1.0 + std::sqrt(1.0 - x));
}

Corollary1Gap corollary1_gap(const ModelParams& p, double horizon, double dt_out) {
    if (!uniform_bound(p))
        throw WrongRegime("corollary1_gap: uniform bound not applicable at these parameters");
    const double lmax = p.curve.sup_rate();
    StepControl ctrl;
    ctrl.dt_out = dt_out;
    const Trajectory traj = solve(p, horizon, ctrl);
    double gap = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        gap = std::max(gap, std::abs(traj.states[i].r - p.curve.value(traj.times[i])));
    const double bound =
        lmax * lmax * p.sigma * p.sigma / (2.0 * p.beta * p.beta);
    return {gap, bound};
}

std::optional<double> stationary_limit(const ModelParams& p) {
    const auto linf = p.curve.limit_rate();
    if (!linf) return std::nullopt;
    if (*linf == 0.0) return 0.0;
    if (p.sigma == 0.0) return *linf;
    if (p.beta == 0.0) return std::nullopt;
    const double x = 2.0 * (*linf) * p.sigma * p.sigma / (p.beta * p.beta);
    if (x > 1.0) return std::nullopt;
    return 2.0 * (*linf) / (1.0 + std::sqrt(1.0 - x));
}

FixedPointReport fixed_points(const ModelParams& p) {
    if (p.curve.kind() != CurveKind::Flat)
        throw InvalidArgument("fixed_points: requires a Flat curve");
    if (!(p.sigma > 0.0))
        throw InvalidArgument("fixed_points: requires sigma > 0");
    const double l0 = p.curve.lambda0();
    const double s2 = p.sigma * p.sigma;
    const double beta = p.beta;
    const double beta_c = p.sigma * std::sqrt(2.0 * l0);

    FixedPointReport rep;
    rep.beta_critical = beta_c;

    const double tol_crit = 1e-9 * beta_c;
    if (beta < beta_c - tol_crit) {
        rep.regime = FixedPointRegime::NoFixedPoints;
        return rep;
    }

    if (std::abs(beta - beta_c) <= tol_crit) {
        rep.regime = FixedPointRegime::Degenerate;
        const double r1 = 2.0 * l0;
        rep.pi1 = DetState{r1, s2 * r1 * r1 / (2.0 * beta_c)};
        rep.eigen1 = std::array<double, 2>{0.0, -3.0 * beta_c};
        rep.class1 = StabilityClass::Degenerate;
        return rep;
    }

    rep.regime = FixedPointRegime::TwoFixedPoints;
    const double delta = 1.0 - 2.0 * l0 * s2 / (beta * beta);
    const double sq = std::sqrt(delta);
    const double r1 = 2.0 * l0 / (1.0 + sq);          // = (beta^2/s2)(1 - sq)
    const double r2 = (beta * beta / s2) * (1.0 + sq);
    rep.pi1 = DetState{r1, s2 * r1 * r1 / (2.0 * beta)};
    rep.pi2 = DetState{r2, s2 * r2 * r2 / (2.0 * beta)};

    const double s_in = std::sqrt(1.0 - (8.0 / 9.0) * sq);   // in (1/3, 1)
    const double s_out = std::sqrt(1.0 + (8.0 / 9.0) * sq);
    rep.eigen1 = std::array<double, 2>{0.5 * (-3.0 * beta + 3.0 * beta * s_in),
                                       0.5 * (-3.0 * beta - 3.0 * beta * s_in)};
    rep.eigen2 = std::array<double, 2>{0.5 * (-3.0 * beta + 3.0 * beta * s_out),
                                       0.5 * (-3.0 * beta - 3.0 * beta * s_out)};
    rep.class1 = StabilityClass::AttractiveNode;
    rep.class2 = StabilityClass::SaddlePoint;
    return rep;
}

} // namespace qghjm
