#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qghjm/detsys.hpp"

namespace qghjm {
namespace mc {

enum class Scheme { LogEulerDiffusion, EulerAbsorbed };

// noise_scale (epsilon) dials the Brownian term only: epsilon = 0 is the
// deterministic system, epsilon = 1 the full SDE.  The sigma^2 r^2 source in
// the y-update is never scaled.  barrier <= 0 picks 1000 * lambda(0).
struct Config {
    int n_paths = 10000;
    double dt = 1.0 / 250.0;
    double noise_scale = 1.0;
    std::uint64_t seed = 0;
    double barrier = 0.0;
    Scheme scheme = Scheme::LogEulerDiffusion;
};

// Time-grid statistics over paths; absorbed paths carry their crossing value
// forward into the means.
struct Summary {
    std::vector<double> times;
    std::vector<double> mean_r;
    std::vector<double> stderr_r;
    std::vector<double> mean_y;
    std::vector<double> hit_times;   // one entry per absorbed path, path order
    double hit_fraction;
    int n_paths;
    double barrier;
};

// Per step (drift at the step's left endpoint):
//   y <- y e^{-2 beta dt} + sigma^2 r^2 (1 - e^{-2 beta dt}) / (2 beta)
//        (beta = 0: y <- y + sigma^2 r^2 dt), exact in r over the step;
//   LogEulerDiffusion: r <- (r + drift dt) * exp(eps sigma dW - eps^2 sigma^2 dt / 2)
//   EulerAbsorbed:     r <- r + drift dt + eps sigma r dW
// A path is absorbed the first time r >= barrier.  Pairwise block reduction
// keeps the summary bit-identical for a fixed seed regardless of threading.
Summary simulate(const ModelParams& p, double t_end, const Config& cfg);

struct HitTimeStats {
    int n_hit;
    int n_censored;       // paths that never reached the barrier by t_end
    double hit_fraction;
    double mean;          // over hitting paths
    double stddev;
    double q05, q25, q50, q75, q95;
};

HitTimeStats hit_time_stats(const Summary& s);

// convenience form that runs the simulation it summarizes
HitTimeStats hit_time_stats(const ModelParams& p, const Config& cfg, double t_end);

} // namespace mc
} // namespace qghjm
