#include "qghjm/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "qghjm/rng.hpp"

namespace qghjm {
namespace mc {

namespace {

constexpr int kBlock = 256;   // paths per reduction block (fixed: determinism)

struct BlockAccum {
    std::vector<double> sum_r, sum_r2, sum_y;
    std::vector<std::pair<int, double>> hits;   // (global path index, hit time)

    explicit BlockAccum(std::size_t n_times)
        : sum_r(n_times, 0.0), sum_r2(n_times, 0.0), sum_y(n_times, 0.0) {}

    void add(const BlockAccum& o) {
        for (std::size_t i = 0; i < sum_r.size(); ++i) {
            sum_r[i] += o.sum_r[i];
            sum_r2[i] += o.sum_r2[i];
            sum_y[i] += o.sum_y[i];
        }
        hits.insert(hits.end(), o.hits.begin(), o.hits.end());
    }
};

// fixed-shape pairwise tree; the result never depends on which thread
// filled which block
BlockAccum reduce_pairwise(std::vector<BlockAccum>& blocks, std::size_t lo,
                           std::size_t hi) {
    if (hi - lo == 1) return std::move(blocks[lo]);
    const std::size_t mid = lo + (hi - lo) / 2;
    BlockAccum left = reduce_pairwise(blocks, lo, mid);
    BlockAccum right = reduce_pairwise(blocks, mid, hi);
    left.add(right);
    return left;
}

} // namespace

Summary simulate(const ModelParams& p, double t_end, const Config& cfg) {
    if (cfg.n_paths <= 0) throw InvalidArgument("mc: n_paths must be positive");
    if (!(cfg.dt > 0.0)) throw InvalidArgument("mc: dt must be positive");
    if (!(t_end > 0.0)) throw InvalidArgument("mc: t_end must be positive");
    if (!(cfg.noise_scale >= 0.0)) throw InvalidArgument("mc: noise_scale must be >= 0");

    const double lambda0 = p.curve.value(0.0);
    if (cfg.barrier < 0.0 || (cfg.barrier > 0.0 && cfg.barrier <= lambda0))
        throw InvalidArgument("mc: barrier must exceed lambda(0); 0 picks the default");
    const double barrier = cfg.barrier > 0.0 ? cfg.barrier : 1000.0 * lambda0;

    const int n_steps = static_cast<int>(std::ceil(t_end / cfg.dt - 1e-12));
    std::vector<double> times(n_steps + 1);
    for (int k = 0; k < n_steps; ++k) times[k] = k * cfg.dt;
    times[n_steps] = t_end;

    // per-step curve values are path-independent; precompute once
    std::vector<double> lam(n_steps), dlam(n_steps), hs(n_steps);
    for (int k = 0; k < n_steps; ++k) {
        lam[k] = p.curve.value(times[k]);
        dlam[k] = p.curve.d1(times[k]);
        hs[k] = times[k + 1] - times[k];
    }

    const double sigma = p.sigma, beta = p.beta, eps = cfg.noise_scale;
    const double s2 = sigma * sigma;

    const int n_blocks = (cfg.n_paths + kBlock - 1) / kBlock;
    std::vector<BlockAccum> blocks(static_cast<std::size_t>(n_blocks),
                                   BlockAccum(times.size()));

    auto run_block = [&](int b) {
        BlockAccum& acc = blocks[static_cast<std::size_t>(b)];
        const int p_lo = b * kBlock;
        const int p_hi = std::min(cfg.n_paths, p_lo + kBlock);
        for (int path = p_lo; path < p_hi; ++path) {
            double r = lambda0, y = 0.0;
            bool absorbed = false;
            for (int k = 0; k <= n_steps; ++k) {
                if (!absorbed && r >= barrier) {
                    absorbed = true;
                    acc.hits.emplace_back(path, times[k]);
                }
                acc.sum_r[k] += r;
                acc.sum_r2[k] += r * r;
                acc.sum_y[k] += y;
                if (k == n_steps || absorbed) continue;

                const double h = hs[k];
                const double drift = y - beta * r + beta * lam[k] + dlam[k];
                // y first, exact in r over the step
                if (beta == 0.0) {
                    y += s2 * r * r * h;
                } else {
                    const double decay = std::exp(-2.0 * beta * h);
                    y = y * decay + s2 * r * r * (1.0 - decay) / (2.0 * beta);
                }
                const double dw = eps == 0.0
                    ? 0.0
                    : std::sqrt(h) * rng::normal(cfg.seed,
                                                 static_cast<std::uint64_t>(path),
                                                 static_cast<std::uint64_t>(k));
                if (cfg.scheme == Scheme::LogEulerDiffusion) {
                    r = (r + drift * h)
                        * std::exp(eps * sigma * dw - 0.5 * eps * eps * s2 * h);
                } else {
                    r = r + drift * h + eps * sigma * r * dw;
                }
            }
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int n_threads = static_cast<int>(std::min<unsigned>(hw, n_blocks));
    if (n_threads <= 1) {
        for (int b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i)
            pool.emplace_back([&] {
                for (int b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
                    run_block(b);
            });
        for (auto& th : pool) th.join();
    }

    BlockAccum total = reduce_pairwise(blocks, 0, blocks.size());
    std::sort(total.hits.begin(), total.hits.end());   // back to path order

    Summary s;
    s.times = std::move(times);
    s.n_paths = cfg.n_paths;
    s.barrier = barrier;
    const double n = cfg.n_paths;
    s.mean_r.resize(s.times.size());
    s.stderr_r.resize(s.times.size());
    s.mean_y.resize(s.times.size());
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        const double m = total.sum_r[k] / n;
        s.mean_r[k] = m;
        s.mean_y[k] = total.sum_y[k] / n;
        const double var = cfg.n_paths > 1
            ? std::max(0.0, (total.sum_r2[k] - n * m * m) / (n - 1.0))
            : 0.0;
        s.stderr_r[k] = std::sqrt(var / n);
    }
    s.hit_times.reserve(total.hits.size());
    for (const auto& [path, t] : total.hits) s.hit_times.push_back(t);
    s.hit_fraction = static_cast<double>(total.hits.size()) / n;
    return s;
}

HitTimeStats hit_time_stats(const Summary& s) {
    HitTimeStats st{};
    st.n_hit = static_cast<int>(s.hit_times.size());
    st.n_censored = s.n_paths - st.n_hit;
    st.hit_fraction = s.hit_fraction;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (st.n_hit == 0) {
        st.mean = st.stddev = st.q05 = st.q25 = st.q50 = st.q75 = st.q95 = nan;
        return st;
    }
    std::vector<double> h = s.hit_times;
    std::sort(h.begin(), h.end());
    double sum = 0.0, sum2 = 0.0;
    for (double t : h) {
        sum += t;
        sum2 += t * t;
    }
    st.mean = sum / st.n_hit;
    st.stddev = st.n_hit > 1
        ? std::sqrt(std::max(0.0, (sum2 - st.n_hit * st.mean * st.mean)
                                      / (st.n_hit - 1.0)))
        : 0.0;
    auto quantile = [&](double q) {
        const double pos = q * (h.size() - 1);
        const std::size_t i = static_cast<std::size_t>(pos);
        if (i + 1 >= h.size()) return h.back();
        const double w = pos - static_cast<double>(i);
        return h[i] * (1.0 - w) + h[i + 1] * w;
    };
    st.q05 = quantile(0.05);
    st.q25 = quantile(0.25);
    st.q50 = quantile(0.50);
    st.q75 = quantile(0.75);
    st.q95 = quantile(0.95);
    return st;
}

HitTimeStats hit_time_stats(const ModelParams& p, const Config& cfg, double t_end) {
    return hit_time_stats(simulate(p, t_end, cfg));
}

} // namespace mc
} // namespace qghjm
