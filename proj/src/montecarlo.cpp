#include "gnormal/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace gnormal {

std::uint64_t path_stream_seed(std::uint64_t seed, std::uint64_t path) noexcept
{
    SplitMix64 outer(seed);
    const std::uint64_t key = outer();
    SplitMix64 inner(key ^ (path * 0xd1b54a32d192ed03ull));
    return inner();
}

SampleSet sample_paths(const BackwardSolution& sol, std::int64_t n_samples, std::uint64_t seed,
                       unsigned threads)
{
    if (n_samples < 1) {
        throw InvalidParam("n_samples must be at least 1");
    }
    const Grid& grid = sol.grid;
    const int n_steps = grid.n_steps;
    const double q_per_var = grid.dt / (2.0 * grid.h * grid.h);
    const double q_lo = grid.params.sigma_lo_sq * q_per_var;
    const double q_hi = grid.params.sigma_hi_sq * q_per_var;

    SampleSet set;
    set.grid = grid;
    set.seed = seed;
    set.n_samples = n_samples;
    set.terminal_indices.assign(static_cast<std::size_t>(n_samples), 0);

    auto run_range = [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t path = begin; path < end; ++path) {
            SplitMix64 rng(path_stream_seed(seed, static_cast<std::uint64_t>(path)));
            int j = 0;
            for (int n = 0; n < n_steps; ++n) {
                const double q = sol.controls(n, j) == grid.params.sigma_hi_sq ? q_hi : q_lo;
                const double u = rng.uniform();
                if (u < q) {
                    --j;
                } else if (u >= 1.0 - q) {
                    ++j;
                }
            }
            set.terminal_indices[static_cast<std::size_t>(path)] = j;
        }
    };

    unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(
        std::min<std::int64_t>(workers, std::max<std::int64_t>(1, n_samples / 4096)));
    if (workers <= 1) {
        run_range(0, n_samples);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::int64_t chunk = (n_samples + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::int64_t begin = std::min<std::int64_t>(n_samples, w * chunk);
            const std::int64_t end = std::min<std::int64_t>(n_samples, begin + chunk);
            pool.emplace_back(run_range, begin, end);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    std::vector<std::int64_t> counts(2 * n_steps + 1, 0);
    for (std::int32_t j : set.terminal_indices) {
        ++counts[static_cast<std::size_t>(j + n_steps)];
    }
    set.histogram.resize(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        set.histogram[k] = static_cast<double>(counts[k]) / static_cast<double>(n_samples);
    }
    return set;
}

std::vector<HistogramRow> histogram_rows(const SampleSet& set)
{
    std::vector<HistogramRow> rows;
    const int n_steps = set.grid.n_steps;
    for (int i = -n_steps; i <= n_steps; ++i) {
        const double m = set.histogram[static_cast<std::size_t>(i + n_steps)];
        if (m > 0.0) {
            rows.push_back({set.grid.x(i), m, m / set.grid.h});
        }
    }
    return rows;
}

double tv_distance(const SampleSet& set, const DiscreteDistribution& dist)
{
    if (dist.level != set.grid.n_steps || !dist.grid.same_mesh(set.grid)) {
        throw GridMismatch("sample set and distribution use different grids");
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < set.histogram.size(); ++k) {
        acc += std::abs(set.histogram[k] - dist.masses[k]);
    }
    return acc;
}

MeanCheck check_mean(const SampleSet& set, const DiscreteDistribution& dist)
{
    MeanCheck check;
    double sum = 0.0;
    for (std::int32_t j : set.terminal_indices) {
        sum += set.grid.x(j);
    }
    check.empirical_mean = sum / static_cast<double>(set.n_samples);
    check.exact_mean = dist.moment(1);
    const double variance = std::max(0.0, dist.moment(2) - check.exact_mean * check.exact_mean);
    check.chain_stddev = std::sqrt(variance);
    const double stderr_mean = check.chain_stddev / std::sqrt(static_cast<double>(set.n_samples));
    const double diff = std::abs(check.empirical_mean - check.exact_mean);
    check.z_score = stderr_mean > 0.0 ? diff / stderr_mean : (diff > 0.0 ? INFINITY : 0.0);
    check.flagged = check.z_score > 5.0;
    return check;
}

}  // namespace gnormal
