#pragma once

#include <cstdint>
#include <vector>

#include "gnormal/backward.hpp"
#include "gnormal/forward.hpp"

namespace gnormal {

/// SplitMix64 (Steele, Lea & Flood). Used both as the per-path stream and to
/// derive per-path seeds, so every path is reproducible on its own.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t operator()() noexcept
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

/// Seed of the stream for path `path` under master seed `seed`.
std::uint64_t path_stream_seed(std::uint64_t seed, std::uint64_t path) noexcept;

struct SampleSet {
    Grid grid;
    std::uint64_t seed = 0;
    std::int64_t n_samples = 0;
    /// Terminal node index of each path, in path order.
    std::vector<std::int32_t> terminal_indices;
    /// Empirical mass at node i = -N..N (index i + N).
    std::vector<double> histogram;
};

/// Simulates `n_samples` chains from x = 0 under the stored control. Each
/// step draws one uniform u and moves down if u < q, stays if u < 1 - q,
/// and moves up otherwise. Path k uses its own stream, so the result does
/// not depend on `threads` (0 picks the hardware concurrency).
SampleSet sample_paths(const BackwardSolution& sol, std::int64_t n_samples, std::uint64_t seed,
                       unsigned threads = 0);

struct HistogramRow {
    double x;
    double mass;
    double density;
};

/// Nonempty nodes as (x_i, mass, mass / h), ascending in x.
std::vector<HistogramRow> histogram_rows(const SampleSet& set);

/// sum_i |hist_i - p_i^N|.
double tv_distance(const SampleSet& set, const DiscreteDistribution& dist);

struct MeanCheck {
    double empirical_mean = 0.0;
    double exact_mean = 0.0;
    double chain_stddev = 0.0;
    /// |empirical - exact| / (chain_stddev / sqrt(M)).
    double z_score = 0.0;
    /// Set when the z-score exceeds 5.
    bool flagged = false;
};

MeanCheck check_mean(const SampleSet& set, const DiscreteDistribution& dist);

}  // namespace gnormal
