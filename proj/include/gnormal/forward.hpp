#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gnormal/backward.hpp"

namespace gnormal {

/// Probability masses p_i at one time level, i = -level..level.
struct DiscreteDistribution {
    Grid grid;
    int level = 0;
    std::vector<double> masses;

    double mass(int i) const { return masses.at(static_cast<std::size_t>(i + level)); }
    double x(int i) const noexcept { return grid.x(i); }
    double total_mass() const noexcept;
    double moment(int k) const noexcept;
};

struct ForwardResult {
    /// Law at the terminal level N.
    DiscreteDistribution terminal;
    /// p_i^n for every level when history was requested.
    std::optional<Lattice> history;
    /// Worst |sum_i p_i^n - 1| and min p_i^n over all levels.
    double max_mass_defect = 0.0;
    double min_mass = 0.0;
};

/// Propagates the unit mass at x = 0 forward through the transition rows of
/// the stored control:
///   p_i^n = q_{i-1} p_{i-1}^{n-1} + (1 - 2 q_i) p_i^{n-1} + q_{i+1} p_{i+1}^{n-1},
///   q_j = sigma^2_j^{n-1} dt / (2 h^2).
/// Throws NonFiniteValue, or NegativeMass if a mass drops below zero.
ForwardResult propagate(const BackwardSolution& sol, bool keep_history = false);
ForwardResult propagate(const BackwardSolution& sol, bool keep_history,
                        const kernels::KernelTable& table);

/// sum_i p_i phi(x_i).
double expectation_forward(const DiscreteDistribution& dist, const Payoff& payoff);

struct DensityRow {
    double x;
    double mass;
    double density;
};

struct DensityTable {
    double h = 0.0;
    /// Sorted ascending in x.
    std::vector<DensityRow> rows;
};

/// Rows (x_i, p_i, p_i / h) for every node of the level.
DensityTable density(const DiscreteDistribution& dist);

/// Smooth test function phi(t, x) for the discrete weak formulation.
using SpaceTimeFunction = std::function<double(double t, double x)>;

struct WeakFormResidual {
    /// |sum_i [p_i^0 phi_i^0 - p_i^N phi_i^N] h
    ///  + sum_{n<N} sum_i p_i^n [(phi_i^{n+1} - phi_i^n) / dt
    ///                            + (sigma^2_i^n / 2) delta_h^2 phi_i^{n+1}] h dt|
    double residual = 0.0;
    /// Sum of absolute values of the individual terms.
    double scale = 0.0;
};

/// Evaluates the summation-by-parts form of the forward scheme against a
/// test function. The spatial difference is taken at level n+1, the level
/// the scheme is tested against, so the combination vanishes identically.
/// Throws HistoryMissing unless `forward` was produced with keep_history.
WeakFormResidual weak_form_residual(const ForwardResult& forward, const BackwardSolution& sol,
                                    const SpaceTimeFunction& testfn);

}  // namespace gnormal
