#include "gnormal/forward.hpp"

#include <algorithm>
#include <cmath>

namespace gnormal {

namespace {

// Neumaier-compensated sum, so the conservation check measures the masses
// rather than the summation error.
double compensated_sum(std::span<const double> values)
{
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

}  // namespace

double DiscreteDistribution::total_mass() const noexcept
{
    return compensated_sum(masses);
}

double DiscreteDistribution::moment(int k) const noexcept
{
    double acc = 0.0;
    for (int i = -level; i <= level; ++i) {
        acc += masses[static_cast<std::size_t>(i + level)] * std::pow(grid.x(i), k);
    }
    return acc;
}

ForwardResult propagate(const BackwardSolution& sol, bool keep_history)
{
    return propagate(sol, keep_history, kernels::active_kernels());
}

ForwardResult propagate(const BackwardSolution& sol, bool keep_history,
                        const kernels::KernelTable& table)
{
    const Grid& grid = sol.grid;
    grid.check_cfl();
    const int n_steps = grid.n_steps;
    const auto coeffs = step_coefficients(grid, sol.tol);

    ForwardResult result;
    if (keep_history) {
        result.history.emplace(n_steps + 1);
        (*result.history)(0, 0) = 1.0;
    }

    std::vector<double> prev{1.0};
    std::vector<double> cur;
    prev.reserve(2 * n_steps + 1);
    cur.reserve(2 * n_steps + 1);
    result.min_mass = 1.0;

    for (int n = 1; n <= n_steps; ++n) {
        cur.resize(2 * n + 1);
        table.forward_step(prev, sol.controls.level(n - 1), cur, coeffs);

        double lowest = cur[0];
        for (double p : cur) {
            if (!std::isfinite(p)) {
                throw NonFiniteValue("mass became non-finite at level " + std::to_string(n));
            }
            lowest = std::min(lowest, p);
        }
        if (lowest < 0.0) {
            throw NegativeMass("negative mass " + std::to_string(lowest) + " at level "
                               + std::to_string(n));
        }
        result.min_mass = std::min(result.min_mass, lowest);
        result.max_mass_defect =
            std::max(result.max_mass_defect, std::abs(compensated_sum(cur) - 1.0));
        if (keep_history) {
            std::copy(cur.begin(), cur.end(), result.history->level(n).begin());
        }
        std::swap(prev, cur);
    }

    result.terminal.grid = grid;
    result.terminal.level = n_steps;
    result.terminal.masses = std::move(prev);
    return result;
}

double expectation_forward(const DiscreteDistribution& dist, const Payoff& payoff)
{
    double acc = 0.0;
    for (int i = -dist.level; i <= dist.level; ++i) {
        acc += dist.masses[static_cast<std::size_t>(i + dist.level)] * payoff(dist.x(i));
    }
    return acc;
}

DensityTable density(const DiscreteDistribution& dist)
{
    DensityTable table;
    table.h = dist.grid.h;
    table.rows.reserve(dist.masses.size());
    for (int i = -dist.level; i <= dist.level; ++i) {
        const double m = dist.masses[static_cast<std::size_t>(i + dist.level)];
        table.rows.push_back({dist.x(i), m, m / dist.grid.h});
    }
    return table;
}

WeakFormResidual weak_form_residual(const ForwardResult& forward, const BackwardSolution& sol,
                                    const SpaceTimeFunction& testfn)
{
    if (!forward.history) {
        throw HistoryMissing("weak-form residual needs the full mass history");
    }
    const Lattice& p = *forward.history;
    const Grid& grid = sol.grid;
    if (p.n_levels() != grid.n_steps + 1) {
        throw GridMismatch("mass history does not match the backward solution");
    }
    const int n_steps = grid.n_steps;
    const double h = grid.h;
    const double dt = grid.dt;
    const double inv_h2 = 1.0 / (h * h);

    double total = 0.0;
    double scale = 0.0;
    auto add = [&](double term) {
        total += term;
        scale += std::abs(term);
    };

    for (int i = -n_steps; i <= n_steps; ++i) {
        const double phi_end = testfn(grid.t(n_steps), grid.x(i));
        add(-p(n_steps, i) * phi_end * h);
    }
    add(p(0, 0) * testfn(0.0, 0.0) * h);

    for (int n = 0; n < n_steps; ++n) {
        const double t_now = grid.t(n);
        const double t_next = grid.t(n + 1);
        for (int i = -n; i <= n; ++i) {
            const double mass = p(n, i);
            const double phi_now = testfn(t_now, grid.x(i));
            const double left = testfn(t_next, grid.x(i - 1));
            const double centre = testfn(t_next, grid.x(i));
            const double right = testfn(t_next, grid.x(i + 1));
            const double lap = ((left - 2.0 * centre) + right) * inv_h2;
            add(mass * (centre - phi_now) / dt * h * dt);
            add(mass * 0.5 * sol.controls(n, i) * lap * h * dt);
        }
    }
    return {std::abs(total), scale};
}

}  // namespace gnormal
