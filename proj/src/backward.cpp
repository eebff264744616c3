#include "gnormal/backward.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gnormal {

namespace {

// Slack on the maximum-principle check; the bound is exact in real
// arithmetic and each step adds at most a few ulps.
constexpr double kStabilitySlack = 1e-12;

void check_tolerance(double tol)
{
    if (!(tol >= 0.0) || !std::isfinite(tol)) {
        throw InvalidParam("switching tolerance must be a finite nonnegative number");
    }
}

double fill_terminal(std::span<double> level, const Grid& grid, const Payoff& payoff)
{
    const int n = grid.n_steps;
    double sup = 0.0;
    for (int i = -n; i <= n; ++i) {
        const double v = payoff(grid.x(i));
        if (!std::isfinite(v)) {
            throw NonFiniteValue("payoff is not finite at x = " + std::to_string(grid.x(i)));
        }
        level[i + n] = v;
        sup = std::max(sup, std::abs(v));
    }
    return sup;
}

}  // namespace

kernels::StepCoefficients step_coefficients(const Grid& grid, double tol)
{
    kernels::StepCoefficients c{};
    c.sigma_lo_sq = grid.params.sigma_lo_sq;
    c.sigma_hi_sq = grid.params.sigma_hi_sq;
    c.inv_h2 = 1.0 / (grid.h * grid.h);
    c.half_dt = 0.5 * grid.dt;
    c.q_per_var = grid.dt / (2.0 * grid.h * grid.h);
    c.tol = tol;
    return c;
}

BackwardSolution solve_backward(const Grid& grid, const Payoff& payoff, double tol)
{
    return solve_backward(grid, payoff, tol, kernels::active_kernels());
}

BackwardSolution solve_backward(const Grid& grid, const Payoff& payoff, double tol,
                                const kernels::KernelTable& table)
{
    grid.check_cfl();
    check_tolerance(tol);

    const int n_steps = grid.n_steps;
    BackwardSolution sol;
    sol.grid = grid;
    sol.tol = tol;
    sol.values = Lattice(n_steps + 1);
    sol.controls = Lattice(n_steps);

    sol.terminal_sup = fill_terminal(sol.values.level(n_steps), grid, payoff);
    const auto coeffs = step_coefficients(grid, tol);

    double sup = sol.terminal_sup;
    for (int n = n_steps - 1; n >= 0; --n) {
        auto out = sol.values.level(n);
        table.backward_step(sol.values.level(n + 1), out, sol.controls.level(n), coeffs);
        for (double v : out) {
            if (!std::isfinite(v)) {
                throw NonFiniteValue("value lattice became non-finite at level "
                                     + std::to_string(n));
            }
            sup = std::max(sup, std::abs(v));
        }
    }
    sol.lattice_sup = sup;
    sol.root = sol.values(0, 0);

    if (sol.lattice_sup > sol.terminal_sup + kStabilitySlack * std::max(1.0, sol.terminal_sup)) {
        throw StabilityViolation("value lattice exceeds the terminal sup norm");
    }
    return sol;
}

double solve_backward_probability_form(const Grid& grid, const Payoff& payoff, double tol)
{
    grid.check_cfl();
    check_tolerance(tol);

    const int n_steps = grid.n_steps;
    const double inv_h2 = 1.0 / (grid.h * grid.h);
    const double q_per_var = grid.dt / (2.0 * grid.h * grid.h);

    std::vector<double> next(2 * n_steps + 1);
    fill_terminal(next, grid, payoff);
    std::vector<double> cur(next.size());

    for (int n = n_steps - 1; n >= 0; --n) {
        const int m = 2 * n + 1;
        for (int k = 0; k < m; ++k) {
            const double left = next[k];
            const double centre = next[k + 1];
            const double right = next[k + 2];
            const double d = ((left - 2.0 * centre) + right) * inv_h2;
            const double var = d > tol ? grid.params.sigma_hi_sq : grid.params.sigma_lo_sq;
            const double p = var * q_per_var;
            cur[k] = (p * left + (1.0 - 2.0 * p) * centre) + p * right;
        }
        cur.resize(m);
        std::swap(cur, next);
        cur.resize(next.size());
    }
    if (!std::isfinite(next[0])) {
        throw NonFiniteValue("root value is not finite");
    }
    return next[0];
}

double control_at(const BackwardSolution& sol, int n, int i)
{
    return sol.controls.at(n, i);
}

}  // namespace gnormal
