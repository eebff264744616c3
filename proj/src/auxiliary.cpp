#include "gnormal/auxiliary.hpp"

#include <algorithm>
#include <cmath>

namespace gnormal {

namespace {

constexpr double kStabilitySlack = 1e-12;

double variance_for(double curvature, const Grid& grid, double tol)
{
    return curvature > tol ? grid.params.sigma_hi_sq : grid.params.sigma_lo_sq;
}

}  // namespace

CurvatureLattice curvature_from_solution(const BackwardSolution& sol)
{
    const int n_steps = sol.grid.n_steps;
    const double inv_h2 = 1.0 / (sol.grid.h * sol.grid.h);
    CurvatureLattice out{Lattice(n_steps + 1, 1), Lattice(n_steps + 1, 1)};
    for (int n = 1; n <= n_steps; ++n) {
        const auto u = sol.values.level(n);
        auto v = out.v.level(n);
        auto w = out.w.level(n);
        for (std::size_t k = 0; k < v.size(); ++k) {
            const double d = ((u[k] - 2.0 * u[k + 1]) + u[k + 2]) * inv_h2;
            v[k] = d;
            w[k] = variance_for(d, sol.grid, sol.tol) * d;
        }
    }
    return out;
}

FluxSolution solve_w_scheme(const Grid& grid, const Payoff& payoff, double tol,
                            FluxTerminal terminal)
{
    return solve_w_scheme(grid, payoff, tol, terminal, kernels::active_kernels());
}

FluxSolution solve_w_scheme(const Grid& grid, const Payoff& payoff, double tol,
                            FluxTerminal terminal, const kernels::KernelTable& table)
{
    grid.check_cfl();
    if (!(tol >= 0.0) || !std::isfinite(tol)) {
        throw InvalidParam("switching tolerance must be a finite nonnegative number");
    }

    const int n_steps = grid.n_steps;
    FluxSolution sol;
    sol.grid = grid;
    sol.tol = tol;
    sol.terminal = terminal;
    sol.flux = Lattice(n_steps + 1, 1);
    sol.variance = Lattice(n_steps + 1, 1);

    {
        auto w = sol.flux.level(n_steps);
        auto var = sol.variance.level(n_steps);
        const int hw = n_steps - 1;
        const double inv_h2 = 1.0 / (grid.h * grid.h);
        for (int i = -hw; i <= hw; ++i) {
            double curvature;
            if (terminal == FluxTerminal::analytic) {
                curvature = payoff.eval_d2(grid.x(i));
            } else {
                curvature = ((payoff(grid.x(i - 1)) - 2.0 * payoff(grid.x(i)))
                             + payoff(grid.x(i + 1)))
                            * inv_h2;
            }
            if (!std::isfinite(curvature)) {
                throw NonFiniteValue("terminal curvature is not finite at x = "
                                     + std::to_string(grid.x(i)));
            }
            const double s = variance_for(curvature, grid, tol);
            var[i + hw] = s;
            w[i + hw] = s * curvature;
            sol.terminal_sup = std::max(sol.terminal_sup, std::abs(w[i + hw]));
        }
    }

    const auto coeffs = step_coefficients(grid, tol);
    double sup = sol.terminal_sup;
    for (int n = n_steps - 1; n >= 1; --n) {
        auto out = sol.flux.level(n);
        table.flux_step(sol.flux.level(n + 1), sol.variance.level(n + 1), out,
                        sol.variance.level(n), coeffs);
        for (double v : out) {
            if (!std::isfinite(v)) {
                throw NonFiniteValue("flux lattice became non-finite at level "
                                     + std::to_string(n));
            }
            sup = std::max(sup, std::abs(v));
        }
    }
    sol.lattice_sup = sup;
    if (sol.lattice_sup > sol.terminal_sup + kStabilitySlack * std::max(1.0, sol.terminal_sup)) {
        throw StabilityViolation("flux lattice exceeds the terminal sup norm");
    }
    return sol;
}

ControlConvergenceReport control_convergence_report(const BackwardSolution& sol,
                                                    const FluxSolution& flux)
{
    if (!sol.grid.same_mesh(flux.grid)) {
        throw GridMismatch("backward solution and flux lattice use different grids");
    }
    const CurvatureLattice curv = curvature_from_solution(sol);
    ControlConvergenceReport report;
    const int n_steps = sol.grid.n_steps;
    for (int n = 1; n <= n_steps; ++n) {
        const auto v_sol = curv.v.level(n);
        const auto w_sol = curv.w.level(n);
        const auto w_sch = flux.flux.level(n);
        const auto var_sch = flux.variance.level(n);
        // Scheme level n holds |i| <= n - 1, the decision nodes of level n - 1.
        const auto ctl = sol.controls.level(n - 1);
        for (std::size_t k = 0; k < w_sol.size(); ++k) {
            const double dw = std::abs(w_sol[k] - w_sch[k]);
            const double dv = std::abs(v_sol[k] - w_sch[k] / var_sch[k]);
            const double scale = std::max({1.0, std::abs(w_sol[k]), std::abs(w_sch[k])});
            report.max_w_discrepancy = std::max(report.max_w_discrepancy, dw);
            report.max_v_discrepancy = std::max(report.max_v_discrepancy, dv);
            report.max_scaled_w_discrepancy = std::max(report.max_scaled_w_discrepancy, dw / scale);
            if (var_sch[k] != ctl[k]) {
                ++report.control_mismatches;
            }
            ++report.nodes_compared;
        }
    }
    return report;
}

}  // namespace gnormal
