#pragma once

#include "gnormal/backward.hpp"

namespace gnormal {

/// Discrete curvature V = delta_h^2 U and flux W = sigma^2(V) V of a backward
/// solution. Both lattices use inset 1: level n holds |i| <= n - 1.
struct CurvatureLattice {
    Lattice v;
    Lattice w;
};

CurvatureLattice curvature_from_solution(const BackwardSolution& sol);

/// How the flux recursion is started at t = T.
enum class FluxTerminal {
    /// W^N = sigma^2(phi'') phi'' from the exact second derivative.
    analytic,
    /// W^N = sigma^2(delta_h^2 phi) delta_h^2 phi. With this start the flux
    /// recursion reproduces sigma^2(delta_h^2 U) delta_h^2 U of the value
    /// lattice up to rounding.
    discrete,
};

/// Output of the standalone flux recursion. `variance` holds the sigma^2
/// that produced each flux value, so V = flux / variance.
struct FluxSolution {
    Grid grid;
    double tol = kDefaultTolerance;
    FluxTerminal terminal = FluxTerminal::analytic;
    Lattice flux;
    Lattice variance;
    double terminal_sup = 0.0;
    double lattice_sup = 0.0;
};

/// Explicit flux recursion, stepped from level n+1 to n through the
/// curvature bracket
///   B_i = W_i^{n+1} / sigma^2_i^{n+1} + (dt/2) delta_h^2 W_i^{n+1},
///   sigma^2_i^n = sigma_hi_sq iff B_i > tol,  W_i^n = sigma^2_i^n B_i.
/// The stencil shrinks one node per step; level n holds |i| <= n - 1.
///
/// Throws CflViolation, NonFiniteValue, or StabilityViolation when
/// sup |W^n| exceeds sup |W^N|.
FluxSolution solve_w_scheme(const Grid& grid, const Payoff& payoff,
                            double tol = kDefaultTolerance,
                            FluxTerminal terminal = FluxTerminal::analytic);

FluxSolution solve_w_scheme(const Grid& grid, const Payoff& payoff, double tol,
                            FluxTerminal terminal, const kernels::KernelTable& table);

struct ControlConvergenceReport {
    /// max |W_from_solution - W_from_scheme| over common nodes.
    double max_w_discrepancy = 0.0;
    /// max |V_from_solution - W_from_scheme / variance_from_scheme|.
    double max_v_discrepancy = 0.0;
    /// max of |W_sol - W_scheme| / max(1, |W_sol|, |W_scheme|).
    double max_scaled_w_discrepancy = 0.0;
    /// Nodes whose scheme variance differs from the stored decision-time
    /// control of the backward solution.
    long control_mismatches = 0;
    long nodes_compared = 0;
};

/// Compares the flux recursion against the curvature of the value lattice.
/// Throws GridMismatch when the two were built on different grids.
ControlConvergenceReport control_convergence_report(const BackwardSolution& sol,
                                                    const FluxSolution& flux);

}  // namespace gnormal
