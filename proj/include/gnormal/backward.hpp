#pragma once

#include "gnormal/core.hpp"
#include "gnormal/kernels.hpp"
#include "gnormal/payoff.hpp"

namespace gnormal {

/// Value lattice, bang-bang control lattice and root value of the backward
/// trinomial tree.
struct BackwardSolution {
    Grid grid;
    double tol = kDefaultTolerance;
    /// U_i^n for n = 0..N, |i| <= n.
    Lattice values;
    /// Variance chosen at decision node (n, i) for n = 0..N-1; always exactly
    /// sigma_lo_sq or sigma_hi_sq.
    Lattice controls;
    /// U_0^0.
    double root = 0.0;
    /// max_i |phi(x_i)| over the terminal level and max |U| over the lattice.
    double terminal_sup = 0.0;
    double lattice_sup = 0.0;
};

kernels::StepCoefficients step_coefficients(const Grid& grid, double tol);

/// Backward recursion U_i^n = U_i^{n+1} + (dt/2) sigma^2 D with
/// D = delta_h^2 U_i^{n+1} and sigma^2 = sigma_hi_sq iff D > tol.
///
/// Throws CflViolation, InvalidParam (negative tol), NonFiniteValue, or
/// StabilityViolation if the discrete maximum principle fails.
BackwardSolution solve_backward(const Grid& grid, const Payoff& payoff,
                                double tol = kDefaultTolerance);

/// Same recursion through an explicit kernel table (used to compare ISAs).
BackwardSolution solve_backward(const Grid& grid, const Payoff& payoff, double tol,
                                const kernels::KernelTable& table);

/// Root value computed through the transition-probability form
/// U_i^n = P U_{i-1}^{n+1} + (1 - 2P) U_i^{n+1} + P U_{i+1}^{n+1}, P = sigma^2 dt / (2 h^2),
/// with the same control rule. Independent of the kernel layer.
double solve_backward_probability_form(const Grid& grid, const Payoff& payoff,
                                       double tol = kDefaultTolerance);

/// E[phi(X)] approximated by U_0^0.
inline double expectation(const BackwardSolution& sol) noexcept
{
    return sol.root;
}

/// Control variance at decision node (n, i), 0 <= n <= N-1, |i| <= n.
/// Throws IndexOutOfLattice.
double control_at(const BackwardSolution& sol, int n, int i);

}  // namespace gnormal
