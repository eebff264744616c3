#pragma once

#include <span>
#include <string_view>

namespace gnormal::kernels {

// Per-level stencil kernels shared by the backward, flux and forward sweeps.
//
// Every variant performs the same IEEE operations in the same order for each
// node, so the scalar reference and the SIMD variants agree bitwise. The
// per-node formulas are written out once in the scalar implementation.

/// Constants of one time step, precomputed from the grid.
struct StepCoefficients {
    double sigma_lo_sq;
    double sigma_hi_sq;
    double inv_h2;     // 1 / h^2
    double half_dt;    // dt / 2
    double q_per_var;  // dt / (2 h^2); transition weight q = sigma^2 * q_per_var
    double tol;        // switching tolerance
};

/// One backward step of the value recursion.
/// `next` holds m + 2 consecutive nodes of level n+1; node k of the output is
/// centred on next[k + 1]:
///   D = ((next[k] - 2 next[k+1]) + next[k+2]) * inv_h2
///   control[k] = D > tol ? sigma_hi_sq : sigma_lo_sq
///   out[k] = next[k+1] + (half_dt * control[k]) * D
using BackwardStepFn = void (*)(std::span<const double> next, std::span<double> out,
                                std::span<double> control, const StepCoefficients& c);

/// One backward step of the flux recursion, same layout as BackwardStepFn.
/// `var` carries the variance that produced each flux value.
///   B = next[k+1] / var[k+1] + half_dt * (((next[k] - 2 next[k+1]) + next[k+2]) * inv_h2)
///   out_var[k] = B > tol ? sigma_hi_sq : sigma_lo_sq
///   out[k] = out_var[k] * B
using FluxStepFn = void (*)(std::span<const double> next, std::span<const double> var,
                            std::span<double> out, std::span<double> out_var,
                            const StepCoefficients& c);

/// One forward step of the mass recursion. `prev` and `control` hold the
/// m nodes of level n-1; `out` holds the m + 2 nodes of level n, with out[k]
/// aligned to prev[k - 1] and missing neighbours contributing zero:
///   q(j) = control[j] * q_per_var, stay(j) = 1 - 2 q(j)
///   out[k] = (q(k-2) prev[k-2] + stay(k-1) prev[k-1]) + q(k) prev[k]
using ForwardStepFn = void (*)(std::span<const double> prev, std::span<const double> control,
                               std::span<double> out, const StepCoefficients& c);

struct KernelTable {
    std::string_view name;
    BackwardStepFn backward_step;
    FluxStepFn flux_step;
    ForwardStepFn forward_step;
};

enum class Isa { scalar, avx2 };

const KernelTable& scalar_kernels();

/// True when the AVX2 variants were compiled in and the CPU supports them.
bool avx2_available();

/// Kernels for a given instruction set; falls back to scalar when unavailable.
const KernelTable& kernels_for(Isa isa);

/// Kernels selected at startup: the best available ISA, unless the
/// GNORMAL_ISA environment variable is set to "scalar".
const KernelTable& active_kernels();

}  // namespace gnormal::kernels
