#pragma once

#include <cstddef>
#include <span>

#include "gnormal/kernels.hpp"

namespace gnormal::kernels {

// Mass arriving at output node k; shared by every variant for the edge nodes.
inline double forward_node(std::span<const double> prev, std::span<const double> control,
                           std::ptrdiff_t k, const StepCoefficients& c)
{
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(prev.size());
    auto move = [&](std::ptrdiff_t j) {
        return (j >= 0 && j < m) ? (control[j] * c.q_per_var) * prev[j] : 0.0;
    };
    auto stay = [&](std::ptrdiff_t j) {
        return (j >= 0 && j < m) ? (1.0 - 2.0 * (control[j] * c.q_per_var)) * prev[j] : 0.0;
    };
    return (move(k - 2) + stay(k - 1)) + move(k);
}

void backward_step_scalar(std::span<const double> next, std::span<double> out,
                          std::span<double> control, const StepCoefficients& c);
void flux_step_scalar(std::span<const double> next, std::span<const double> var,
                      std::span<double> out, std::span<double> out_var, const StepCoefficients& c);
void forward_step_scalar(std::span<const double> prev, std::span<const double> control,
                         std::span<double> out, const StepCoefficients& c);

#if defined(GNORMAL_HAVE_AVX2)
void backward_step_avx2(std::span<const double> next, std::span<double> out,
                        std::span<double> control, const StepCoefficients& c);
void flux_step_avx2(std::span<const double> next, std::span<const double> var,
                    std::span<double> out, std::span<double> out_var, const StepCoefficients& c);
void forward_step_avx2(std::span<const double> prev, std::span<const double> control,
                       std::span<double> out, const StepCoefficients& c);
const KernelTable& avx2_kernels();
#endif

}  // namespace gnormal::kernels
