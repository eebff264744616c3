#include <cstddef>

#include "kernels_impl.hpp"

namespace gnormal::kernels {

void backward_step_scalar(std::span<const double> next, std::span<double> out,
                          std::span<double> control, const StepCoefficients& c)
{
    const std::size_t m = out.size();
    for (std::size_t k = 0; k < m; ++k) {
        const double centre = next[k + 1];
        const double d = ((next[k] - 2.0 * centre) + next[k + 2]) * c.inv_h2;
        const double var = d > c.tol ? c.sigma_hi_sq : c.sigma_lo_sq;
        control[k] = var;
        out[k] = centre + (c.half_dt * var) * d;
    }
}

void flux_step_scalar(std::span<const double> next, std::span<const double> var,
                      std::span<double> out, std::span<double> out_var,
                      const StepCoefficients& c)
{
    const std::size_t m = out.size();
    for (std::size_t k = 0; k < m; ++k) {
        const double centre = next[k + 1];
        const double lap = ((next[k] - 2.0 * centre) + next[k + 2]) * c.inv_h2;
        const double bracket = centre / var[k + 1] + c.half_dt * lap;
        const double v = bracket > c.tol ? c.sigma_hi_sq : c.sigma_lo_sq;
        out_var[k] = v;
        out[k] = v * bracket;
    }
}

void forward_step_scalar(std::span<const double> prev, std::span<const double> control,
                         std::span<double> out, const StepCoefficients& c)
{
    const std::ptrdiff_t out_size = static_cast<std::ptrdiff_t>(out.size());
    for (std::ptrdiff_t k = 0; k < out_size; ++k) {
        out[k] = forward_node(prev, control, k, c);
    }
}

const KernelTable& scalar_kernels()
{
    static const KernelTable table{"scalar", &backward_step_scalar, &flux_step_scalar,
                                   &forward_step_scalar};
    return table;
}

}  // namespace gnormal::kernels
