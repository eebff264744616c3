// AVX2 variants of the per-level kernels. Each node goes through the same
// IEEE operations as the scalar reference kernel, four doubles at a time.
//
// Only the functions below carry target("avx2"); the rest of this translation
// unit (including inline library code it instantiates) stays on the baseline
// ISA, so selecting the scalar table on an older CPU is safe.

#include "kernels_impl.hpp"

#if defined(GNORMAL_HAVE_AVX2)

#include <immintrin.h>

#define GNORMAL_AVX2 __attribute__((target("avx2")))

namespace gnormal::kernels {

GNORMAL_AVX2 void backward_step_avx2(std::span<const double> next, std::span<double> out,
                                     std::span<double> control, const StepCoefficients& c)
{
    const std::size_t m = out.size();
    const double* src = next.data();
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d inv_h2 = _mm256_set1_pd(c.inv_h2);
    const __m256d half_dt = _mm256_set1_pd(c.half_dt);
    const __m256d tol = _mm256_set1_pd(c.tol);
    const __m256d lo = _mm256_set1_pd(c.sigma_lo_sq);
    const __m256d hi = _mm256_set1_pd(c.sigma_hi_sq);

    std::size_t k = 0;
    for (; k + 4 <= m; k += 4) {
        const __m256d left = _mm256_loadu_pd(src + k);
        const __m256d centre = _mm256_loadu_pd(src + k + 1);
        const __m256d right = _mm256_loadu_pd(src + k + 2);
        const __m256d d = _mm256_mul_pd(
            _mm256_add_pd(_mm256_sub_pd(left, _mm256_mul_pd(two, centre)), right), inv_h2);
        const __m256d var = _mm256_blendv_pd(lo, hi, _mm256_cmp_pd(d, tol, _CMP_GT_OQ));
        _mm256_storeu_pd(control.data() + k, var);
        _mm256_storeu_pd(out.data() + k,
                         _mm256_add_pd(centre, _mm256_mul_pd(_mm256_mul_pd(half_dt, var), d)));
    }
    if (k < m) {
        backward_step_scalar(next.subspan(k), out.subspan(k), control.subspan(k), c);
    }
}

GNORMAL_AVX2 void flux_step_avx2(std::span<const double> next, std::span<const double> var,
                                 std::span<double> out, std::span<double> out_var,
                                 const StepCoefficients& c)
{
    const std::size_t m = out.size();
    const double* src = next.data();
    const double* src_var = var.data();
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d inv_h2 = _mm256_set1_pd(c.inv_h2);
    const __m256d half_dt = _mm256_set1_pd(c.half_dt);
    const __m256d tol = _mm256_set1_pd(c.tol);
    const __m256d lo = _mm256_set1_pd(c.sigma_lo_sq);
    const __m256d hi = _mm256_set1_pd(c.sigma_hi_sq);

    std::size_t k = 0;
    for (; k + 4 <= m; k += 4) {
        const __m256d left = _mm256_loadu_pd(src + k);
        const __m256d centre = _mm256_loadu_pd(src + k + 1);
        const __m256d right = _mm256_loadu_pd(src + k + 2);
        const __m256d lap = _mm256_mul_pd(
            _mm256_add_pd(_mm256_sub_pd(left, _mm256_mul_pd(two, centre)), right), inv_h2);
        const __m256d bracket = _mm256_add_pd(_mm256_div_pd(centre, _mm256_loadu_pd(src_var + k + 1)),
                                              _mm256_mul_pd(half_dt, lap));
        const __m256d v = _mm256_blendv_pd(lo, hi, _mm256_cmp_pd(bracket, tol, _CMP_GT_OQ));
        _mm256_storeu_pd(out_var.data() + k, v);
        _mm256_storeu_pd(out.data() + k, _mm256_mul_pd(v, bracket));
    }
    if (k < m) {
        flux_step_scalar(next.subspan(k), var.subspan(k), out.subspan(k), out_var.subspan(k), c);
    }
}

GNORMAL_AVX2 void forward_step_avx2(std::span<const double> prev, std::span<const double> control,
                                    std::span<double> out, const StepCoefficients& c)
{
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(prev.size());
    const std::ptrdiff_t out_size = static_cast<std::ptrdiff_t>(out.size());
    const double* p = prev.data();
    const double* ctl = control.data();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d qpv = _mm256_set1_pd(c.q_per_var);

    // Nodes k in [2, m - 1] have all three sources inside `prev`.
    std::ptrdiff_t k = 0;
    for (; k < 2 && k < out_size; ++k) {
        out[k] = forward_node(prev, control, k, c);
    }
    for (; k + 4 <= m; k += 4) {
        const __m256d q_left = _mm256_mul_pd(_mm256_loadu_pd(ctl + k - 2), qpv);
        const __m256d q_centre = _mm256_mul_pd(_mm256_loadu_pd(ctl + k - 1), qpv);
        const __m256d q_right = _mm256_mul_pd(_mm256_loadu_pd(ctl + k), qpv);
        const __m256d from_left = _mm256_mul_pd(q_left, _mm256_loadu_pd(p + k - 2));
        const __m256d from_centre = _mm256_mul_pd(_mm256_sub_pd(one, _mm256_mul_pd(two, q_centre)),
                                                  _mm256_loadu_pd(p + k - 1));
        const __m256d from_right = _mm256_mul_pd(q_right, _mm256_loadu_pd(p + k));
        _mm256_storeu_pd(out.data() + k,
                         _mm256_add_pd(_mm256_add_pd(from_left, from_centre), from_right));
    }
    for (; k < out_size; ++k) {
        out[k] = forward_node(prev, control, k, c);
    }
}

const KernelTable& avx2_kernels()
{
    static const KernelTable table{"avx2", &backward_step_avx2, &flux_step_avx2,
                                   &forward_step_avx2};
    return table;
}

}  // namespace gnormal::kernels

#endif  // GNORMAL_HAVE_AVX2
