#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace gnormal::kernels {

bool avx2_available()
{
#if defined(GNORMAL_HAVE_AVX2)
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") != 0;
    }();
    return supported;
#else
    return false;
#endif
}

const KernelTable& kernels_for(Isa isa)
{
#if defined(GNORMAL_HAVE_AVX2)
    if (isa == Isa::avx2 && avx2_available()) {
        return avx2_kernels();
    }
#else
    (void)isa;
#endif
    return scalar_kernels();
}

const KernelTable& active_kernels()
{
    static const KernelTable& table = [] () -> const KernelTable& {
        const char* forced = std::getenv("GNORMAL_ISA");
        if (forced != nullptr && std::string_view(forced) == "scalar") {
            return scalar_kernels();
        }
        return kernels_for(Isa::avx2);
    }();
    return table;
}

}  // namespace gnormal::kernels
