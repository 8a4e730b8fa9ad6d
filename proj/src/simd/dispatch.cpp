#include "smearkit/simd/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace smearkit::simd {

namespace {

bool cpu_has_avx2() {
#if (defined(__GNUC__) || defined(__clang__)) && \
    (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const Kernels& select() {
    const char* env = std::getenv("SMEARKIT_SIMD");
    const std::string mode = env ? env : "auto";
    if (mode == "scalar") return scalar_kernels();
    const Kernels* wide = cpu_has_avx2() ? avx2_kernels() : nullptr;
    if (mode == "avx2") {
        if (!wide)
            throw std::runtime_error(
                "SMEARKIT_SIMD=avx2 but no AVX2 lane is available on this "
                "build/CPU");
        return *wide;
    }
    if (mode != "auto")
        throw std::runtime_error("unknown SMEARKIT_SIMD value '" + mode +
                                 "' (expected scalar, avx2, or auto)");
    return wide ? *wide : scalar_kernels();
}

}  // namespace

const Kernels& active_kernels() {
    static const Kernels& chosen = select();
    return chosen;
}

}  // namespace smearkit::simd
