// AVX2 lane. Full four-wide blocks run the shared kernel bodies over the
// vector pack; the sub-width remainder is handed to the scalar lane, which
// runs the same bodies, so results do not depend on where the split falls.
#include "smearkit/simd/kernels.hpp"

#ifdef __AVX2__

#include "smearkit/simd/pack.hpp"

#include "kernels_impl.hpp"

namespace smearkit::simd {

namespace {

using P4 = pack<4>;

void step_coupled_gamma_avx2(double* x, double* v, const double* z1,
                             const double* z2, std::size_t n,
                             const CoupledGammaStep& p) {
    const std::size_t n4 = n - n % P4::width;
    step_coupled_gamma_impl<P4>(x, v, z1, z2, n4, p);
    if (n4 < n)
        scalar_kernels().step_coupled_gamma(x + n4, v + n4, z1 + n4, z2 + n4,
                                            n - n4, p);
}

void step_heston_avx2(double* x, double* v, const double* z1, const double* z2,
                      std::size_t n, const HestonStep& p) {
    const std::size_t n4 = n - n % P4::width;
    step_heston_impl<P4>(x, v, z1, z2, n4, p);
    if (n4 < n)
        scalar_kernels().step_heston(x + n4, v + n4, z1 + n4, z2 + n4, n - n4,
                                     p);
}

void step_exact_avx2(double* x, double* y, const double* dy, const double* z,
                     std::size_t n, const ExactStep& p) {
    const std::size_t n4 = n - n % P4::width;
    step_exact_impl<P4>(x, y, dy, z, n4, p);
    if (n4 < n)
        scalar_kernels().step_exact(x + n4, y + n4, dy + n4, z + n4, n - n4, p);
}

void vexp_avx2(const double* in, double* out, std::size_t n) {
    const std::size_t n4 = n - n % P4::width;
    vexp_impl<P4>(in, out, n4);
    if (n4 < n) scalar_kernels().vexp(in + n4, out + n4, n - n4);
}

}  // namespace

const Kernels* avx2_kernels() {
    static const Kernels k = {step_coupled_gamma_avx2, step_heston_avx2,
                              step_exact_avx2, vexp_avx2, "avx2"};
    return &k;
}

}  // namespace smearkit::simd

#else  // !__AVX2__

namespace smearkit::simd {

const Kernels* avx2_kernels() { return nullptr; }

}  // namespace smearkit::simd

#endif
