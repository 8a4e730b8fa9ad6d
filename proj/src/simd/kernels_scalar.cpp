#include "smearkit/simd/kernels.hpp"
#include "smearkit/simd/pack.hpp"

#include "kernels_impl.hpp"

namespace smearkit::simd {

namespace {

using P1 = pack<1>;

void step_coupled_gamma_scalar(double* x, double* v, const double* z1,
                               const double* z2, std::size_t n,
                               const CoupledGammaStep& p) {
    step_coupled_gamma_impl<P1>(x, v, z1, z2, n, p);
}

void step_heston_scalar(double* x, double* v, const double* z1,
                        const double* z2, std::size_t n, const HestonStep& p) {
    step_heston_impl<P1>(x, v, z1, z2, n, p);
}

void step_exact_scalar(double* x, double* y, const double* dy, const double* z,
                       std::size_t n, const ExactStep& p) {
    step_exact_impl<P1>(x, y, dy, z, n, p);
}

void vexp_scalar(const double* in, double* out, std::size_t n) {
    vexp_impl<P1>(in, out, n);
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k = {step_coupled_gamma_scalar, step_heston_scalar,
                              step_exact_scalar, vexp_scalar, "scalar"};
    return k;
}

}  // namespace smearkit::simd
