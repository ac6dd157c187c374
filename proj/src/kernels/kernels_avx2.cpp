// AVX2+FMA lanes. Same expression trees as the scalar backend via
// kernels_body.hpp; every lane computes bit-identical doubles.
#include <immintrin.h>

#include "pack_scalar.hpp"

#include "kernels_body.hpp"

namespace geg::kernels::detail {

struct AvxPack {
    __m256d v;
    static constexpr size_t width = 4;
    using Mask = __m256d;
    using ScalarFallback = ScalarPack;

    static AvxPack broadcast(double c) { return {_mm256_set1_pd(c)}; }
    static AvxPack load(const double* p) { return {_mm256_loadu_pd(p)}; }
    void store(double* p) const { _mm256_storeu_pd(p, v); }

    friend AvxPack operator+(AvxPack a, AvxPack b) { return {_mm256_add_pd(a.v, b.v)}; }
    friend AvxPack operator-(AvxPack a, AvxPack b) { return {_mm256_sub_pd(a.v, b.v)}; }
    friend AvxPack operator*(AvxPack a, AvxPack b) { return {_mm256_mul_pd(a.v, b.v)}; }

    static AvxPack fmadd(AvxPack a, AvxPack b, AvxPack c) {
        return {_mm256_fmadd_pd(a.v, b.v, c.v)};
    }

    static Mask cmp_le(AvxPack a, AvxPack b) { return _mm256_cmp_pd(a.v, b.v, _CMP_LE_OQ); }
    static Mask cmp_ge(AvxPack a, AvxPack b) { return _mm256_cmp_pd(a.v, b.v, _CMP_GE_OQ); }
    static Mask cmp_gt(AvxPack a, AvxPack b) { return _mm256_cmp_pd(a.v, b.v, _CMP_GT_OQ); }
    static Mask cmp_unord(AvxPack a) { return _mm256_cmp_pd(a.v, a.v, _CMP_NEQ_UQ); }
    static Mask mask_or(Mask a, Mask b) { return _mm256_or_pd(a, b); }
    static Mask mask_and(Mask a, Mask b) { return _mm256_and_pd(a, b); }
    static bool mask_any(Mask m) { return _mm256_movemask_pd(m) != 0; }

    static Mask mask_from_bools(const bool* b) {
        return _mm256_castsi256_pd(_mm256_set_epi64x(
            b[3] ? -1 : 0, b[2] ? -1 : 0, b[1] ? -1 : 0, b[0] ? -1 : 0));
    }

    static AvxPack blend(Mask m, AvxPack a, AvxPack b) {
        return {_mm256_blendv_pd(b.v, a.v, m)};
    }

    static double hsum(AvxPack a) {
        alignas(32) double t[4];
        _mm256_store_pd(t, a.v);
        return (t[0] + t[1]) + (t[2] + t[3]);
    }
};

void step_batch_avx2(BuiltinTag tag, Algo algo, const StepSizes& s,
                     double* xs, double* ys, size_t count) {
    tag_dispatch(tag, [&]<BuiltinTag T>() {
        step_batch_impl<T, AvxPack>(algo, s, xs, ys, count);
    });
}

void run_cells_avx2(BuiltinTag tag, const RunParams& p, const double* x0, const double* y0,
                    CellResult* out, size_t count) {
    tag_dispatch(tag, [&]<BuiltinTag T>() {
        run_cells_impl<T, AvxPack>(p, x0, y0, out, count);
    });
}

double dot_avx2(const double* a, const double* b, size_t n) {
    return dot_impl<AvxPack>(a, b, n);
}

void axpy_avx2(double alpha, const double* x, double* y, size_t n) {
    axpy_impl<AvxPack>(alpha, x, y, n);
}

} // namespace geg::kernels::detail
