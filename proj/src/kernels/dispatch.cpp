#include "geg/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace geg::kernels {

namespace {

bool cpu_has_avx2_fma() {
#if defined(GEG_HAVE_AVX2_TU) && defined(__x86_64__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<SimdMode> g_mode{SimdMode::Auto};

bool use_avx2() {
    switch (g_mode.load(std::memory_order_relaxed)) {
        case SimdMode::Scalar: return false;
        case SimdMode::Avx2: return true;
        default: return cpu_has_avx2_fma();
    }
}

} // namespace

void set_simd_mode(SimdMode mode) {
    if (mode == SimdMode::Avx2 && !cpu_has_avx2_fma())
        throw std::runtime_error("set_simd_mode: AVX2+FMA not available on this machine/build");
    g_mode.store(mode, std::memory_order_relaxed);
}

SimdMode simd_mode() { return g_mode.load(std::memory_order_relaxed); }

const char* active_backend() { return use_avx2() ? "avx2" : "scalar"; }

void step_batch(BuiltinTag tag, Algo algo, const StepSizes& s,
                double* xs, double* ys, size_t count) {
#if defined(GEG_HAVE_AVX2_TU)
    if (use_avx2()) {
        detail::step_batch_avx2(tag, algo, s, xs, ys, count);
        return;
    }
#endif
    detail::step_batch_scalar(tag, algo, s, xs, ys, count);
}

void run_cells(BuiltinTag tag, const RunParams& p, const double* x0, const double* y0,
               CellResult* out, size_t count) {
#if defined(GEG_HAVE_AVX2_TU)
    if (use_avx2()) {
        detail::run_cells_avx2(tag, p, x0, y0, out, count);
        return;
    }
#endif
    detail::run_cells_scalar(tag, p, x0, y0, out, count);
}

double dot(const double* a, const double* b, size_t n) {
#if defined(GEG_HAVE_AVX2_TU)
    if (use_avx2()) return detail::dot_avx2(a, b, n);
#endif
    return detail::dot_scalar(a, b, n);
}

void axpy(double alpha, const double* x, double* y, size_t n) {
#if defined(GEG_HAVE_AVX2_TU)
    if (use_avx2()) {
        detail::axpy_avx2(alpha, x, y, n);
        return;
    }
#endif
    detail::axpy_scalar(alpha, x, y, n);
}

} // namespace geg::kernels
