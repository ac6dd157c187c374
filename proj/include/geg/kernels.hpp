#pragma once

#include <cstddef>
#include <cstdint>

namespace geg::kernels {

/// Builtin 2-D objectives with hand-derived batch kernels.
enum class BuiltinTag { BilinearXY, MultiCritical, QuadCounterexample };

enum class Algo { Geg, Gda };

enum class SimdMode { Auto, Scalar, Avx2 };

/// Select the batch backend. Auto probes cpuid once; forcing Avx2 on a
/// machine without AVX2+FMA throws.
void set_simd_mode(SimdMode mode);
SimdMode simd_mode();
const char* active_backend(); // "scalar" or "avx2"

/// Scalar reference evaluations. The builtin problems' analytic
/// derivatives route through these, so the generic iterate path and the
/// batch kernels see bit-identical gradients.
double value(BuiltinTag tag, double x, double y);
void gradient(BuiltinTag tag, double x, double y, double& gx, double& gy);
void hessian(BuiltinTag tag, double x, double y, double& hxx, double& hxy, double& hyy);

/// Step sizes of one iteration: extrapolation (h1x, h1y) and update
/// (h2x, h2y). GDA uses only the extrapolation pair.
struct StepSizes {
    double ex, ey, ux, uy;
};

/// Apply one map step in place to a batch of independent 2-D states.
void step_batch(BuiltinTag tag, Algo algo, const StepSizes& s,
                double* xs, double* ys, size_t count);

struct CellResult {
    double x = 0.0, y = 0.0;
    long iterations = 0;
    int status = 0; // 0 converged (5-streak), 1 diverged, 2 iteration cap
    /// for status 2: convergence streak before the check at the cap state,
    /// so a scalar continuation reproduces the uninterrupted loop exactly
    int streak = 0;
};

struct RunParams {
    StepSizes steps{};
    Algo algo = Algo::Geg;
    double tol_grad = 1e-8;
    double blowup_radius = 1e8;
    long max_iters = 1000000;
};

/// Iterate every cell until a gradient-norm streak of 5 below tol, a
/// blow-up, or the iteration cap; lanes refill from the pending queue so
/// slow cells do not serialize the batch. Decisions are bitwise identical
/// to the scalar dynamics loop on the same problem.
void run_cells(BuiltinTag tag, const RunParams& p, const double* x0, const double* y0,
               CellResult* out, size_t count);

/// Inner-product and scaled-accumulate used by the ERM network loops.
double dot(const double* a, const double* b, size_t n);
void axpy(double alpha, const double* x, double* y, size_t n);

namespace detail {
double dot_scalar(const double* a, const double* b, size_t n);
void axpy_scalar(double alpha, const double* x, double* y, size_t n);
void step_batch_scalar(BuiltinTag, Algo, const StepSizes&, double*, double*, size_t);
void run_cells_scalar(BuiltinTag, const RunParams&, const double*, const double*,
                      CellResult*, size_t);
#if defined(GEG_HAVE_AVX2_TU)
double dot_avx2(const double* a, const double* b, size_t n);
void axpy_avx2(double alpha, const double* x, double* y, size_t n);
void step_batch_avx2(BuiltinTag, Algo, const StepSizes&, double*, double*, size_t);
void run_cells_avx2(BuiltinTag, const RunParams&, const double*, const double*,
                    CellResult*, size_t);
#endif
} // namespace detail

} // namespace geg::kernels
