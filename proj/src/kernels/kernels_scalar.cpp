#include "pack_scalar.hpp"

#include "kernels_body.hpp"

namespace geg::kernels {

using detail::ScalarPack;

double value(BuiltinTag tag, double x, double y) {
    return detail::tag_dispatch(tag, [&]<BuiltinTag T>() {
        return detail::builtin_value<T, ScalarPack>({x}, {y}).v;
    });
}

void gradient(BuiltinTag tag, double x, double y, double& gx, double& gy) {
    detail::tag_dispatch(tag, [&]<BuiltinTag T>() {
        ScalarPack px{x}, py{y}, pgx{0}, pgy{0};
        detail::builtin_grad<T, ScalarPack>(px, py, pgx, pgy);
        gx = pgx.v;
        gy = pgy.v;
    });
}

void hessian(BuiltinTag tag, double x, double y, double& hxx, double& hxy, double& hyy) {
    detail::tag_dispatch(tag, [&]<BuiltinTag T>() {
        ScalarPack px{x}, py{y}, a{0}, b{0}, c{0};
        detail::builtin_hess<T, ScalarPack>(px, py, a, b, c);
        hxx = a.v;
        hxy = b.v;
        hyy = c.v;
    });
}

namespace detail {

void step_batch_scalar(BuiltinTag tag, Algo algo, const StepSizes& s,
                       double* xs, double* ys, size_t count) {
    tag_dispatch(tag, [&]<BuiltinTag T>() {
        step_batch_impl<T, ScalarPack>(algo, s, xs, ys, count);
    });
}

void run_cells_scalar(BuiltinTag tag, const RunParams& p, const double* x0, const double* y0,
                      CellResult* out, size_t count) {
    tag_dispatch(tag, [&]<BuiltinTag T>() {
        run_cells_impl<T, ScalarPack>(p, x0, y0, out, count);
    });
}

double dot_scalar(const double* a, const double* b, size_t n) {
    return dot_impl<ScalarPack>(a, b, n);
}

void axpy_scalar(double alpha, const double* x, double* y, size_t n) {
    axpy_impl<ScalarPack>(alpha, x, y, n);
}

} // namespace detail
} // namespace geg::kernels
