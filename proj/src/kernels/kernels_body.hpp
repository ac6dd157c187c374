// Shared kernel bodies, templated over a SIMD pack abstraction. Both the
// scalar and the AVX2 translation units instantiate the same expression
// trees, so per-lane arithmetic is bit-identical across backends (fused
// multiply-adds are always written explicitly via Pack fmadd).
#pragma once

#include <cstddef>

#include "geg/kernels.hpp"

namespace geg::kernels::detail {

// Coefficients of the builtin objectives.
//   bilinear:        f = x*y
//   multi-critical:  f = q1(x,y)*(x-1)^2*(y-1)^2 + q2(x,y)*x^2*y^2
//   counterexample:  f = -0.1 x^2 - 0.5 y^2 + 0.5 x y
inline constexpr double MC_A1 = -0.125, MC_B1 = -0.5, MC_C1 = 0.6;
inline constexpr double MC_A2 = 0.5, MC_B2 = 0.5, MC_C2 = 4.0;
inline constexpr double QC_A = -0.1, QC_B = -0.5, QC_C = 0.5;

template <class P>
struct McTerms {
    P q1, q2, g1, g2; // quadratic forms and quartic envelopes
    P sx, sy, x2, y2, sx2, sy2, xy;
};

template <class P>
inline McTerms<P> mc_terms(const P& x, const P& y) {
    McTerms<P> t;
    const P one = P::broadcast(1.0);
    t.sx = x - one;
    t.sy = y - one;
    t.x2 = x * x;
    t.y2 = y * y;
    t.sx2 = t.sx * t.sx;
    t.sy2 = t.sy * t.sy;
    t.xy = x * y;
    t.q1 = P::fmadd(P::broadcast(MC_A1), t.x2,
                    P::fmadd(P::broadcast(MC_B1), t.y2, P::broadcast(MC_C1) * t.xy));
    t.q2 = P::fmadd(P::broadcast(MC_A2), t.x2,
                    P::fmadd(P::broadcast(MC_B2), t.y2, P::broadcast(MC_C2) * t.xy));
    t.g1 = t.sx2 * t.sy2;
    t.g2 = t.x2 * t.y2;
    return t;
}

template <BuiltinTag TAG, class P>
inline void builtin_grad(const P& x, const P& y, P& gx, P& gy) {
    if constexpr (TAG == BuiltinTag::BilinearXY) {
        gx = y;
        gy = x;
    } else if constexpr (TAG == BuiltinTag::QuadCounterexample) {
        gx = P::fmadd(P::broadcast(2.0 * QC_A), x, P::broadcast(QC_C) * y);
        gy = P::fmadd(P::broadcast(2.0 * QC_B), y, P::broadcast(QC_C) * x);
    } else {
        const McTerms<P> t = mc_terms(x, y);
        const P q1x = P::fmadd(P::broadcast(2.0 * MC_A1), x, P::broadcast(MC_C1) * y);
        const P q1y = P::fmadd(P::broadcast(2.0 * MC_B1), y, P::broadcast(MC_C1) * x);
        const P q2x = P::fmadd(P::broadcast(2.0 * MC_A2), x, P::broadcast(MC_C2) * y);
        const P q2y = P::fmadd(P::broadcast(2.0 * MC_B2), y, P::broadcast(MC_C2) * x);
        const P g1x = (t.sx + t.sx) * t.sy2;
        const P g1y = (t.sy + t.sy) * t.sx2;
        const P g2x = (x + x) * t.y2;
        const P g2y = (y + y) * t.x2;
        gx = P::fmadd(q1x, t.g1, P::fmadd(t.q1, g1x, P::fmadd(q2x, t.g2, t.q2 * g2x)));
        gy = P::fmadd(q1y, t.g1, P::fmadd(t.q1, g1y, P::fmadd(q2y, t.g2, t.q2 * g2y)));
    }
}

template <BuiltinTag TAG, class P>
inline P builtin_value(const P& x, const P& y) {
    if constexpr (TAG == BuiltinTag::BilinearXY) {
        return x * y;
    } else if constexpr (TAG == BuiltinTag::QuadCounterexample) {
        const P x2 = x * x, y2 = y * y;
        return P::fmadd(P::broadcast(QC_A), x2,
                        P::fmadd(P::broadcast(QC_B), y2, P::broadcast(QC_C) * (x * y)));
    } else {
        const McTerms<P> t = mc_terms(x, y);
        return P::fmadd(t.q1, t.g1, t.q2 * t.g2);
    }
}

template <BuiltinTag TAG, class P>
inline void builtin_hess(const P& x, const P& y, P& hxx, P& hxy, P& hyy) {
    if constexpr (TAG == BuiltinTag::BilinearXY) {
        hxx = P::broadcast(0.0);
        hxy = P::broadcast(1.0);
        hyy = P::broadcast(0.0);
    } else if constexpr (TAG == BuiltinTag::QuadCounterexample) {
        hxx = P::broadcast(2.0 * QC_A);
        hxy = P::broadcast(QC_C);
        hyy = P::broadcast(2.0 * QC_B);
    } else {
        const McTerms<P> t = mc_terms(x, y);
        const P q1x = P::fmadd(P::broadcast(2.0 * MC_A1), x, P::broadcast(MC_C1) * y);
        const P q1y = P::fmadd(P::broadcast(2.0 * MC_B1), y, P::broadcast(MC_C1) * x);
        const P q2x = P::fmadd(P::broadcast(2.0 * MC_A2), x, P::broadcast(MC_C2) * y);
        const P q2y = P::fmadd(P::broadcast(2.0 * MC_B2), y, P::broadcast(MC_C2) * x);
        const P g1x = (t.sx + t.sx) * t.sy2;
        const P g1y = (t.sy + t.sy) * t.sx2;
        const P g2x = (x + x) * t.y2;
        const P g2y = (y + y) * t.x2;
        const P two = P::broadcast(2.0);
        const P g1xx = two * t.sy2, g1yy = two * t.sx2;
        const P g2xx = two * t.y2, g2yy = two * t.x2;
        const P g1xy = P::broadcast(4.0) * (t.sx * t.sy);
        const P g2xy = P::broadcast(4.0) * t.xy;
        hxx = P::broadcast(2.0 * MC_A1) * t.g1 + two * (q1x * g1x) + t.q1 * g1xx +
              P::broadcast(2.0 * MC_A2) * t.g2 + two * (q2x * g2x) + t.q2 * g2xx;
        hyy = P::broadcast(2.0 * MC_B1) * t.g1 + two * (q1y * g1y) + t.q1 * g1yy +
              P::broadcast(2.0 * MC_B2) * t.g2 + two * (q2y * g2y) + t.q2 * g2yy;
        hxy = P::broadcast(MC_C1) * t.g1 + q1x * g1y + q1y * g1x + t.q1 * g1xy +
              P::broadcast(MC_C2) * t.g2 + q2x * g2y + q2y * g2x + t.q2 * g2xy;
    }
}

// One step of the two-stage map (or plain descent-ascent): the y-block
// of F carries a sign flip, so y + e*gy is the bit-exact equivalent of
// y - e*(-gy) used by the generic operator path.
template <BuiltinTag TAG, class P>
inline void map_step(Algo algo, const StepSizes& s, P& x, P& y) {
    P gx, gy;
    builtin_grad<TAG>(x, y, gx, gy);
    if (algo == Algo::Gda) {
        x = x - P::broadcast(s.ex) * gx;
        y = y + P::broadcast(s.ey) * gy;
        return;
    }
    const P xh = x - P::broadcast(s.ex) * gx;
    const P yh = y + P::broadcast(s.ey) * gy;
    P gxh, gyh;
    builtin_grad<TAG>(xh, yh, gxh, gyh);
    x = x - P::broadcast(s.ux) * gxh;
    y = y + P::broadcast(s.uy) * gyh;
}

template <BuiltinTag TAG, class P>
void step_batch_impl(Algo algo, const StepSizes& s, double* xs, double* ys, size_t count) {
    constexpr size_t W = P::width;
    size_t i = 0;
    for (; i + W <= count; i += W) {
        P x = P::load(xs + i), y = P::load(ys + i);
        map_step<TAG, P>(algo, s, x, y);
        x.store(xs + i);
        y.store(ys + i);
    }
    for (; i < count; ++i) {
        using S = typename P::ScalarFallback;
        S x = S::load(xs + i), y = S::load(ys + i);
        map_step<TAG, S>(algo, s, x, y);
        x.store(xs + i);
        y.store(ys + i);
    }
}

// Lane-refilled trajectory driver. Checks at state z_k (convergence
// streak, blow-up, iteration cap, in that priority) happen before the
// step producing z_{k+1}, matching geg::iterate.
template <BuiltinTag TAG, class P>
void run_cells_impl(const RunParams& rp, const double* x0, const double* y0,
                    CellResult* out, size_t count) {
    constexpr size_t W = P::width;
    using M = typename P::Mask;

    const P tol2 = P::broadcast(rp.tol_grad * rp.tol_grad);
    const P rad2 = P::broadcast(rp.blowup_radius * rp.blowup_radius);
    const P one = P::broadcast(1.0);
    const P zero = P::broadcast(0.0);
    const P five = P::broadcast(5.0);

    alignas(64) double lx[W] = {}, ly[W] = {};
    size_t lane_cell[W];
    long lane_start[W];
    bool lane_active[W];
    bool lane_fresh[W];
    size_t next_cell = 0;
    size_t active_count = 0;

    for (size_t w = 0; w < W; ++w) {
        lane_active[w] = false;
        lane_fresh[w] = false;
        lane_cell[w] = 0;
        lane_start[w] = 0;
        if (next_cell < count) {
            lane_cell[w] = next_cell;
            lx[w] = x0[next_cell];
            ly[w] = y0[next_cell];
            lane_start[w] = 0;
            lane_active[w] = true;
            ++next_cell;
            ++active_count;
        }
    }

    P X = P::load(lx), Y = P::load(ly);
    P STRK = zero;
    M ACT = P::mask_from_bools(lane_active);

    long it = 0;
    long next_deadline = rp.max_iters; // all initial lanes share start 0

    auto recompute_deadline = [&]() {
        next_deadline = -1;
        for (size_t w = 0; w < W; ++w)
            if (lane_active[w]) {
                const long d = lane_start[w] + rp.max_iters;
                if (next_deadline < 0 || d < next_deadline) next_deadline = d;
            }
    };

    while (active_count > 0) {
        P GX, GY;
        builtin_grad<TAG>(X, Y, GX, GY);
        const P GN2 = GX * GX + GY * GY;
        const M conv = P::cmp_le(GN2, tol2);
        const P STRK_pre = STRK;
        STRK = P::blend(conv, STRK + one, zero);
        const M done_conv = P::cmp_ge(STRK, five);
        const P R2 = X * X + Y * Y;
        const M diverged = P::mask_or(P::mask_or(P::cmp_gt(R2, rad2), P::cmp_unord(X)),
                                      P::cmp_unord(Y));
        const M finished = P::mask_and(ACT, P::mask_or(done_conv, diverged));

        if (P::mask_any(finished) || it == next_deadline) {
            alignas(64) double sx[W], sy[W], sk[W], skpre[W];
            X.store(sx);
            Y.store(sy);
            STRK.store(sk);
            STRK_pre.store(skpre);
            bool changed = false;
            for (size_t w = 0; w < W; ++w) {
                if (!lane_active[w]) continue;
                const long k = it - lane_start[w];
                int status = -1;
                if (sk[w] >= 5.0) {
                    status = 0;
                } else {
                    const double r2 = sx[w] * sx[w] + sy[w] * sy[w];
                    const bool div = (r2 > rp.blowup_radius * rp.blowup_radius) ||
                                     (sx[w] != sx[w]) || (sy[w] != sy[w]);
                    if (div)
                        status = 1;
                    else if (k >= rp.max_iters)
                        status = 2;
                }
                if (status < 0) continue;
                out[lane_cell[w]] =
                    CellResult{sx[w], sy[w], k, status, static_cast<int>(skpre[w])};
                changed = true;
                if (next_cell < count) {
                    lane_cell[w] = next_cell;
                    sx[w] = x0[next_cell];
                    sy[w] = y0[next_cell];
                    sk[w] = 0.0;
                    lane_start[w] = it + 1; // first check next iteration, k = 0
                    lane_fresh[w] = true;
                    ++next_cell;
                } else {
                    lane_active[w] = false;
                    --active_count;
                }
            }
            if (changed) {
                X = P::load(sx);
                Y = P::load(sy);
                STRK = P::load(sk);
                ACT = P::mask_from_bools(lane_active);
                recompute_deadline();
            }
            if (active_count == 0) break;
        }

        M step_mask = ACT;
        bool any_fresh = false;
        for (size_t w = 0; w < W; ++w) any_fresh |= lane_fresh[w];
        if (any_fresh) {
            bool stepping[W];
            for (size_t w = 0; w < W; ++w) {
                stepping[w] = lane_active[w] && !lane_fresh[w];
                lane_fresh[w] = false;
            }
            step_mask = P::mask_from_bools(stepping);
        }
        P XN = X, YN = Y;
        map_step<TAG, P>(rp.algo, rp.steps, XN, YN);
        X = P::blend(step_mask, XN, X);
        Y = P::blend(step_mask, YN, Y);
        ++it;
    }
}

template <class P>
double dot_impl(const double* a, const double* b, size_t n) {
    constexpr size_t W = P::width;
    P acc = P::broadcast(0.0);
    size_t i = 0;
    for (; i + W <= n; i += W) acc = P::fmadd(P::load(a + i), P::load(b + i), acc);
    double s = P::hsum(acc);
    for (; i < n; ++i) s = std::fma(a[i], b[i], s);
    return s;
}

template <class P>
void axpy_impl(double alpha, const double* x, double* y, size_t n) {
    constexpr size_t W = P::width;
    const P a = P::broadcast(alpha);
    size_t i = 0;
    for (; i + W <= n; i += W) P::fmadd(a, P::load(x + i), P::load(y + i)).store(y + i);
    for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

template <class Fn>
auto tag_dispatch(BuiltinTag tag, Fn&& fn) {
    switch (tag) {
        case BuiltinTag::BilinearXY: return fn.template operator()<BuiltinTag::BilinearXY>();
        case BuiltinTag::QuadCounterexample:
            return fn.template operator()<BuiltinTag::QuadCounterexample>();
        default: return fn.template operator()<BuiltinTag::MultiCritical>();
    }
}

} // namespace geg::kernels::detail
