#pragma once

#include <cmath>
#include <cstddef>

namespace geg::kernels::detail {

struct ScalarPack {
    double v;
    static constexpr size_t width = 1;
    using Mask = bool;
    using ScalarFallback = ScalarPack;

    static ScalarPack broadcast(double c) { return {c}; }
    static ScalarPack load(const double* p) { return {*p}; }
    void store(double* p) const { *p = v; }

    friend ScalarPack operator+(ScalarPack a, ScalarPack b) { return {a.v + b.v}; }
    friend ScalarPack operator-(ScalarPack a, ScalarPack b) { return {a.v - b.v}; }
    friend ScalarPack operator*(ScalarPack a, ScalarPack b) { return {a.v * b.v}; }

    static ScalarPack fmadd(ScalarPack a, ScalarPack b, ScalarPack c) {
        return {std::fma(a.v, b.v, c.v)};
    }

    static Mask cmp_le(ScalarPack a, ScalarPack b) { return a.v <= b.v; }
    static Mask cmp_ge(ScalarPack a, ScalarPack b) { return a.v >= b.v; }
    static Mask cmp_gt(ScalarPack a, ScalarPack b) { return a.v > b.v; }
    static Mask cmp_unord(ScalarPack a) { return a.v != a.v; }
    static Mask mask_or(Mask a, Mask b) { return a || b; }
    static Mask mask_and(Mask a, Mask b) { return a && b; }
    static bool mask_any(Mask m) { return m; }
    static Mask mask_from_bools(const bool* b) { return b[0]; }
    static ScalarPack blend(Mask m, ScalarPack a, ScalarPack b) { return m ? a : b; }
    static double hsum(ScalarPack a) { return a.v; }
};

} // namespace geg::kernels::detail
