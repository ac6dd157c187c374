// Shared test oracles. These stay independent of the implementation paths
// they check: gradients and Jacobians by plain central differences on the
// public eval/step surfaces, determinants by complex LU.
#pragma once

#include <cmath>
#include <complex>
#include <functional>

#include "geg/calculus.hpp"
#include "geg/problems.hpp"

namespace tst {

inline double rel_err(double a, double b) {
    return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline geg::Vec fd_grad_oracle(const geg::MinMaxProblem& p, const geg::Vec& z,
                               double h0 = 1e-6) {
    geg::Vec g(z.size()), zz = z;
    for (size_t i = 0; i < z.size(); ++i) {
        const double h = h0 * std::max(1.0, std::fabs(z[i]));
        const double zi = zz[i];
        zz[i] = zi + h;
        const double fp = p.eval(zz);
        zz[i] = zi - h;
        const double fm = p.eval(zz);
        zz[i] = zi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

inline geg::Matrix fd_hess_oracle(const geg::MinMaxProblem& p, const geg::Vec& z,
                                  double h0 = 5e-5) {
    const int d = static_cast<int>(z.size());
    geg::Matrix h(d, d);
    geg::Vec zz = z;
    const double f0 = p.eval(zz);
    for (int i = 0; i < d; ++i) {
        const double hi = h0 * std::max(1.0, std::fabs(z[i]));
        const double zi = zz[i];
        zz[i] = zi + hi;
        const double fp = p.eval(zz);
        zz[i] = zi - hi;
        const double fm = p.eval(zz);
        zz[i] = zi;
        h(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
        for (int j = i + 1; j < d; ++j) {
            const double hj = h0 * std::max(1.0, std::fabs(z[j]));
            const double zj = zz[j];
            zz[i] = zi + hi;
            zz[j] = zj + hj;
            const double fpp = p.eval(zz);
            zz[j] = zj - hj;
            const double fpm = p.eval(zz);
            zz[i] = zi - hi;
            const double fmm = p.eval(zz);
            zz[j] = zj + hj;
            const double fmp = p.eval(zz);
            zz[i] = zi;
            zz[j] = zj;
            const double v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return h;
}

inline geg::Matrix fd_jacobian_of_map(const std::function<geg::Vec(const geg::Vec&)>& w,
                                      const geg::Vec& z, double h0 = 1e-6) {
    const int d = static_cast<int>(z.size());
    geg::Matrix j(d, d);
    geg::Vec zz = z;
    for (int c = 0; c < d; ++c) {
        const double h = h0 * std::max(1.0, std::fabs(z[c]));
        const double zc = zz[c];
        zz[c] = zc + h;
        const geg::Vec wp = w(zz);
        zz[c] = zc - h;
        const geg::Vec wm = w(zz);
        zz[c] = zc;
        for (int r = 0; r < d; ++r) j(r, c) = (wp[r] - wm[r]) / (2.0 * h);
    }
    return j;
}

/// |det(A - lambda I)| via complex LU with partial pivoting.
inline double charpoly_residual(const geg::Matrix& a, std::complex<double> lambda) {
    const int n = a.rows();
    std::vector<std::complex<double>> m(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m[static_cast<size_t>(i) * n + j] =
                std::complex<double>(a(i, j), 0.0) - (i == j ? lambda : 0.0);
    std::complex<double> det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(m[static_cast<size_t>(k) * n + k]);
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(m[static_cast<size_t>(i) * n + k]);
            if (v > best) { best = v; piv = i; }
        }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j)
                std::swap(m[static_cast<size_t>(k) * n + j], m[static_cast<size_t>(piv) * n + j]);
            det = -det;
        }
        const std::complex<double> p = m[static_cast<size_t>(k) * n + k];
        det *= p;
        for (int i = k + 1; i < n; ++i) {
            const std::complex<double> f = m[static_cast<size_t>(i) * n + k] / p;
            for (int j = k; j < n; ++j)
                m[static_cast<size_t>(i) * n + j] -= f * m[static_cast<size_t>(k) * n + j];
        }
    }
    return std::abs(det);
}

inline geg::Matrix random_matrix(int d, geg::Rng& rng, double scale = 1.0) {
    geg::Matrix a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = scale * rng.normal();
    return a;
}

} // namespace tst
