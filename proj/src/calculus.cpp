#include "geg/calculus.hpp"

#include <cmath>

namespace geg {

namespace {

constexpr double kRatioTol = 1e-12;
constexpr double kFdStep = 1e-6;

bool rel_close(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

} // namespace

Variant variant_from_string(std::string_view s) {
    if (s == "geg") return Variant::Geg;
    if (s == "eg") return Variant::Eg;
    if (s == "tau-eg" || s == "tau_eg") return Variant::TauEg;
    if (s == "eg-plus" || s == "eg_plus" || s == "eg+") return Variant::EgPlus;
    if (s == "gda") return Variant::Gda;
    throw std::invalid_argument("unknown variant '" + std::string(s) +
                                "'; expected geg, eg, tau-eg, eg-plus or gda");
}

const char* to_string(Variant v) {
    switch (v) {
        case Variant::Geg: return "geg";
        case Variant::Eg: return "eg";
        case Variant::TauEg: return "tau-eg";
        case Variant::EgPlus: return "eg-plus";
        default: return "gda";
    }
}

GegConfig::GegConfig(double h1x, double h1y, double h2x, double h2y, Variant v)
    : h1x_(h1x), h1y_(h1y), h2x_(h2x), h2y_(h2y), variant_(v) {
    if (!(h1x > 0.0) || !(h1y > 0.0) || !(h2x > 0.0) || !(h2y > 0.0))
        throw std::invalid_argument("GegConfig: all four step sizes must be strictly positive");
    const double tau1 = h1y / h1x, tau2 = h2y / h2x;
    if (!rel_close(tau1, tau2, kRatioTol))
        throw std::invalid_argument(
            "GegConfig: inconsistent steps, h2y/h2x must equal h1y/h1x (both define tau)");
    const double g1 = h2x / h1x, g2 = h2y / h1y;
    if (!rel_close(g1, g2, kRatioTol))
        throw std::invalid_argument(
            "GegConfig: inconsistent steps, h2y/h1y must equal h2x/h1x (both define gamma)");
    const bool tau_one = rel_close(tau1, 1.0, kRatioTol);
    const bool gamma_one = rel_close(g1, 1.0, kRatioTol);
    if (v == Variant::Eg && !(tau_one && gamma_one))
        throw std::invalid_argument("GegConfig: variant eg requires tau = 1 and gamma = 1");
    if (v == Variant::TauEg && !gamma_one)
        throw std::invalid_argument("GegConfig: variant tau-eg requires gamma = 1");
    if (v == Variant::EgPlus && !tau_one)
        throw std::invalid_argument("GegConfig: variant eg-plus requires tau = 1");
}

GegConfig GegConfig::from_steps(double h1x, double h1y, double h2x, double h2y, Variant v) {
    return GegConfig(h1x, h1y, h2x, h2y, v);
}

GegConfig GegConfig::from_rates(double eta, double tau, double gamma, Variant v) {
    if (!(eta > 0.0) || !(tau > 0.0) || !(gamma > 0.0))
        throw std::invalid_argument("GegConfig: eta, tau, gamma must be strictly positive");
    const double h1x = eta / tau;
    return GegConfig(h1x, eta, gamma * h1x, gamma * eta, v);
}

OperatorBundle::OperatorBundle(MinMaxProblem problem, GegConfig config)
    : problem_(std::move(problem)), config_(config) {
    if (problem_.n < 1 || problem_.m < 1)
        throw std::invalid_argument("OperatorBundle: problem needs n >= 1 and m >= 1");
    if (!problem_.eval) throw std::invalid_argument("OperatorBundle: problem has no eval");
}

Vec OperatorBundle::fd_gradient(std::span<const double> z) const {
    const int d = dim();
    Vec g(d), zz(z.begin(), z.end());
    for (int i = 0; i < d; ++i) {
        const double h = kFdStep * std::max(1.0, std::fabs(z[i]));
        const double zi = zz[i];
        zz[i] = zi + h;
        const double fp = problem_.eval(zz);
        zz[i] = zi - h;
        const double fm = problem_.eval(zz);
        zz[i] = zi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Vec OperatorBundle::field(std::span<const double> z) const {
    const int d = dim();
    Vec g(d);
    if (problem_.has_grad())
        problem_.grad(z, g);
    else
        g = fd_gradient(z);
    for (int i = problem_.n; i < d; ++i) g[i] = -g[i];
    return g;
}

Matrix OperatorBundle::raw_hessian(std::span<const double> z) const {
    const int d = dim();
    Matrix h(d, d);
    if (problem_.has_hess()) {
        problem_.hess(z, h);
        return h;
    }
    Vec zz(z.begin(), z.end());
    if (problem_.has_grad()) {
        Vec gp(d), gm(d);
        for (int j = 0; j < d; ++j) {
            const double s = kFdStep * std::max(1.0, std::fabs(z[j]));
            const double zj = zz[j];
            zz[j] = zj + s;
            problem_.grad(zz, gp);
            zz[j] = zj - s;
            problem_.grad(zz, gm);
            zz[j] = zj;
            for (int i = 0; i < d; ++i) h(i, j) = (gp[i] - gm[i]) / (2.0 * s);
        }
    } else {
        // second differences of eval; wider step balances the double
        // subtraction noise
        const double base = 1e-4;
        const double f0 = problem_.eval(zz);
        for (int i = 0; i < d; ++i) {
            const double hi = base * std::max(1.0, std::fabs(z[i]));
            const double zi = zz[i];
            zz[i] = zi + hi;
            const double fp = problem_.eval(zz);
            zz[i] = zi - hi;
            const double fm = problem_.eval(zz);
            zz[i] = zi;
            h(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
            for (int j = i + 1; j < d; ++j) {
                const double hj = base * std::max(1.0, std::fabs(z[j]));
                const double zj = zz[j];
                zz[i] = zi + hi;
                zz[j] = zj + hj;
                const double fpp = problem_.eval(zz);
                zz[j] = zj - hj;
                const double fpm = problem_.eval(zz);
                zz[i] = zi - hi;
                const double fmm = problem_.eval(zz);
                zz[j] = zj + hj;
                const double fmp = problem_.eval(zz);
                zz[i] = zi;
                zz[j] = zj;
                const double v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
                h(i, j) = v;
                h(j, i) = v;
            }
        }
    }
    // symmetrize: finite differences are not exactly symmetric
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double s = 0.5 * (h(i, j) + h(j, i));
            h(i, j) = s;
            h(j, i) = s;
        }
    return h;
}

Matrix OperatorBundle::hessian_h(std::span<const double> z) const {
    Matrix h = raw_hessian(z);
    for (int i = 0; i < problem_.n; ++i)
        for (int j = 0; j < dim(); ++j) h(i, j) = -h(i, j);
    return h;
}

Matrix OperatorBundle::lambda_h(std::span<const double> z) const {
    Matrix h = hessian_h(z);
    const double inv_tau = 1.0 / config_.tau();
    for (int i = 0; i < problem_.n; ++i)
        for (int j = 0; j < dim(); ++j) h(i, j) *= inv_tau;
    return h;
}

Vec OperatorBundle::lambda_diag() const {
    Vec d(dim(), 1.0);
    const double inv_tau = 1.0 / config_.tau();
    for (int i = 0; i < problem_.n; ++i) d[i] = inv_tau;
    return d;
}

Vec OperatorBundle::step_given_field(std::span<const double> z,
                                     std::span<const double> f) const {
    const int d = dim(), n = problem_.n;
    Vec out(d);
    if (config_.variant() == Variant::Gda) {
        for (int i = 0; i < d; ++i)
            out[i] = z[i] - (i < n ? config_.h1x() : config_.h1y()) * f[i];
        return out;
    }
    Vec zh(d);
    for (int i = 0; i < d; ++i)
        zh[i] = z[i] - (i < n ? config_.h1x() : config_.h1y()) * f[i];
    const Vec f2 = field(zh);
    for (int i = 0; i < d; ++i)
        out[i] = z[i] - (i < n ? config_.h2x() : config_.h2y()) * f2[i];
    return out;
}

Vec OperatorBundle::step(std::span<const double> z) const {
    return step_given_field(z, field(z));
}

Matrix OperatorBundle::jacobian(std::span<const double> z) const {
    const int d = dim(), n = problem_.n;
    const double eta = config_.eta();
    if (config_.variant() == Variant::Gda) {
        // I + eta * Lambda_tau * H(z)
        Matrix j = lambda_h(z);
        j *= eta;
        for (int i = 0; i < d; ++i) j(i, i) += 1.0;
        return j;
    }
    const Vec f = field(z);
    Vec zh(d);
    for (int i = 0; i < d; ++i)
        zh[i] = z[i] - (i < n ? config_.h1x() : config_.h1y()) * f[i];
    Matrix inner = lambda_h(z); // eta*Lambda*H(z)
    inner *= eta;
    for (int i = 0; i < d; ++i) inner(i, i) += 1.0;
    Matrix outer = lambda_h(zh); // gamma*eta*Lambda*H(z_hat)
    outer *= config_.gamma() * eta;
    Matrix j = outer * inner;
    for (int i = 0; i < d; ++i) j(i, i) += 1.0;
    return j;
}

double OperatorBundle::grad_norm(std::span<const double> z) const {
    return norm2(field(z));
}

OperatorBundle make_operators(MinMaxProblem problem, GegConfig config) {
    return OperatorBundle(std::move(problem), config);
}

Vec geg_step(const OperatorBundle& bundle, std::span<const double> z) {
    Vec out = bundle.step(z);
    for (double v : out)
        if (!std::isfinite(v)) throw DivergenceError(out);
    return out;
}

Matrix jacobian_at(const OperatorBundle& bundle, std::span<const double> z) {
    return bundle.jacobian(z);
}

} // namespace geg
