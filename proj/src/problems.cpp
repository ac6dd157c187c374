#include "geg/problems.hpp"

#include <cmath>
#include <utility>

namespace geg {

namespace {

MinMaxProblem make_builtin(kernels::BuiltinTag tag, std::string name, bool quadratic,
                           std::optional<double> lipschitz) {
    MinMaxProblem p;
    p.n = 1;
    p.m = 1;
    p.name = std::move(name);
    p.quadratic = quadratic;
    p.lipschitz_hint = lipschitz;
    p.batch_tag = tag;
    p.eval = [tag](std::span<const double> z) { return kernels::value(tag, z[0], z[1]); };
    p.grad = [tag](std::span<const double> z, std::span<double> g) {
        kernels::gradient(tag, z[0], z[1], g[0], g[1]);
    };
    p.hess = [tag](std::span<const double> z, Matrix& h) {
        h = Matrix(2, 2);
        double hxx, hxy, hyy;
        kernels::hessian(tag, z[0], z[1], hxx, hxy, hyy);
        h(0, 0) = hxx;
        h(0, 1) = hxy;
        h(1, 0) = hxy;
        h(1, 1) = hyy;
    };
    return p;
}

} // namespace

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {"bilinear_xy", "multi_critical",
                                                   "quadratic_counterexample"};
    return names;
}

MinMaxProblem builtin(std::string_view name) {
    if (name == "bilinear_xy")
        return make_builtin(kernels::BuiltinTag::BilinearXY, "bilinear_xy", true, 1.0);
    if (name == "multi_critical")
        return make_builtin(kernels::BuiltinTag::MultiCritical, "multi_critical", false,
                            std::nullopt);
    if (name == "quadratic_counterexample")
        return make_builtin(kernels::BuiltinTag::QuadCounterexample,
                            "quadratic_counterexample", true, 1.25);
    std::string msg = "unknown builtin problem '" + std::string(name) + "'; expected one of";
    for (const auto& n : builtin_names()) msg += " " + n;
    throw std::invalid_argument(msg);
}

MinMaxProblem quadratic_problem(int n, int m, Matrix q, Vec b) {
    const int d = n + m;
    if (n < 1 || m < 1) throw std::invalid_argument("quadratic_problem: need n,m >= 1");
    if (!q.square() || q.rows() != d)
        throw std::invalid_argument("quadratic_problem: Hessian must be (n+m)x(n+m)");
    if (q.asymmetry() > 1e-10 * (1.0 + q.max_abs()))
        throw std::invalid_argument("quadratic_problem: Hessian must be symmetric");
    if (b.empty()) b.assign(d, 0.0);
    if (static_cast<int>(b.size()) != d)
        throw std::invalid_argument("quadratic_problem: linear term has wrong length");

    MinMaxProblem p;
    p.n = n;
    p.m = m;
    p.name = "quadratic";
    p.quadratic = true;
    p.eval = [q, b, d](std::span<const double> z) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            double row = 0.0;
            for (int j = 0; j < d; ++j) row += q(i, j) * z[j];
            s += z[i] * (0.5 * row + b[i]);
        }
        return s;
    };
    p.grad = [q, b, d](std::span<const double> z, std::span<double> g) {
        for (int i = 0; i < d; ++i) {
            double row = b[i];
            for (int j = 0; j < d; ++j) row += q(i, j) * z[j];
            g[i] = row;
        }
    };
    p.hess = [q](std::span<const double>, Matrix& h) { h = q; };
    return p;
}

} // namespace geg
