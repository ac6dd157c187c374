#include <doctest.h>

#include "geg/analysis.hpp"
#include "geg/problems.hpp"
#include "support.hpp"

using namespace geg;

namespace {

const Vec kTablePoints[8] = {{0, 0},           {0, 1},          {1, 0},
                             {-4.734, 0.560},  {1.017, -0.086}, {0.731, -5.399},
                             {-0.085, 1.006},  {38.402, -1.487}};

} // namespace

TEST_CASE("builtin catalogue") {
    CHECK(builtin("bilinear_xy").eval(Vec{1.0, 1.0}) == 1.0);
    CHECK(builtin("quadratic_counterexample").lipschitz_hint == 1.25);
    CHECK(builtin("multi_critical").eval(Vec{0.0, 0.0}) == 0.0);
    CHECK(builtin("bilinear_xy").quadratic);
    CHECK(!builtin("multi_critical").quadratic);
    CHECK_THROWS_AS(builtin("no_such_problem"), std::invalid_argument);
}

TEST_CASE("builtin analytic derivatives agree with finite differences") {
    Rng rng(321);
    for (const auto& name : builtin_names()) {
        const MinMaxProblem p = builtin(name);
        double worst_g = 0.0, worst_h = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const Vec z = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            Vec g(2);
            p.grad(z, g);
            const Vec gfd = tst::fd_grad_oracle(p, z);
            for (int i = 0; i < 2; ++i) worst_g = std::max(worst_g, tst::rel_err(g[i], gfd[i]));
            Matrix h;
            p.hess(z, h);
            CHECK(h.asymmetry() <= 1e-10);
            const Matrix hfd = tst::fd_hess_oracle(p, z);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    worst_h = std::max(worst_h, tst::rel_err(h(i, j), hfd(i, j)));
        }
        CHECK_MESSAGE(worst_g <= 1e-5, name, " gradient mismatch ", worst_g);
        CHECK_MESSAGE(worst_h <= 1e-4, name, " hessian mismatch ", worst_h);
    }
}

TEST_CASE("multi_critical: gradient vanishes at the eight catalogued points") {
    const MinMaxProblem p = builtin("multi_critical");
    for (const auto& target : kTablePoints) {
        Vec z = target;
        CHECK(refine_critical_point(p, z, 1e-9));
        CHECK(dist2(z, target) <= 1e-3);
        Vec g(2);
        p.grad(z, g);
        CHECK(norm2(g) <= 1e-6);
    }
}

TEST_CASE("quadratic problem factory") {
    Matrix q(2, 2);
    q(0, 0) = 2.0;
    q(1, 1) = -3.0;
    const MinMaxProblem p = quadratic_problem(1, 1, q);
    CHECK(p.eval(Vec{1.0, 1.0}) == doctest::Approx(-0.5).epsilon(1e-15));
    Vec g(2);
    p.grad(Vec{1.0, 2.0}, g);
    CHECK(g[0] == 2.0);
    CHECK(g[1] == -6.0);
    CHECK(p.quadratic);

    Matrix bad(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(quadratic_problem(1, 1, bad), std::invalid_argument);
    CHECK_THROWS_AS(quadratic_problem(0, 2, Matrix(2, 2)), std::invalid_argument);
}
