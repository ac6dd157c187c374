#include <doctest.h>

#include <sstream>

#include "geg/dynamics.hpp"
#include "geg/spectral.hpp"
#include "support.hpp"

using namespace geg;

TEST_CASE("iterate: contraction to the bilinear saddle") {
    const OperatorBundle b(builtin("bilinear_xy"), GegConfig::from_rates(0.9, 1.0, 0.1));
    const Trace tr = iterate(b, Vec{1.0, 1.0}, {});
    CHECK(tr.verdict == VerdictKind::Converged);
    CHECK(norm2(tr.final_point) < 1e-7);
    CHECK(tr.grad_norms.back() <= 1e-8 * (1 + 1e-12));
}

TEST_CASE("iterate: exact critical point converges within five checks") {
    const OperatorBundle b(builtin("bilinear_xy"), GegConfig::from_rates(0.9, 1.0, 0.1));
    const Trace tr = iterate(b, Vec{0.0, 0.0}, {});
    CHECK(tr.verdict == VerdictKind::Converged);
    CHECK(tr.iterations <= 5);
    CHECK(tr.final_point == Vec{0.0, 0.0});
}

TEST_CASE("iterate: GDA never converges on the bilinear saddle") {
    for (double eta : {0.9, 0.3}) {
        for (double tau : {1.0, 2.0}) {
            const OperatorBundle b(builtin("bilinear_xy"),
                                   GegConfig::from_rates(eta, tau, 1.0, Variant::Gda));
            IterationBudget budget;
            budget.max_iters = 20000;
            const Trace tr = iterate(b, Vec{1.0, 1.0}, budget);
            CHECK(tr.verdict != VerdictKind::Converged);
        }
    }
}

TEST_CASE("iterate: determinism") {
    const OperatorBundle b(builtin("multi_critical"), GegConfig::from_rates(1e-3, 1.0, 0.5));
    IterationBudget budget;
    budget.max_iters = 5000;
    budget.record_stride = 7;
    const Trace a = iterate(b, Vec{0.2, 0.3}, budget);
    const Trace c = iterate(b, Vec{0.2, 0.3}, budget);
    CHECK(a.verdict == c.verdict);
    CHECK(a.iterations == c.iterations);
    CHECK(a.final_point == c.final_point);
    CHECK(a.grad_norms == c.grad_norms);
}

TEST_CASE("iterate: zero-iteration budget records the initial gradient") {
    const OperatorBundle b(builtin("bilinear_xy"), GegConfig::from_rates(0.9, 1.0, 0.1));
    IterationBudget budget;
    budget.max_iters = 0;
    const Trace tr = iterate(b, Vec{1.0, 1.0}, budget);
    CHECK(tr.verdict == VerdictKind::MaxIters);
    CHECK(tr.iterations == 0);
    REQUIRE(tr.grad_norms.size() == 1);
    CHECK(tr.grad_norms[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("iterate: empirical rate matches the spectral radius") {
    const GegConfig cfg = GegConfig::from_rates(0.9, 1.0, 0.1);
    const OperatorBundle b(builtin("bilinear_xy"), cfg);
    const double rho = eigenvalues(b.jacobian(Vec{0.0, 0.0})).spectral_radius;

    IterationBudget budget;
    budget.max_iters = 300;
    budget.tol_grad = 1e-300;
    budget.record_stride = 1;
    budget.store_iterates = true;
    const Trace tr = iterate(b, Vec{1.0, 1.0}, budget);
    REQUIRE(tr.iterates.size() >= 301);
    const Vec& zk = tr.iterates[300];
    const Vec& z50 = tr.iterates[250];
    const double rate = std::pow(norm2(zk) / norm2(z50), 1.0 / 50.0);
    CHECK(std::fabs(rate - rho) < 0.05);
}

TEST_CASE("iterate: expanding affine maps never report convergence") {
    // rho(J) > 1 for GDA on the bilinear problem at any step size
    const OperatorBundle b(builtin("bilinear_xy"),
                           GegConfig::from_rates(0.2, 1.0, 1.0, Variant::Gda));
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        Vec z0 = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
        if (norm2(z0) < 1e-3) z0[0] += 0.5;
        IterationBudget budget;
        budget.max_iters = 5000;
        const Trace tr = iterate(b, z0, budget);
        CHECK(tr.verdict != VerdictKind::Converged);
    }
}

TEST_CASE("iterate: period-two orbit flagged as cycle") {
    // f = 0.5x^2 - 0.5y^2 under plain descent-ascent with eta = 2 maps z to -z
    Matrix q(2, 2);
    q(0, 0) = 1.0;
    q(1, 1) = -1.0;
    const OperatorBundle b(quadratic_problem(1, 1, q),
                           GegConfig::from_rates(2.0, 1.0, 1.0, Variant::Gda));
    IterationBudget budget;
    budget.max_iters = 100;
    const Trace tr = iterate(b, Vec{1.0, 0.5}, budget);
    CHECK(tr.verdict == VerdictKind::CycleSuspected);
}

TEST_CASE("iterate: blow-up is reported as divergence") {
    const OperatorBundle b(builtin("bilinear_xy"),
                           GegConfig::from_rates(0.9, 1.0, 1.0, Variant::Gda));
    IterationBudget budget;
    budget.max_iters = 100000;
    budget.blowup_radius = 1e6;
    const Trace tr = iterate(b, Vec{1.0, 1.0}, budget);
    CHECK(tr.verdict == VerdictKind::Diverged);
}

TEST_CASE("trace CSV shape") {
    const OperatorBundle b(builtin("bilinear_xy"), GegConfig::from_rates(0.9, 1.0, 0.1));
    IterationBudget budget;
    budget.max_iters = 50;
    budget.tol_grad = 1e-300;
    budget.record_stride = 10;
    budget.store_iterates = true;
    const Trace tr = iterate(b, Vec{1.0, 1.0}, budget);
    CHECK(tr.recorded_iters.size() == tr.grad_norms.size());
    CHECK(tr.recorded_iters.size() == tr.iterates.size());
    std::ostringstream os;
    write_trace_csv(os, tr);
    CHECK(os.str().rfind("iter,grad_norm,z0,z1\n", 0) == 0);
}

TEST_CASE("run_erm: fold semantics and empty budgets") {
    std::vector<Vec> x;
    std::vector<int> y;
    synthetic_blobs(20, 3, 11, x, y);
    const ErmInstance inst = make_erm(std::move(x), std::move(y), 2, 1.0, 5);
    const GegConfig cfg = GegConfig::from_rates(0.01, 2.0, 0.8);

    IterationBudget zero;
    zero.max_iters = 0;
    const auto z = run_erm(inst, cfg, zero, 1);
    REQUIRE(z.size() == 1);
    CHECK(z[0].verdict == VerdictKind::MaxIters);
    CHECK(z[0].grad_norms.size() == 1);

    IterationBudget small;
    small.max_iters = 200;
    small.tol_grad = 1e-12;
    small.record_stride = 1;
    const auto folds = run_erm(inst, cfg, small, 4);
    REQUIRE(folds.size() == 4);
    for (const auto& tr : folds) CHECK(tr.grad_norms.back() < tr.grad_norms.front());

    CHECK_THROWS_AS(run_erm(inst, cfg, small, 0), std::invalid_argument);
    CHECK_THROWS_AS(run_erm(inst, cfg, small, 1000), std::invalid_argument);
}
