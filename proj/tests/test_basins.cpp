#include <doctest.h>

#include <sstream>

#include "geg/basins.hpp"
#include "support.hpp"

using namespace geg;

namespace {

bool avx2_available() {
    try {
        kernels::set_simd_mode(kernels::SimdMode::Avx2);
        kernels::set_simd_mode(kernels::SimdMode::Auto);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace

TEST_CASE("sweep: global contraction labels every cell with the saddle") {
    const GegConfig cfg = GegConfig::from_rates(0.9, 1.0, 0.1);
    const BasinGrid g = sweep(builtin("bilinear_xy"), cfg, {-1, 1, -1, 1}, 8, 6, {});
    REQUIRE(g.equilibria.size() == 1);
    CHECK(norm2(g.equilibria[0]) < 1e-6);
    CHECK(g.labels.size() == 48);
    for (int label : g.labels) CHECK(label == 0);

    const BasinGrid tiny = sweep(builtin("bilinear_xy"), cfg, {-1, 1, -1, 1}, 2, 2, {});
    CHECK(tiny.labels.size() == 4);
    for (int label : tiny.labels) CHECK(label == 0);
}

TEST_CASE("sweep: validation") {
    const GegConfig cfg = GegConfig::from_rates(0.9, 1.0, 0.1);
    CHECK_THROWS_AS(sweep(builtin("bilinear_xy"), cfg, {-1, 1, -1, 1}, 1, 8, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(sweep(builtin("bilinear_xy"), cfg, {1, -1, -1, 1}, 8, 8, {}),
                    std::invalid_argument);
    Matrix q = random_strict_saddle_hessian(2, 2, 0, false);
    CHECK_THROWS_AS(sweep(quadratic_problem(2, 2, q), cfg, {-1, 1, -1, 1}, 4, 4, {}),
                    std::invalid_argument);
}

TEST_CASE("sweep: determinism and backend equivalence") {
    const GegConfig cfg = GegConfig::from_rates(5e-3, 1.0, 0.5);
    IterationBudget budget;
    budget.max_iters = 300000;
    budget.tol_grad = 1e-7;
    const Box2 box{-1.5, 1.5, -1.5, 1.5};

    const BasinGrid a = sweep(builtin("multi_critical"), cfg, box, 12, 10, budget);
    const BasinGrid b = sweep(builtin("multi_critical"), cfg, box, 12, 10, budget);
    CHECK(a.labels == b.labels);
    CHECK(a.iterations == b.iterations);
    REQUIRE(a.equilibria.size() == b.equilibria.size());
    for (size_t e = 0; e < a.equilibria.size(); ++e)
        CHECK(a.equilibria[e] == b.equilibria[e]);

    if (avx2_available()) {
        kernels::set_simd_mode(kernels::SimdMode::Scalar);
        const BasinGrid s = sweep(builtin("multi_critical"), cfg, box, 12, 10, budget);
        kernels::set_simd_mode(kernels::SimdMode::Auto);
        CHECK(s.labels == a.labels);
        CHECK(s.iterations == a.iterations);
        for (size_t e = 0; e < s.equilibria.size(); ++e)
            CHECK(s.equilibria[e] == a.equilibria[e]);
    }
}

TEST_CASE("sweep: legend equilibria satisfy the residual bound") {
    const GegConfig cfg = GegConfig::from_rates(5e-3, 1.0, 0.5);
    IterationBudget budget;
    budget.max_iters = 300000;
    budget.tol_grad = 1e-7;
    const MinMaxProblem p = builtin("multi_critical");
    const BasinGrid g = sweep(p, cfg, {-1.5, 1.5, -1.5, 1.5}, 10, 8, budget);
    const OperatorBundle bundle(p, cfg);
    REQUIRE(!g.equilibria.empty());
    for (const auto& eq : g.equilibria) CHECK(bundle.grad_norm(eq) <= budget.tol_grad);
}

TEST_CASE("sweep: thread count does not change the result") {
    const GegConfig cfg = GegConfig::from_rates(5e-3, 1.0, 0.5);
    IterationBudget budget;
    budget.max_iters = 200000;
    budget.tol_grad = 1e-7;
    const MinMaxProblem p = builtin("multi_critical");
    const BasinGrid one = sweep(p, cfg, {-1.5, 1.5, -1.5, 1.5}, 11, 6, budget, 1);
    const BasinGrid three = sweep(p, cfg, {-1.5, 1.5, -1.5, 1.5}, 11, 6, budget, 3);
    CHECK(one.labels == three.labels);
    CHECK(one.iterations == three.iterations);
    REQUIRE(one.equilibria.size() == three.equilibria.size());
    for (size_t e = 0; e < one.equilibria.size(); ++e)
        CHECK(one.equilibria[e] == three.equilibria[e]);
}

TEST_CASE("sweep: batch path agrees with the scalar dynamics loop") {
    const GegConfig cfg = GegConfig::from_rates(5e-3, 1.0, 0.5);
    IterationBudget budget;
    budget.max_iters = 200000;
    budget.tol_grad = 1e-7;
    const MinMaxProblem p = builtin("multi_critical");
    const BasinGrid g = sweep(p, cfg, {-1.5, 1.5, -1.5, 1.5}, 9, 7, budget);
    const OperatorBundle bundle(p, cfg);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const int c = g.cell_index(ix, iy);
            const Trace tr = iterate(bundle, Vec{g.cell_x(ix), g.cell_y(iy)}, budget);
            CHECK(tr.iterations == g.iterations[c]);
            if (g.labels[c] >= 0) {
                REQUIRE(tr.verdict == VerdictKind::Converged);
                CHECK(dist2(tr.final_point, g.equilibria[g.labels[c]]) <= 1e-3);
            } else {
                CHECK(tr.verdict != VerdictKind::Converged);
            }
        }
}

TEST_CASE("unstable_mass: counting and errors") {
    BasinGrid g;
    g.box = {0, 1, 0, 1};
    g.nx = 10;
    g.ny = 10;
    g.equilibria = {{0.0, 0.0}, {1.0, 0.0}};
    g.labels.assign(100, 0);
    g.labels[3] = 1;
    g.iterations.assign(100, 1);

    const MinMaxProblem mc = builtin("multi_critical");
    const GegConfig cfg = GegConfig::from_rates(1e-6, 1.0, 0.5);
    std::vector<EquilibriumReport> reports;
    reports.push_back(report(mc, cfg, Vec{0.0, 0.0})); // stable
    reports.push_back(report(mc, cfg, Vec{1.0, 0.0})); // unstable
    CHECK(unstable_mass(g, reports) == doctest::Approx(0.01).epsilon(1e-12));

    std::vector<EquilibriumReport> missing = {reports[0]};
    CHECK_THROWS_AS(unstable_mass(g, missing), std::invalid_argument);

    BasinGrid empty = g;
    empty.labels.assign(100, kLabelDiverged);
    CHECK(unstable_mass(empty, reports) == 0.0);
}

TEST_CASE("basin CSV export shape") {
    const GegConfig cfg = GegConfig::from_rates(0.9, 1.0, 0.1);
    const BasinGrid g = sweep(builtin("bilinear_xy"), cfg, {-1, 1, -1, 1}, 3, 2, {});
    std::ostringstream os;
    write_basin_csv(os, g);
    const std::string s = os.str();
    CHECK(s.rfind("x,y,label,iterations\n", 0) == 0);
    size_t lines = 0;
    for (char c : s)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 6);
}
