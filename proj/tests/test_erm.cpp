#include <doctest.h>

#include <sstream>

#include "geg/problems.hpp"
#include "support.hpp"

using namespace geg;

namespace {

ErmInstance tiny_instance(int rows = 12, int feats = 3, int hidden = 4, double alpha = 1.0,
                          uint64_t seed = 9) {
    std::vector<Vec> x;
    std::vector<int> y;
    synthetic_blobs(rows, feats, seed, x, y);
    return make_erm(std::move(x), std::move(y), hidden, alpha, seed);
}

} // namespace

TEST_CASE("load_erm: parameter counting") {
    // 10 rows, 2 features, hidden 1: theta = 3*1 + 2*1 = 5, m = 8 after the 80% split
    std::istringstream csv(
        "f1,f2,label\n"
        "0.1,0.2,0\n1.1,0.9,1\n0.3,0.1,0\n1.4,1.2,1\n0.2,0.4,0\n"
        "1.0,1.1,1\n0.0,0.3,0\n1.3,0.8,1\n0.2,0.2,0\n1.2,1.0,1\n");
    const ErmInstance inst = load_erm(csv, "label", 1, 1.0, 0);
    CHECK(inst.theta_count() == 5);
    CHECK(inst.weight_count() == 8);
    CHECK(inst.holdout_features.size() == 2);
    CHECK(inst.feature_dim == 2);
}

TEST_CASE("load_erm: full-scale parameter count matches the classifier layout") {
    std::vector<Vec> x;
    std::vector<int> y;
    synthetic_blobs(569, 30, 1, x, y);
    const ErmInstance inst = make_erm(std::move(x), std::move(y), 50, 1.0, 1);
    CHECK(inst.train_rows() == 455);
    CHECK(inst.theta_count() == 1601);
}

TEST_CASE("load_erm: ingestion errors") {
    {
        std::istringstream csv("a,b,label\n1,2,0\n");
        CHECK_THROWS_AS(load_erm(csv, "label", 2, 1.0, 0), CsvError); // < 10 rows
    }
    {
        std::istringstream csv("a,b,target\n1,2,0\n");
        CHECK_THROWS_AS(load_erm(csv, "label", 2, 1.0, 0), CsvError); // missing label column
    }
    {
        std::ostringstream data;
        data << "a,b,label\n";
        for (int i = 0; i < 12; ++i) data << (i % 2 ? "oops" : "1") << ",2," << i % 2 << "\n";
        std::istringstream csv(data.str());
        CHECK_THROWS_AS(load_erm(csv, "label", 2, 1.0, 0), CsvError); // non-numeric cell
    }
    {
        std::ostringstream data;
        data << "a,b,label\n";
        for (int i = 0; i < 12; ++i) data << "1,,\n";
        std::istringstream csv(data.str());
        CHECK_THROWS_AS(load_erm(csv, "label", 2, 1.0, 0), CsvError); // empty cells
    }
    {
        std::ostringstream data;
        data << "a,b,label\n";
        for (int i = 0; i < 12; ++i) data << "1,2," << (i == 5 ? 3 : 0) << "\n";
        std::istringstream csv(data.str());
        CHECK_THROWS_AS(load_erm(csv, "label", 2, 1.0, 0), CsvError); // label not 0/1
    }
    {
        std::istringstream csv("label\n0\n1\n0\n1\n0\n1\n0\n1\n0\n1\n");
        CHECK_THROWS_AS(load_erm(csv, "label", 2, 1.0, 0), CsvError); // no feature columns
    }
}

TEST_CASE("erm objective: hand value at the zero network") {
    // theta = 0 gives yhat = 1/2 for every sample; a one-row subset with
    // label 1 and p = 1 evaluates to -log(1/2) = log 2 (the uniform-weight
    // regularizer vanishes at m = 1)
    const ErmInstance inst = tiny_instance();
    int row_with_one = -1;
    for (int i = 0; i < inst.train_rows(); ++i)
        if (inst.labels[i] == 1) { row_with_one = i; break; }
    REQUIRE(row_with_one >= 0);
    const MinMaxProblem p = erm_objective_subset(inst, {row_with_one});
    Vec z(p.dim(), 0.0);
    z[p.n] = 1.0; // p_1 = 1
    CHECK(p.eval(z) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("erm objective: uniform weights kill the regularizer") {
    std::vector<Vec> x1, x2;
    std::vector<int> y1, y2;
    synthetic_blobs(16, 3, 4, x1, y1);
    x2 = x1;
    y2 = y1;
    const ErmInstance a = make_erm(std::move(x1), std::move(y1), 3, 1.0, 7);
    const ErmInstance b = make_erm(std::move(x2), std::move(y2), 3, 123.0, 7);
    const MinMaxProblem pa = erm_objective(a), pb = erm_objective(b);
    Vec z(pa.dim());
    Rng rng(2);
    for (int i = 0; i < pa.n; ++i) z[i] = 0.3 * rng.normal();
    const double pu = 1.0 / a.weight_count();
    for (int i = pa.n; i < pa.dim(); ++i) z[i] = pu;
    CHECK(pa.eval(z) == doctest::Approx(pb.eval(z)).epsilon(1e-13));
}

TEST_CASE("erm objective: reverse-mode gradient matches finite differences") {
    const ErmInstance inst = tiny_instance();
    const MinMaxProblem p = erm_objective(inst);
    Rng rng(77);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        Vec z(p.dim());
        for (int i = 0; i < p.n; ++i) z[i] = 0.4 * rng.normal();
        for (int i = p.n; i < p.dim(); ++i) z[i] = 1.0 / inst.weight_count() + 0.05 * rng.normal();
        Vec g(p.dim());
        p.grad(z, g);
        const Vec gfd = tst::fd_grad_oracle(p, z);
        for (int i = 0; i < p.dim(); ++i) worst = std::max(worst, tst::rel_err(g[i], gfd[i]));
    }
    CHECK(worst <= 1e-5);
}

TEST_CASE("erm objective: permutation invariance") {
    const ErmInstance inst = tiny_instance(14, 3, 3);
    std::vector<int> rows = {0, 1, 2, 3, 4, 5};
    std::vector<int> perm = {4, 0, 5, 2, 1, 3};
    const MinMaxProblem pa = erm_objective_subset(inst, rows);
    const MinMaxProblem pb = erm_objective_subset(inst, perm);
    Rng rng(8);
    Vec z(pa.dim());
    for (int i = 0; i < pa.n; ++i) z[i] = 0.3 * rng.normal();
    Vec pw = {0.1, 0.25, 0.05, 0.2, 0.3, 0.1};
    for (size_t i = 0; i < pw.size(); ++i) z[pa.n + i] = pw[i];
    Vec zperm = z;
    for (size_t i = 0; i < perm.size(); ++i) zperm[pa.n + i] = pw[perm[i]];
    CHECK(pa.eval(z) == doctest::Approx(pb.eval(zperm)).epsilon(1e-12));
}

TEST_CASE("erm instance: seeded initialization is reproducible") {
    const ErmInstance a = tiny_instance(12, 3, 4, 1.0, 42);
    const ErmInstance b = tiny_instance(12, 3, 4, 1.0, 42);
    const ErmInstance c = tiny_instance(12, 3, 4, 1.0, 43);
    CHECK(a.theta0 == b.theta0);
    CHECK(a.theta0 != c.theta0);
    CHECK(a.features == b.features);
}

TEST_CASE("erm objective: subset validation") {
    const ErmInstance inst = tiny_instance();
    CHECK_THROWS_AS(erm_objective_subset(inst, {}), std::invalid_argument);
    CHECK_THROWS_AS(erm_objective_subset(inst, {999}), std::invalid_argument);
    CHECK_THROWS_AS(make_erm({{1.0}, {2.0}}, {0, 1}, 1, 1.0, 0), CsvError);
}
