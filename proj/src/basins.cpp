#include "geg/basins.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "geg/kernels.hpp"

namespace geg {

namespace {

struct CellOutcome {
    VerdictKind verdict;
    double x, y;
    long iterations;
};

void fmt_double(std::ostream& os, double v) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

} // namespace

BasinGrid sweep(const MinMaxProblem& problem, const GegConfig& config, const Box2& box,
                int nx, int ny, const IterationBudget& budget, int threads) {
    if (problem.n != 1 || problem.m != 1)
        throw std::invalid_argument("sweep: basin sweeps are restricted to 2-D problems");
    if (nx < 2 || ny < 2) throw std::invalid_argument("sweep: resolution must be >= 2x2");
    if (!(box.x0 < box.x1) || !(box.y0 < box.y1))
        throw std::invalid_argument("sweep: degenerate box");

    BasinGrid grid;
    grid.box = box;
    grid.nx = nx;
    grid.ny = ny;
    const size_t cells = static_cast<size_t>(nx) * ny;
    grid.labels.assign(cells, kLabelMaxIters);
    grid.iterations.assign(cells, 0);

    std::vector<double> xs(cells), ys(cells);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            xs[grid.cell_index(ix, iy)] = grid.cell_x(ix);
            ys[grid.cell_index(ix, iy)] = grid.cell_y(iy);
        }

    OperatorBundle bundle(problem, config);
    std::vector<CellOutcome> outcomes(cells);

    int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;
    nthreads = static_cast<int>(std::min<size_t>(nthreads, cells));

    if (problem.batch_tag) {
        // Batch kernels run each cell up to 64 iterations short of the cap;
        // undecided cells finish through the scalar loop (identical
        // semantics, including the cycle window).
        const long cap = std::max<long>(0, budget.max_iters - 64);
        kernels::RunParams rp;
        rp.steps = {config.h1x(), config.h1y(), config.h2x(), config.h2y()};
        rp.algo = config.variant() == Variant::Gda ? kernels::Algo::Gda : kernels::Algo::Geg;
        rp.tol_grad = budget.tol_grad;
        rp.blowup_radius = budget.blowup_radius;
        rp.max_iters = cap;

        std::vector<kernels::CellResult> res(cells);
        auto run_slice = [&](size_t lo, size_t hi) {
            kernels::run_cells(*problem.batch_tag, rp, xs.data() + lo, ys.data() + lo,
                               res.data() + lo, hi - lo);
        };
        if (nthreads == 1) {
            run_slice(0, cells);
        } else {
            std::vector<std::thread> pool;
            const size_t chunk = (cells + nthreads - 1) / nthreads;
            for (int t = 0; t < nthreads; ++t) {
                const size_t lo = t * chunk, hi = std::min(cells, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back(run_slice, lo, hi);
            }
            for (auto& th : pool) th.join();
        }

        IterationBudget resume_budget = budget;
        resume_budget.record_stride = 0;
        resume_budget.store_iterates = false;
        for (size_t c = 0; c < cells; ++c) {
            const auto& r = res[c];
            if (r.status == 0) {
                outcomes[c] = {VerdictKind::Converged, r.x, r.y, r.iterations};
            } else if (r.status == 1) {
                outcomes[c] = {VerdictKind::Diverged, r.x, r.y, r.iterations};
            } else {
                Trace tr = iterate_resume(bundle, ResumeState{{r.x, r.y}, r.iterations, r.streak},
                                          resume_budget);
                outcomes[c] = {tr.verdict, tr.final_point[0], tr.final_point[1], tr.iterations};
            }
        }
    } else {
        auto run_slice = [&](size_t lo, size_t hi) {
            for (size_t c = lo; c < hi; ++c) {
                Trace tr = iterate(bundle, Vec{xs[c], ys[c]}, budget);
                outcomes[c] = {tr.verdict, tr.final_point[0], tr.final_point[1], tr.iterations};
            }
        };
        if (nthreads == 1) {
            run_slice(0, cells);
        } else {
            std::vector<std::thread> pool;
            const size_t chunk = (cells + nthreads - 1) / nthreads;
            for (int t = 0; t < nthreads; ++t) {
                const size_t lo = t * chunk, hi = std::min(cells, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back(run_slice, lo, hi);
            }
            for (auto& th : pool) th.join();
        }
    }

    // deterministic labeling in cell order
    const double snap = 1e-3;
    for (size_t c = 0; c < cells; ++c) {
        grid.iterations[c] = outcomes[c].iterations;
        switch (outcomes[c].verdict) {
            case VerdictKind::Diverged: grid.labels[c] = kLabelDiverged; continue;
            case VerdictKind::MaxIters: grid.labels[c] = kLabelMaxIters; continue;
            case VerdictKind::CycleSuspected: grid.labels[c] = kLabelCycle; continue;
            case VerdictKind::Converged: break;
        }
        Vec endpoint = {outcomes[c].x, outcomes[c].y};
        int label = -1;
        for (size_t e = 0; e < grid.equilibria.size(); ++e)
            if (dist2(grid.equilibria[e], endpoint) <= snap) {
                label = static_cast<int>(e);
                break;
            }
        if (label < 0) {
            Vec refined = endpoint;
            if (refine_critical_point(problem, refined,
                                      std::min(1e-9, budget.tol_grad)) &&
                dist2(refined, endpoint) <= snap)
                endpoint = refined;
            for (size_t e = 0; e < grid.equilibria.size(); ++e)
                if (dist2(grid.equilibria[e], endpoint) <= snap) {
                    label = static_cast<int>(e);
                    break;
                }
            if (label < 0) {
                grid.equilibria.push_back(endpoint);
                label = static_cast<int>(grid.equilibria.size()) - 1;
            }
        }
        grid.labels[c] = label;
    }
    return grid;
}

double unstable_mass(const BasinGrid& grid, std::span<const EquilibriumReport> reports) {
    std::vector<bool> unstable(grid.equilibria.size(), false);
    for (size_t e = 0; e < grid.equilibria.size(); ++e) {
        const EquilibriumReport* match = nullptr;
        for (const auto& rep : reports)
            if (rep.location.size() == grid.equilibria[e].size() &&
                dist2(rep.location, grid.equilibria[e]) <= 1e-3) {
                match = &rep;
                break;
            }
        if (!match)
            throw std::invalid_argument(
                "unstable_mass: no report covers legend equilibrium " + std::to_string(e));
        unstable[e] = match->stability.kind == Stability::Unstable;
    }
    size_t bad = 0;
    for (int label : grid.labels)
        if (label >= 0 && unstable[static_cast<size_t>(label)]) ++bad;
    return grid.labels.empty() ? 0.0
                               : static_cast<double>(bad) / static_cast<double>(grid.labels.size());
}

void write_basin_csv(std::ostream& os, const BasinGrid& grid) {
    os << "x,y,label,iterations\n";
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix) {
            const int c = grid.cell_index(ix, iy);
            fmt_double(os, grid.cell_x(ix));
            os << ",";
            fmt_double(os, grid.cell_y(iy));
            os << "," << grid.labels[c] << "," << grid.iterations[c] << "\n";
        }
}

} // namespace geg
