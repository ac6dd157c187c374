#pragma once

#include <iosfwd>
#include <span>

#include "geg/analysis.hpp"
#include "geg/dynamics.hpp"

namespace geg {

struct Box2 {
    double x0, x1, y0, y1;
};

/// Label codes for cells that did not converge.
inline constexpr int kLabelDiverged = -1;
inline constexpr int kLabelMaxIters = -2;
inline constexpr int kLabelCycle = -3;

struct BasinGrid {
    Box2 box{};
    int nx = 0, ny = 0;
    std::vector<int> labels;     // nx*ny, row-major by y then x
    std::vector<long> iterations;
    std::vector<Vec> equilibria; // legend: label i refers to equilibria[i]

    int cell_index(int ix, int iy) const { return iy * nx + ix; }
    double cell_x(int ix) const { return box.x0 + (ix + 0.5) * (box.x1 - box.x0) / nx; }
    double cell_y(int iy) const { return box.y0 + (iy + 0.5) * (box.y1 - box.y0) / ny; }
};

/// Run the iteration from every cell center of an nx-by-ny grid over the
/// box and label each cell by its limit equilibrium (snapped at distance
/// 1e-3, Newton-refined when new) or by its non-convergence verdict.
/// 2-D problems only. threads == 0 uses hardware concurrency; the result
/// is identical for any thread count.
BasinGrid sweep(const MinMaxProblem& problem, const GegConfig& config, const Box2& box,
                int nx, int ny, const IterationBudget& budget, int threads = 0);

/// Fraction of all cells whose label is an equilibrium classified
/// Unstable. Every legend equilibrium must have a matching report.
double unstable_mass(const BasinGrid& grid, std::span<const EquilibriumReport> reports);

/// Columns: x, y, label, iterations.
void write_basin_csv(std::ostream& os, const BasinGrid& grid);

} // namespace geg
