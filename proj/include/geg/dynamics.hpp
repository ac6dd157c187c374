#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "geg/calculus.hpp"

namespace geg {

struct IterationBudget {
    long max_iters = 1000000;
    double tol_grad = 1e-8;
    double blowup_radius = 1e8;
    long record_stride = 0;     // 0: record only the initial and final state
    bool store_iterates = false;
};

enum class VerdictKind { Converged, Diverged, MaxIters, CycleSuspected };

const char* to_string(VerdictKind v);

struct Trace {
    VerdictKind verdict = VerdictKind::MaxIters;
    Vec final_point;
    long iterations = 0;
    std::vector<long> recorded_iters;
    std::vector<double> grad_norms; // one per recorded iterate
    std::vector<Vec> iterates;      // filled only when store_iterates
};

/// Run z+ = w(z) from z0. Stops at the first of: five consecutive
/// gradient norms at or below tol_grad (Converged, returning that
/// iterate), a norm above blowup_radius or a non-finite state (Diverged),
/// or the iteration cap, where the final state is compared against the
/// previous 64 iterates at distance 1e-10 to tell CycleSuspected from
/// MaxIters.
Trace iterate(const OperatorBundle& bundle, std::span<const double> z0,
              const IterationBudget& budget);

/// Continuation state for resuming a trajectory mid-run (used by the
/// basin sweep to finish batch-kernel cells under identical semantics).
struct ResumeState {
    Vec z;
    long k = 0;
    int streak = 0;
};

Trace iterate_resume(const OperatorBundle& bundle, ResumeState state,
                     const IterationBudget& budget);

/// One trace per cross-validation fold over the instance's training
/// split; fold j trains on all rows outside chunk j (folds == 1 trains
/// on everything). Initial state: seeded theta0 and uniform weights.
std::vector<Trace> run_erm(const ErmInstance& instance, const GegConfig& config,
                           const IterationBudget& budget, int folds);

/// Columns: iter, grad_norm[, z0..zd-1 when points were stored].
void write_trace_csv(std::ostream& os, const Trace& trace);

} // namespace geg
