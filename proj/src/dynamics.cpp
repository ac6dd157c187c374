#include "geg/dynamics.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

namespace geg {

namespace {

constexpr int kConvergeStreak = 5;
constexpr int kCycleWindow = 64;
constexpr double kCycleTol = 1e-10;

void validate(const IterationBudget& b) {
    if (b.max_iters < 0) throw std::invalid_argument("IterationBudget: max_iters must be >= 0");
    if (!(b.tol_grad > 0.0)) throw std::invalid_argument("IterationBudget: tol_grad must be > 0");
    if (!(b.blowup_radius > 0.0))
        throw std::invalid_argument("IterationBudget: blowup_radius must be > 0");
}

bool any_nan(std::span<const double> z) {
    for (double v : z)
        if (v != v) return true;
    return false;
}

void fmt_double(std::ostream& os, double v) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

} // namespace

const char* to_string(VerdictKind v) {
    switch (v) {
        case VerdictKind::Converged: return "converged";
        case VerdictKind::Diverged: return "diverged";
        case VerdictKind::MaxIters: return "max_iters";
        default: return "cycle_suspected";
    }
}

Trace iterate_resume(const OperatorBundle& bundle, ResumeState state,
                     const IterationBudget& budget) {
    validate(budget);
    if (static_cast<int>(state.z.size()) != bundle.dim())
        throw std::invalid_argument("iterate: initial point has wrong dimension");

    const double tol2 = budget.tol_grad * budget.tol_grad;
    const double rad2 = budget.blowup_radius * budget.blowup_radius;
    const long tail_start = std::max<long>(0, budget.max_iters - kCycleWindow);

    Trace tr;
    Vec z = std::move(state.z);
    int streak = state.streak;
    std::vector<Vec> ring;
    ring.reserve(kCycleWindow);
    size_t ring_next = 0;

    auto record = [&](long k, double gnorm) {
        tr.recorded_iters.push_back(k);
        tr.grad_norms.push_back(gnorm);
        if (budget.store_iterates) tr.iterates.push_back(z);
    };

    for (long k = state.k;; ++k) {
        const Vec f = bundle.field(z);
        double gn2 = 0.0;
        for (double v : f) gn2 += v * v;

        const bool rec = (k == state.k) ||
                         (budget.record_stride > 0 && k % budget.record_stride == 0);
        if (rec) record(k, std::sqrt(gn2));

        if (gn2 <= tol2) {
            if (++streak >= kConvergeStreak) {
                tr.verdict = VerdictKind::Converged;
                tr.iterations = k;
                if (!rec) record(k, std::sqrt(gn2));
                break;
            }
        } else {
            streak = 0;
        }

        double r2 = 0.0;
        for (double v : z) r2 += v * v;
        if (any_nan(z) || r2 > rad2) {
            tr.verdict = VerdictKind::Diverged;
            tr.iterations = k;
            if (!rec) record(k, std::sqrt(gn2));
            break;
        }

        if (k >= budget.max_iters) {
            tr.verdict = VerdictKind::MaxIters;
            for (const Vec& prev : ring) {
                if (dist2(z, prev) <= kCycleTol) {
                    tr.verdict = VerdictKind::CycleSuspected;
                    break;
                }
            }
            tr.iterations = k;
            if (!rec) record(k, std::sqrt(gn2));
            break;
        }

        if (k >= tail_start) {
            if (ring.size() < kCycleWindow) {
                ring.push_back(z);
            } else {
                ring[ring_next] = z;
                ring_next = (ring_next + 1) % kCycleWindow;
            }
        }

        z = bundle.step_given_field(z, f);
    }

    tr.final_point = std::move(z);
    return tr;
}

Trace iterate(const OperatorBundle& bundle, std::span<const double> z0,
              const IterationBudget& budget) {
    return iterate_resume(bundle, ResumeState{Vec(z0.begin(), z0.end()), 0, 0}, budget);
}

std::vector<Trace> run_erm(const ErmInstance& instance, const GegConfig& config,
                           const IterationBudget& budget, int folds) {
    const int rows = instance.train_rows();
    if (folds < 1) throw std::invalid_argument("run_erm: folds must be >= 1");
    if (folds > rows) throw std::invalid_argument("run_erm: more folds than data rows");

    std::vector<Trace> out;
    for (int fold = 0; fold < folds; ++fold) {
        std::vector<int> idx;
        if (folds == 1) {
            idx.resize(rows);
            std::iota(idx.begin(), idx.end(), 0);
        } else {
            // fold f holds out the f-th contiguous chunk of the (already
            // seeded-shuffled) training rows
            const long lo = static_cast<long>(fold) * rows / folds;
            const long hi = static_cast<long>(fold + 1) * rows / folds;
            for (int i = 0; i < rows; ++i)
                if (i < lo || i >= hi) idx.push_back(i);
        }
        MinMaxProblem p = erm_objective_subset(instance, idx);
        OperatorBundle bundle(std::move(p), config);
        Vec z0(instance.theta_count() + idx.size());
        std::copy(instance.theta0.begin(), instance.theta0.end(), z0.begin());
        const double pu = 1.0 / static_cast<double>(idx.size());
        std::fill(z0.begin() + instance.theta_count(), z0.end(), pu);
        out.push_back(iterate(bundle, z0, budget));
    }
    return out;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
    os << "iter,grad_norm";
    const bool pts = !trace.iterates.empty();
    if (pts)
        for (size_t j = 0; j < trace.iterates.front().size(); ++j) os << ",z" << j;
    os << "\n";
    for (size_t i = 0; i < trace.recorded_iters.size(); ++i) {
        os << trace.recorded_iters[i] << ",";
        fmt_double(os, trace.grad_norms[i]);
        if (pts && i < trace.iterates.size())
            for (double v : trace.iterates[i]) {
                os << ",";
                fmt_double(os, v);
            }
        os << "\n";
    }
}

} // namespace geg
