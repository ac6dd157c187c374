#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geg/kernels.hpp"
#include "geg/linalg.hpp"

namespace geg {

/// A smooth objective f over (x in R^n, y in R^m), minimized over the x
/// block and maximized over the y block. Immutable after construction;
/// safe to evaluate from any number of workers.
struct MinMaxProblem {
    int n = 1;
    int m = 1;
    std::function<double(std::span<const double>)> eval;
    /// analytic gradient, writes n+m entries; empty -> finite differences
    std::function<void(std::span<const double>, std::span<double>)> grad;
    /// analytic Hessian; empty -> finite differences
    std::function<void(std::span<const double>, Matrix&)> hess;
    std::optional<double> lipschitz_hint;
    std::string name;
    bool quadratic = false; // constant Hessian, affine gradient
    std::optional<kernels::BuiltinTag> batch_tag;

    int dim() const { return n + m; }
    bool has_grad() const { return static_cast<bool>(grad); }
    bool has_hess() const { return static_cast<bool>(hess); }
};

/// Named benchmark problems: bilinear_xy, multi_critical,
/// quadratic_counterexample. Throws std::invalid_argument on unknown names.
MinMaxProblem builtin(std::string_view name);

const std::vector<std::string>& builtin_names();

/// Quadratic min-max objective f(z) = 0.5 z^T Q z + b^T z with symmetric Q.
MinMaxProblem quadratic_problem(int n, int m, Matrix q, Vec b = {});

// ---------------------------------------------------------------------------
// Robust empirical-risk problem: a 1-hidden-layer LeakyReLU classifier whose
// per-sample losses are adversarially reweighted by p, regularized toward
// uniform weights.

struct ErmInstance {
    std::vector<Vec> features; // standardized, training split
    std::vector<int> labels;
    std::vector<Vec> holdout_features; // recorded 20% split
    std::vector<int> holdout_labels;
    int feature_dim = 0;
    int hidden_width = 50;
    double alpha = 1.0;
    uint64_t seed = 0;
    Vec theta0; // seeded initial network parameters

    int train_rows() const { return static_cast<int>(features.size()); }
    /// network parameter count: hidden*(features+1) + hidden + 1
    int theta_count() const { return hidden_width * (feature_dim + 1) + hidden_width + 1; }
    /// adversarial weight count (one per training row)
    int weight_count() const { return train_rows(); }
};

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parse a CSV with header, standardize features column-wise, record a
/// seeded 80/20 split, and initialize network weights from the seed.
ErmInstance load_erm(std::istream& csv, const std::string& label_column,
                     int hidden_width, double alpha, uint64_t seed);

/// Same, from pre-parsed rows (used by the synthetic generator).
ErmInstance make_erm(std::vector<Vec> features, std::vector<int> labels,
                     int hidden_width, double alpha, uint64_t seed);

/// Two Gaussian blobs with unit covariance and opposite means; labels
/// alternate by row.
void synthetic_blobs(int rows, int feature_dim, uint64_t seed,
                     std::vector<Vec>& features, std::vector<int>& labels);

/// The weighted negative cross-entropy minus alpha*sum((p_i - 1/m)^2),
/// min over theta, max over p, with hand-written reverse-mode gradients.
MinMaxProblem erm_objective(const ErmInstance& instance);

/// Restriction of the objective to a subset of training rows (cross
/// validation folds). Indices must be valid training rows.
MinMaxProblem erm_objective_subset(const ErmInstance& instance,
                                   std::vector<int> rows);

} // namespace geg
