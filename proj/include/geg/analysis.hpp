#pragma once

#include <span>
#include <string>
#include <vector>

#include "geg/calculus.hpp"
#include "geg/spectral.hpp"

namespace geg {

struct Box {
    Vec lo, hi;
};

enum class SaddleKind { StrictSaddle, CandidateSaddle, NotSaddle };

const char* to_string(SaddleKind k);

struct SaddleVerdict {
    SaddleKind kind = SaddleKind::CandidateSaddle;
    /// set when the direct neighborhood inequality check ran
    bool sampling_checked = false;
    bool sampling_confirmed = false;
};

struct EquilibriumReport {
    Vec location;
    double residual = 0.0;
    Matrix jacobian;
    Spectrum j_spectrum;
    Spectrum lh_spectrum; // Lambda_tau * H at the point
    StabilityClass stability;
    SaddleVerdict saddle;
    bool hessian_invertible = false;
    double hessian_condition = 0.0;
};

struct ParamCertificate {
    double eta = 0, tau = 0, gamma = 0, c = 0, lipschitz = 0;
    bool p1_member = false;
    bool p2_member = false;
    bool diffeo_ok = false;
    bool real_spectrum_ok = false;    // real-spectrum step-size gate, gamma in (0,8)
    bool general_ok = false; // general gate, gamma in (0,1]
};

/// Damped-Newton refinement of grad f = 0 from Latin-hypercube starts in
/// the box (plus, in 2-D, deterministic coarse-grid residual minima).
/// Solutions are deduplicated at distance 1e-4, kept only when the final
/// residual is at or below 1e-9, and returned sorted.
std::vector<Vec> find_critical_points(const MinMaxProblem& problem, const Box& box,
                                      int starts, uint64_t seed);

/// Newton-polish a single near-critical point; returns true on residual
/// <= tol and overwrites z.
bool refine_critical_point(const MinMaxProblem& problem, Vec& z, double tol = 1e-9);

/// Full equilibrium report: both spectra, spectral-radius stability, the
/// saddle verdict, and the Hessian invertibility flag. Throws when the
/// residual exceeds tol_crit.
EquilibriumReport report(const MinMaxProblem& problem, const GegConfig& config,
                         std::span<const double> z_star, double tol_crit = 1e-6);

/// Greedy multiset distance between sigma(J(z*)) and the image of
/// sigma(Lambda_tau H(z*)) under kappa -> 1 + gamma(eta*kappa + eta^2 kappa^2).
double eigenvalue_map_mismatch(const MinMaxProblem& problem, const GegConfig& config,
                    std::span<const double> z_star);

ParamCertificate certify_params(double eta, double tau, double gamma, double c,
                                double lipschitz);

struct AppendixRegionResult {
    double max_modulus = 0.0;
    double min_ratio = 0.0;
};

/// Dense-grid verification of the two region claims behind the
/// gamma-in-(0,1] step-size rule: the mapped-eigenvalue modulus stays at
/// or below 1 on the admissible (a,b) set, and the boundary-crossing
/// gamma stays above 1.
AppendixRegionResult verify_appendix_regions(int grid_density, double gamma_probe);

/// Random quadratics with grad_xx >= 0 and grad_yy <= 0 blocks and random
/// tau in [0.1, 10]; returns the largest real part seen across all
/// eigenvalues of Lambda_tau H.
double saddle_spectrum_suite(int seeds);

/// Random strict-saddle quadratic Hessian: A-block positive definite,
/// C-block negative definite, coupling B optional.
Matrix random_strict_saddle_hessian(int n, int m, uint64_t seed, bool zero_coupling);

/// Local gradient-Lipschitz estimate: the largest Hessian spectral norm
/// over a deterministic sample of the box. No global validity is claimed.
double sampled_lipschitz(const MinMaxProblem& problem, const Box& box, int samples = 512);

} // namespace geg
