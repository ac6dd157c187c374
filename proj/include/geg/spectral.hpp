#pragma once

#include <complex>
#include <string>
#include <vector>

#include "geg/linalg.hpp"

namespace geg {

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EigenConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Spectrum {
    std::vector<std::complex<double>> eigenvalues; // sorted by (re, im)
    double spectral_radius = 0.0;
    const char* method = "";
};

/// All eigenvalues of a real square matrix, dimension 1..500.
/// d <= 2 uses the closed-form quadratic; larger matrices go through
/// balancing, Hessenberg reduction and implicitly shifted double QR.
Spectrum eigenvalues(const Matrix& a);

enum class Stability { AsymptoticallyStable, Unstable, Inconclusive };

struct StabilityClass {
    Stability kind = Stability::Inconclusive;
    double margin = 0.0; // |rho - 1|
};

/// Spectral-radius classification of a fixed point, with a dead zone of
/// width tol_unit around the unit circle where no claim is made.
StabilityClass classify(const Spectrum& s, double tol_unit = 1e-9);

const char* to_string(Stability s);

/// Definiteness of a symmetric matrix. The zero matrix legitimately
/// reports both semidefinite flags at once.
struct DefinitenessVerdict {
    bool pos_def = false;
    bool pos_semidef = false;
    bool neg_def = false;
    bool neg_semidef = false;
    bool indefinite() const { return !pos_semidef && !neg_semidef; }
};

/// Verdict via eigenvalues of the symmetrized matrix with zero threshold
/// 1e-9*(1+||m||_F). Throws std::invalid_argument when the input is not
/// symmetric to 1e-10*(1+max|a_ij|).
DefinitenessVerdict symmetric_definiteness(const Matrix& m);

std::string to_string(const DefinitenessVerdict& v);

/// Greedy nearest-pair matching between two complex multisets; returns the
/// largest matched distance (infinity on size mismatch).
double multiset_distance(std::vector<std::complex<double>> a,
                         std::vector<std::complex<double>> b);

} // namespace geg
