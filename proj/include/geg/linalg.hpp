#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace geg {

using Vec = std::vector<double>;

/// Dense row-major real matrix. Small sizes only; everything in this
/// project is at most a few hundred on a side.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    Matrix transposed() const;
    Matrix operator*(const Matrix& rhs) const;
    Vec operator*(std::span<const double> v) const;
    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s);

    double trace() const;
    double frobenius_norm() const;
    double max_abs() const;
    /// max over i,j of |a_ij - a_ji|
    double asymmetry() const;
    bool all_finite() const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Solve A x = b by LU with partial pivoting. Throws SingularMatrixError
/// when a pivot underflows the scale of the matrix.
Vec lu_solve(Matrix a, Vec b);

/// Determinant via the same LU factorization.
double lu_det(Matrix a);

double norm2(std::span<const double> v);
double norm2_sq(std::span<const double> v);
double dist2(std::span<const double> a, std::span<const double> b);

/// Deterministic xorshift-free uniform/normal draws on top of a 64-bit
/// generator state (splitmix64). std:: distributions are implementation
/// defined, which would break cross-build reproducibility of seeds.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// standard normal via Box-Muller (always consumes two uniforms)
    double normal();

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace geg
