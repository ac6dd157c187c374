#include "geg/linalg.hpp"

#include <cmath>
#include <cstdint>

namespace geg {

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("Matrix multiply: shape mismatch");
    Matrix out(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int k = 0; k < cols_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < rhs.cols_; ++j) out(i, j) += aik * rhs(k, j);
        }
    }
    return out;
}

Vec Matrix::operator*(std::span<const double> v) const {
    if (static_cast<size_t>(cols_) != v.size())
        throw std::invalid_argument("Matrix-vector multiply: shape mismatch");
    Vec out(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::invalid_argument("Matrix add: shape mismatch");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::invalid_argument("Matrix subtract: shape mismatch");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

double Matrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::fabs(v));
    return m;
}

double Matrix::asymmetry() const {
    double m = 0.0;
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j)
            m = std::max(m, std::fabs((*this)(i, j) - (*this)(j, i)));
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

namespace {

// LU with partial pivoting, in place; returns permutation sign, records
// pivot rows in perm. Throws on structural singularity.
double lu_factor(Matrix& a, std::vector<int>& perm) {
    const int n = a.rows();
    perm.resize(n);
    double sign = 1.0;
    const double scale = a.max_abs();
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::fabs(a(i, k));
            if (v > best) { best = v; piv = i; }
        }
        perm[k] = piv;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            sign = -sign;
        }
        if (best <= 1e-300 * std::max(1.0, scale))
            throw SingularMatrixError("lu_factor: singular matrix");
        const double inv = 1.0 / a(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double m = a(i, k) * inv;
            a(i, k) = m;
            for (int j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
        }
    }
    return sign;
}

} // namespace

Vec lu_solve(Matrix a, Vec b) {
    if (!a.square() || static_cast<size_t>(a.rows()) != b.size())
        throw std::invalid_argument("lu_solve: shape mismatch");
    const int n = a.rows();
    std::vector<int> perm;
    lu_factor(a, perm);
    for (int k = 0; k < n; ++k)
        if (perm[k] != k) std::swap(b[k], b[perm[k]]);
    for (int i = 1; i < n; ++i) {
        double s = b[i];
        for (int j = 0; j < i; ++j) s -= a(i, j) * b[j];
        b[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * b[j];
        b[i] = s / a(i, i);
    }
    return b;
}

double lu_det(Matrix a) {
    if (!a.square()) throw std::invalid_argument("lu_det: non-square matrix");
    std::vector<int> perm;
    double det;
    try {
        det = lu_factor(a, perm);
    } catch (const SingularMatrixError&) {
        return 0.0;
    }
    for (int i = 0; i < a.rows(); ++i) det *= a(i, i);
    return det;
}

double norm2_sq(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double norm2(std::span<const double> v) { return std::sqrt(norm2_sq(v)); }

double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

} // namespace geg
