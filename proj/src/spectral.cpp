#include "geg/spectral.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

namespace geg {

namespace {

inline double sign_with(double magnitude, double sign_of) {
    return sign_of >= 0.0 ? std::fabs(magnitude) : -std::fabs(magnitude);
}

// EISPACK-style balancing: similarity scaling by powers of 2, exact in
// floating point, reduces the norm spread before the QR sweeps.
void balance(Matrix& a) {
    const int n = a.rows();
    const double radix = 2.0, sq = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (int i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::fabs(a(j, i));
                r += std::fabs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0, s = c + r;
            while (c < g) { f *= radix; c *= sq; }
            g = r * radix;
            while (c > g) { f /= radix; c /= sq; }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                const double ginv = 1.0 / f;
                for (int j = 0; j < n; ++j) a(i, j) *= ginv;
                for (int j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transformations (elmhes). Only eigenvalues are needed, so the
// multipliers are discarded afterwards.
void hessenberg(Matrix& a) {
    const int n = a.rows();
    for (int m = 1; m < n - 1; ++m) {
        double x = 0.0;
        int piv = m;
        for (int j = m; j < n; ++j) {
            if (std::fabs(a(j, m - 1)) > std::fabs(x)) {
                x = a(j, m - 1);
                piv = j;
            }
        }
        if (piv != m) {
            for (int j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
            for (int j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
        }
        if (x != 0.0) {
            for (int i = m + 1; i < n; ++i) {
                double y = a(i, m - 1);
                if (y != 0.0) {
                    y /= x;
                    a(i, m - 1) = y;
                    for (int j = m; j < n; ++j) a(i, j) -= y * a(m, j);
                    for (int j = 0; j < n; ++j) a(j, m) += y * a(j, i);
                }
            }
        }
    }
    for (int i = 2; i < n; ++i)
        for (int j = 0; j < i - 1; ++j) a(i, j) = 0.0;
}

// Francis double-shift QR on an upper Hessenberg matrix (hqr). Eigenvalues
// only. Throws after the sweep budget is exhausted.
void hqr(Matrix& a, std::vector<std::complex<double>>& out, int max_total_sweeps) {
    const int n = a.rows();
    const double eps = DBL_EPSILON;
    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::fabs(a(i, j));

    int nn = n - 1;
    double t = 0.0;
    int total_sweeps = 0;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::fabs(a(l - 1, l - 1)) + std::fabs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::fabs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {
                out.emplace_back(x + t, 0.0);
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::fabs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_with(z, p);
                        out.emplace_back(x + z, 0.0);
                        out.emplace_back(z != 0.0 ? x - w / z : x + z, 0.0);
                    } else {
                        out.emplace_back(x + p, z);
                        out.emplace_back(x + p, -z);
                    }
                    nn -= 2;
                } else {
                    if (++total_sweeps > max_total_sweeps)
                        throw EigenConvergenceError(
                            "eigenvalues: QR did not converge within " +
                            std::to_string(max_total_sweeps) + " sweeps on a " +
                            std::to_string(n) + "x" + std::to_string(n) + " matrix");
                    if (its == 10 || its == 20) {
                        // exceptional shift
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        double s = std::fabs(a(nn, nn - 1)) + std::fabs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        double rr = x - z;
                        double ss = y - z;
                        p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - rr - ss;
                        r = a(m + 2, m + 1);
                        double s = std::fabs(p) + std::fabs(q) + std::fabs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::fabs(a(m, m - 1)) * (std::fabs(q) + std::fabs(r));
                        const double v = std::fabs(p) * (std::fabs(a(m - 1, m - 1)) +
                                                         std::fabs(z) +
                                                         std::fabs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i > m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
                            x = std::fabs(p) + std::fabs(q) + std::fabs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        double s = sign_with(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        double yy = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {
                            double pp = a(k, j) + q * a(k + 1, j);
                            if (k != nn - 1) pp += r * a(k + 2, j);
                            a(k, j) -= pp * x;
                            a(k + 1, j) -= pp * yy;
                            if (k != nn - 1) a(k + 2, j) -= pp * z;
                        }
                        const int mmin = std::min(nn, k + 3);
                        for (int i = l; i <= mmin; ++i) {
                            double pp = x * a(i, k) + yy * a(i, k + 1);
                            if (k != nn - 1) pp += z * a(i, k + 2);
                            a(i, k) -= pp;
                            a(i, k + 1) -= pp * q;
                            if (k != nn - 1) a(i, k + 2) -= pp * r;
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
}

void eig2x2(double a, double b, double c, double d,
            std::vector<std::complex<double>>& out) {
    const double tr = a + d;
    const double det = a * d - b * c;
    const double mean = 0.5 * tr;
    const double disc = mean * mean - det;
    if (disc >= 0.0) {
        const double rt = std::sqrt(disc);
        const double l1 = mean + sign_with(rt, mean);
        if (l1 == 0.0) {
            out.emplace_back(0.0, 0.0);
            out.emplace_back(0.0, 0.0);
        } else {
            out.emplace_back(l1, 0.0);
            out.emplace_back(det / l1, 0.0);
        }
    } else {
        const double im = std::sqrt(-disc);
        out.emplace_back(mean, im);
        out.emplace_back(mean, -im);
    }
}

bool complex_less(const std::complex<double>& a, const std::complex<double>& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

} // namespace

Spectrum eigenvalues(const Matrix& a) {
    if (!a.square() || a.rows() < 1)
        throw std::invalid_argument("eigenvalues: need a square matrix of dimension >= 1");
    const int n = a.rows();
    if (n > 500)
        throw CapacityError("eigenvalues: dimension " + std::to_string(n) +
                            " exceeds the 500x500 dense solver capacity");
    if (!a.all_finite())
        throw std::invalid_argument("eigenvalues: matrix has non-finite entries");

    Spectrum s;
    s.eigenvalues.reserve(n);
    if (n == 1) {
        s.eigenvalues.emplace_back(a(0, 0), 0.0);
        s.method = "closed-form";
    } else if (n == 2) {
        eig2x2(a(0, 0), a(0, 1), a(1, 0), a(1, 1), s.eigenvalues);
        s.method = "closed-form";
    } else {
        Matrix work = a;
        balance(work);
        hessenberg(work);
        hqr(work, s.eigenvalues, 30 * n + 30);
        s.method = "hessenberg-qr";
    }
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), complex_less);
    for (const auto& ev : s.eigenvalues) s.spectral_radius = std::max(s.spectral_radius, std::abs(ev));
    return s;
}

StabilityClass classify(const Spectrum& s, double tol_unit) {
    if (!(tol_unit > 0.0)) throw std::invalid_argument("classify: tol_unit must be positive");
    StabilityClass c;
    c.margin = std::fabs(s.spectral_radius - 1.0);
    if (s.spectral_radius < 1.0 - tol_unit)
        c.kind = Stability::AsymptoticallyStable;
    else if (s.spectral_radius > 1.0 + tol_unit)
        c.kind = Stability::Unstable;
    else
        c.kind = Stability::Inconclusive;
    return c;
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::AsymptoticallyStable: return "asymptotically_stable";
        case Stability::Unstable: return "unstable";
        default: return "inconclusive";
    }
}

DefinitenessVerdict symmetric_definiteness(const Matrix& m) {
    if (!m.square()) throw std::invalid_argument("symmetric_definiteness: non-square matrix");
    if (m.asymmetry() > 1e-10 * (1.0 + m.max_abs()))
        throw std::invalid_argument("symmetric_definiteness: matrix is not symmetric");
    Matrix sym = m;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) sym(i, j) = 0.5 * (m(i, j) + m(j, i));
    const Spectrum s = eigenvalues(sym);
    const double thr = 1e-9 * (1.0 + sym.frobenius_norm());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& ev : s.eigenvalues) {
        lo = std::min(lo, ev.real());
        hi = std::max(hi, ev.real());
    }
    DefinitenessVerdict v;
    v.pos_def = lo > thr;
    v.pos_semidef = lo >= -thr;
    v.neg_def = hi < -thr;
    v.neg_semidef = hi <= thr;
    return v;
}

std::string to_string(const DefinitenessVerdict& v) {
    if (v.pos_def) return "positive_definite";
    if (v.neg_def) return "negative_definite";
    if (v.pos_semidef && v.neg_semidef) return "positive_and_negative_semidefinite";
    if (v.pos_semidef) return "positive_semidefinite";
    if (v.neg_semidef) return "negative_semidefinite";
    return "indefinite";
}

double multiset_distance(std::vector<std::complex<double>> a,
                         std::vector<std::complex<double>> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    while (!a.empty()) {
        size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < a.size(); ++i) {
            for (size_t j = 0; j < b.size(); ++j) {
                const double d = std::abs(a[i] - b[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        worst = std::max(worst, best);
        a.erase(a.begin() + bi);
        b.erase(b.begin() + bj);
    }
    return worst;
}

} // namespace geg
