#include "geg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace geg {

namespace {

struct GradHess {
    // thin adapter: analytic derivatives when present, else the operator
    // bundle's finite differences (any positive config works for that)
    OperatorBundle bundle;
    explicit GradHess(const MinMaxProblem& p)
        : bundle(p, GegConfig::from_rates(1.0, 1.0, 1.0)) {}
    Vec grad(std::span<const double> z) const {
        Vec g(bundle.dim());
        if (bundle.problem().has_grad())
            bundle.problem().grad(z, g);
        else
            g = bundle.fd_gradient(z);
        return g;
    }
    Matrix hess(std::span<const double> z) const { return bundle.raw_hessian(z); }
};

double grad_norm_at(const GradHess& gh, const Vec& z) { return norm2(gh.grad(z)); }

// Damped Newton on grad f = 0 with backtracking halving on ||grad f||
// (at most 40 halvings) and a Levenberg fallback direction when the
// Newton step stalls. Returns the best residual reached.
double newton_refine(const GradHess& gh, Vec& z, int max_iter, double target) {
    const int d = static_cast<int>(z.size());
    Vec best = z;
    double best_gn = grad_norm_at(gh, z);
    for (int it = 0; it < max_iter; ++it) {
        const Vec g = gh.grad(z);
        const double gn = norm2(g);
        if (!std::isfinite(gn) || gn > 1e18) break;
        if (gn < best_gn) {
            best_gn = gn;
            best = z;
        }
        if (gn <= target * 1e-2 || gn == 0.0) break;
        const Matrix h = gh.hess(z);
        Vec neg_g(d);
        for (int i = 0; i < d; ++i) neg_g[i] = -g[i];

        Vec dir;
        bool have_dir = false;
        try {
            dir = lu_solve(h, neg_g);
            have_dir = true;
        } catch (const SingularMatrixError&) {
        }

        bool stepped = false;
        if (have_dir) {
            double t = 1.0;
            for (int half = 0; half < 40; ++half) {
                Vec cand(d);
                for (int i = 0; i < d; ++i) cand[i] = z[i] + t * dir[i];
                if (grad_norm_at(gh, cand) < gn) {
                    z = std::move(cand);
                    stepped = true;
                    break;
                }
                t *= 0.5;
            }
        }
        if (!stepped) {
            // Levenberg regularization on the squared-residual model
            Matrix hth = h.transposed() * h;
            Vec htg = h.transposed() * std::span<const double>(neg_g);
            double mu = 1e-8 * (1.0 + hth.trace() / d);
            for (int tries = 0; tries < 24 && !stepped; ++tries) {
                Matrix reg = hth;
                for (int i = 0; i < d; ++i) reg(i, i) += mu;
                try {
                    Vec cand_dir = lu_solve(reg, htg);
                    Vec cand(d);
                    for (int i = 0; i < d; ++i) cand[i] = z[i] + cand_dir[i];
                    if (grad_norm_at(gh, cand) < gn) {
                        z = std::move(cand);
                        stepped = true;
                    }
                } catch (const SingularMatrixError&) {
                }
                mu *= 10.0;
            }
        }
        if (!stepped) break;
    }
    const double gn = grad_norm_at(gh, z);
    if (gn > best_gn) {
        z = best;
        return best_gn;
    }
    return gn;
}

bool in_box(const Box& box, const Vec& z, double slack) {
    for (size_t i = 0; i < z.size(); ++i)
        if (z[i] < box.lo[i] - slack || z[i] > box.hi[i] + slack) return false;
    return true;
}

std::complex<double> spectral_map(std::complex<double> kappa, double eta, double gamma) {
    const std::complex<double> ek = eta * kappa;
    return 1.0 + gamma * (ek + ek * ek);
}

} // namespace

const char* to_string(SaddleKind k) {
    switch (k) {
        case SaddleKind::StrictSaddle: return "strict_saddle";
        case SaddleKind::CandidateSaddle: return "candidate_saddle";
        default: return "not_saddle";
    }
}

std::vector<Vec> find_critical_points(const MinMaxProblem& problem, const Box& box,
                                      int starts, uint64_t seed) {
    const int d = problem.dim();
    if (static_cast<int>(box.lo.size()) != d || static_cast<int>(box.hi.size()) != d)
        throw std::invalid_argument("find_critical_points: box dimension mismatch");
    for (int i = 0; i < d; ++i)
        if (!(box.lo[i] < box.hi[i]))
            throw std::invalid_argument("find_critical_points: degenerate box");
    if (starts < 1) throw std::invalid_argument("find_critical_points: starts must be >= 1");

    const GradHess gh(problem);

    // Latin hypercube: one stratified sample per axis, independently
    // permuted across axes.
    std::vector<Vec> start_pts(starts, Vec(d));
    Rng rng(seed);
    for (int axis = 0; axis < d; ++axis) {
        std::vector<int> perm(starts);
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = starts - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.uniform() * (i + 1));
            std::swap(perm[i], perm[std::min(j, i)]);
        }
        const double w = (box.hi[axis] - box.lo[axis]) / starts;
        for (int s = 0; s < starts; ++s)
            start_pts[s][axis] = box.lo[axis] + (perm[s] + rng.uniform()) * w;
    }

    // 2-D extra seeds: coarse-grid local minima of ||grad f||^2 catch
    // roots whose Newton basins are much smaller than the LHS spacing.
    if (d == 2) {
        const int gres = 48;
        std::vector<double> gn(static_cast<size_t>(gres) * gres);
        for (int iy = 0; iy < gres; ++iy)
            for (int ix = 0; ix < gres; ++ix) {
                Vec z = {box.lo[0] + (ix + 0.5) * (box.hi[0] - box.lo[0]) / gres,
                         box.lo[1] + (iy + 0.5) * (box.hi[1] - box.lo[1]) / gres};
                gn[static_cast<size_t>(iy) * gres + ix] = norm2_sq(gh.grad(z));
            }
        for (int iy = 0; iy < gres; ++iy)
            for (int ix = 0; ix < gres; ++ix) {
                const double v = gn[static_cast<size_t>(iy) * gres + ix];
                bool is_min = true;
                for (int dy = -1; dy <= 1 && is_min; ++dy)
                    for (int dx = -1; dx <= 1 && is_min; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int jx = ix + dx, jy = iy + dy;
                        if (jx < 0 || jy < 0 || jx >= gres || jy >= gres) continue;
                        if (gn[static_cast<size_t>(jy) * gres + jx] < v) is_min = false;
                    }
                if (is_min)
                    start_pts.push_back({box.lo[0] + (ix + 0.5) * (box.hi[0] - box.lo[0]) / gres,
                                         box.lo[1] + (iy + 0.5) * (box.hi[1] - box.lo[1]) / gres});
            }
    }

    std::vector<Vec> found;
    std::vector<double> residuals;
    for (Vec z : start_pts) {
        const double gn = newton_refine(gh, z, 200, 1e-9);
        if (!(gn <= 1e-9)) continue;
        if (!in_box(box, z, 1e-6)) continue;
        bool merged = false;
        for (size_t i = 0; i < found.size(); ++i) {
            if (dist2(found[i], z) < 1e-4) {
                if (gn < residuals[i]) {
                    found[i] = z;
                    residuals[i] = gn;
                }
                merged = true;
                break;
            }
        }
        if (!merged) {
            found.push_back(std::move(z));
            residuals.push_back(gn);
        }
    }
    std::sort(found.begin(), found.end());
    return found;
}

bool refine_critical_point(const MinMaxProblem& problem, Vec& z, double tol) {
    const GradHess gh(problem);
    return newton_refine(gh, z, 100, tol) <= tol;
}

EquilibriumReport report(const MinMaxProblem& problem, const GegConfig& config,
                         std::span<const double> z_star, double tol_crit) {
    OperatorBundle bundle(problem, config);
    EquilibriumReport rep;
    rep.location.assign(z_star.begin(), z_star.end());
    rep.residual = bundle.grad_norm(z_star);
    if (!(rep.residual <= tol_crit))
        throw std::invalid_argument("report: residual " + std::to_string(rep.residual) +
                                    " exceeds tol_crit " + std::to_string(tol_crit) +
                                    "; refine the point first");

    rep.jacobian = bundle.jacobian(z_star);
    rep.j_spectrum = eigenvalues(rep.jacobian);
    rep.stability = classify(rep.j_spectrum);
    rep.lh_spectrum = eigenvalues(bundle.lambda_h(z_star));

    const Matrix hess = bundle.raw_hessian(z_star);
    const int n = problem.n, m = problem.m;
    Matrix hxx(n, n), hyy(m, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) hxx(i, j) = hess(i, j);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) hyy(i, j) = hess(n + i, n + j);
    const DefinitenessVerdict dxx = symmetric_definiteness(hxx);
    const DefinitenessVerdict dyy = symmetric_definiteness(hyy);

    if (dxx.pos_def && dyy.neg_def) {
        rep.saddle.kind = SaddleKind::StrictSaddle;
    } else if (!dxx.pos_semidef || !dyy.neg_semidef) {
        rep.saddle.kind = SaddleKind::NotSaddle;
    } else {
        // Proposition-1 conditions are necessary only; probe the saddle
        // inequality directly on a small neighborhood grid.
        rep.saddle.kind = SaddleKind::CandidateSaddle;
        rep.saddle.sampling_checked = true;
        rep.saddle.sampling_confirmed = true;
        const double radius = 1e-3, slack = 1e-12;
        const double f0 = problem.eval(z_star);
        Vec zz(z_star.begin(), z_star.end());
        const int samples = 8;
        Rng rng(0x5add1e);
        auto perturb = [&](int block) { // 0: x-block, 1: y-block
            const int off = block == 0 ? 0 : n;
            const int len = block == 0 ? n : m;
            for (int s = 0; s < samples * samples; ++s) {
                if (len == 1) {
                    const double t = -radius + 2.0 * radius * ((s % samples) + 0.5) / samples;
                    if (s >= samples) return; // 1-D slice: 8 points are enough
                    zz[off] = z_star[off] + t;
                } else {
                    double r2 = 0.0;
                    for (int i = 0; i < len; ++i) {
                        zz[off + i] = rng.normal();
                        r2 += zz[off + i] * zz[off + i];
                    }
                    const double scale = radius * std::pow(rng.uniform(), 1.0 / len) /
                                         std::sqrt(std::max(r2, 1e-300));
                    for (int i = 0; i < len; ++i)
                        zz[off + i] = z_star[off + i] + scale * zz[off + i];
                }
                const double fv = problem.eval(zz);
                if (block == 1 && fv > f0 + slack) rep.saddle.sampling_confirmed = false;
                if (block == 0 && fv < f0 - slack) rep.saddle.sampling_confirmed = false;
            }
        };
        perturb(1); // f(x*, y) <= f(x*, y*)
        for (int i = 0; i < n + m; ++i) zz[i] = z_star[i];
        perturb(0); // f(x*, y*) <= f(x, y*)
        if (!rep.saddle.sampling_confirmed) rep.saddle.kind = SaddleKind::NotSaddle;
    }

    const Spectrum hs = eigenvalues(hess);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& ev : hs.eigenvalues) {
        lo = std::min(lo, std::abs(ev));
        hi = std::max(hi, std::abs(ev));
    }
    rep.hessian_invertible = lo > 1e-8 * hi;
    rep.hessian_condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    return rep;
}

double eigenvalue_map_mismatch(const MinMaxProblem& problem, const GegConfig& config,
                    std::span<const double> z_star) {
    OperatorBundle bundle(problem, config);
    const Spectrum lh = eigenvalues(bundle.lambda_h(z_star));
    const Spectrum js = eigenvalues(bundle.jacobian(z_star));
    std::vector<std::complex<double>> mapped;
    mapped.reserve(lh.eigenvalues.size());
    for (const auto& kappa : lh.eigenvalues)
        mapped.push_back(spectral_map(kappa, config.eta(), config.gamma()));
    return multiset_distance(mapped, js.eigenvalues);
}

ParamCertificate certify_params(double eta, double tau, double gamma, double c,
                                double lipschitz) {
    if (!(eta > 0.0) || !(tau > 0.0) || !(gamma > 0.0) || !(c > 0.0) || !(lipschitz > 0.0))
        throw std::invalid_argument("certify_params: all inputs must be positive");
    ParamCertificate p;
    p.eta = eta;
    p.tau = tau;
    p.gamma = gamma;
    p.c = c;
    p.lipschitz = lipschitz;
    p.p1_member = (tau <= 1.0) && (gamma <= tau * tau / (c * tau + c * c));
    p.p2_member = (tau >= 1.0) && (gamma <= 1.0 / (c + c * c));
    p.diffeo_ok = (eta <= c / lipschitz) && (p.p1_member || p.p2_member);
    const double eta_cap = std::min(1.0, tau) / lipschitz;
    p.general_ok = (eta < eta_cap) && (gamma <= 1.0);
    p.real_spectrum_ok = (eta < eta_cap) && (gamma < 8.0);
    return p;
}

AppendixRegionResult verify_appendix_regions(int grid_density, double gamma_probe) {
    if (grid_density < 100)
        throw std::invalid_argument("verify_appendix_regions: grid_density must be >= 100");
    if (!(gamma_probe > 0.0) || gamma_probe > 1.0)
        throw std::invalid_argument("verify_appendix_regions: gamma_probe must be in (0, 1]");
    AppendixRegionResult r;
    r.min_ratio = std::numeric_limits<double>::infinity();
    const double g = gamma_probe;
    for (int i = 0; i < grid_density; ++i) {
        const double a = -1.0 + (i + 0.5) / grid_density; // a in (-1, 0)
        const double bmax = std::sqrt(1.0 - a * a);
        for (int j = 0; j < grid_density; ++j) {
            const double b = -bmax + (j + 0.5) * (2.0 * bmax) / grid_density;
            const double re = a * a - b * b + a;
            const double im = 2.0 * a * b + b;
            const double mod =
                std::sqrt((1.0 + g * re) * (1.0 + g * re) + g * g * im * im);
            r.max_modulus = std::max(r.max_modulus, mod);
            const double denom = re * re + im * im;
            if (denom >= 1e-12) r.min_ratio = std::min(r.min_ratio, -2.0 * re / denom);
        }
    }
    return r;
}

Matrix random_strict_saddle_hessian(int n, int m, uint64_t seed, bool zero_coupling) {
    Rng rng(seed);
    const int d = n + m;
    Matrix mn(n, n), nn(m, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) mn(i, j) = rng.normal();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) nn(i, j) = rng.normal();
    Matrix a = mn.transposed() * mn;
    Matrix c = nn.transposed() * nn;
    // keep the blocks uniformly definite so stability margins stay clear
    // of the classifier dead zone
    for (int i = 0; i < n; ++i) a(i, i) += 0.3;
    for (int i = 0; i < m; ++i) c(i, i) += 0.3;
    Matrix q(d, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q(i, j) = a(i, j);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) q(n + i, n + j) = -c(i, j);
    if (!zero_coupling) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                const double b = rng.normal();
                q(i, n + j) = b;
                q(n + j, i) = b;
            }
    }
    return q;
}

double sampled_lipschitz(const MinMaxProblem& problem, const Box& box, int samples) {
    const int d = problem.dim();
    if (static_cast<int>(box.lo.size()) != d || static_cast<int>(box.hi.size()) != d)
        throw std::invalid_argument("sampled_lipschitz: box dimension mismatch");
    const GradHess gh(problem);
    Rng rng(0xc0ffee);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        Vec z(d);
        for (int i = 0; i < d; ++i) z[i] = rng.uniform(box.lo[i], box.hi[i]);
        const Spectrum sp = eigenvalues(gh.hess(z));
        worst = std::max(worst, sp.spectral_radius);
    }
    return worst;
}

double saddle_spectrum_suite(int seeds) {
    if (seeds < 1) throw std::invalid_argument("saddle_spectrum_suite: seeds must be >= 1");
    double worst = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < seeds; ++s) {
        Rng rng(0xeffaceab1e0000ull + static_cast<uint64_t>(s));
        const int n = 1 + static_cast<int>(rng.uniform() * 4.0);
        const int m = 1 + static_cast<int>(rng.uniform() * 4.0);
        const int d = n + m;
        // A = M^T M (PSD, possibly singular), C = -N^T N (NSD), B arbitrary
        Matrix mn(n, n), nn(m, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) mn(i, j) = rng.normal();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) nn(i, j) = rng.normal();
        const Matrix a = mn.transposed() * mn;
        const Matrix cc = nn.transposed() * nn;
        Matrix q(d, d);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) q(i, j) = a(i, j);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) q(n + i, n + j) = -cc(i, j);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                const double b = 3.0 * rng.normal();
                q(i, n + j) = b;
                q(n + j, i) = b;
            }
        const double tau = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
        // Lambda_tau * diag(-I, I) * hess
        Matrix lh(d, d);
        for (int i = 0; i < d; ++i) {
            const double row_scale = (i < n) ? -1.0 / tau : 1.0;
            for (int j = 0; j < d; ++j) lh(i, j) = row_scale * q(i, j);
        }
        for (const auto& ev : eigenvalues(lh).eigenvalues)
            worst = std::max(worst, ev.real());
    }
    return worst;
}

} // namespace geg
