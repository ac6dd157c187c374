#pragma once

#include <span>
#include <string_view>

#include "geg/linalg.hpp"
#include "geg/problems.hpp"

namespace geg {

enum class Variant { Geg, Eg, TauEg, EgPlus, Gda };

Variant variant_from_string(std::string_view s);
const char* to_string(Variant v);

/// Step-size bundle (h1x, h1y, h2x, h2y) with the derived rates
/// eta = h1y, tau = h1y/h1x, gamma = h2x/h1x. Construction validates
/// positivity, the two ratio-consistency identities, and the tau/gamma
/// pins of the variant tag.
class GegConfig {
public:
    static GegConfig from_steps(double h1x, double h1y, double h2x, double h2y,
                                Variant v = Variant::Geg);
    static GegConfig from_rates(double eta, double tau, double gamma,
                                Variant v = Variant::Geg);

    double h1x() const { return h1x_; }
    double h1y() const { return h1y_; }
    double h2x() const { return h2x_; }
    double h2y() const { return h2y_; }
    double eta() const { return h1y_; }
    double tau() const { return h1y_ / h1x_; }
    double gamma() const { return h2x_ / h1x_; }
    Variant variant() const { return variant_; }

private:
    GegConfig(double h1x, double h1y, double h2x, double h2y, Variant v);
    double h1x_, h1y_, h2x_, h2y_;
    Variant variant_;
};

struct DivergenceError : std::runtime_error {
    explicit DivergenceError(Vec it)
        : std::runtime_error("map step produced a non-finite iterate"), iterate(std::move(it)) {}
    Vec iterate;
};

/// Callable bundle assembling F(z), H(z), the iteration map w(z) and its
/// Jacobian from a problem and a config. Analytic derivatives are used
/// when the problem carries them, otherwise central finite differences
/// with step 1e-6*max(1,|z_i|). Immutable and shareable across workers.
class OperatorBundle {
public:
    OperatorBundle(MinMaxProblem problem, GegConfig config);

    const MinMaxProblem& problem() const { return problem_; }
    const GegConfig& config() const { return config_; }
    int dim() const { return problem_.dim(); }

    /// F(z) = [grad_x f; -grad_y f]
    Vec field(std::span<const double> z) const;
    /// H(z) = diag(-I, I) * hess f(z)
    Matrix hessian_h(std::span<const double> z) const;
    /// Lambda_tau * H(z)
    Matrix lambda_h(std::span<const double> z) const;
    /// w(z); for the GDA variant, the single-step map z - eta*Lambda*F(z)
    Vec step(std::span<const double> z) const;
    Vec step_given_field(std::span<const double> z, std::span<const double> f) const;
    /// Jacobian of the map at z
    Matrix jacobian(std::span<const double> z) const;
    double grad_norm(std::span<const double> z) const;
    /// diagonal of Lambda_tau
    Vec lambda_diag() const;

    Vec fd_gradient(std::span<const double> z) const;
    Matrix raw_hessian(std::span<const double> z) const; // hess f, symmetrized if FD

private:
    MinMaxProblem problem_;
    GegConfig config_;
};

OperatorBundle make_operators(MinMaxProblem problem, GegConfig config);

/// w(z), throwing DivergenceError (carrying the iterate) when any
/// component comes out non-finite.
Vec geg_step(const OperatorBundle& bundle, std::span<const double> z);

Matrix jacobian_at(const OperatorBundle& bundle, std::span<const double> z);

} // namespace geg
