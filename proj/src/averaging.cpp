#include "svasym/averaging.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

#include "svasym/normal.hpp"
#include "svasym/quadrature.hpp"

namespace svasym {

namespace {

constexpr double kTailWidth = 12.0;       // integral truncation, in units of nu
constexpr double kDensityFloor = 1e-30;   // below this the tail weight is treated as zero

double gaussian_density(double y, double m, double nu) {
    return norm_pdf((y - m) / nu) / nu;
}

}  // namespace

double invariant_average(const std::function<double(double)>& h, double m, double nu,
                         int gh_nodes) {
    if (!(nu > 0.0)) throw std::invalid_argument("invariant_average: nu must be > 0");
    const GaussHermite rule(gh_nodes);
    const double scale = std::numbers::sqrt2 * nu;
    double acc = 0.0;
    for (int i = 0; i < gh_nodes; ++i) {
        const double y = m + scale * rule.nodes[i];
        const double hy = h(y);
        if (!std::isfinite(hy)) {
            throw std::runtime_error("invariant_average: integrand non-finite at node y = " +
                                     std::to_string(y));
        }
        acc += rule.weights[i] * hy;
    }
    return acc / std::sqrt(std::numbers::pi);
}

EffectiveParams effective_params(const SvModelParams& model, int gh_nodes) {
    model.validate();
    const auto& f = model.f;
    const double f2bar = invariant_average(
        [&f](double y) { const double v = f(y); return v * v; }, model.m, model.nu, gh_nodes);
    return EffectiveParams::from_f2bar(f2bar, model.r);
}

std::function<double(double)> phi_prime(const SvModelParams& model, int gh_nodes) {
    model.validate();
    const double m = model.m;
    const double nu = model.nu;
    const double f2bar = effective_params(model, gh_nodes).f2bar;
    const auto f = model.f;

    // Centred integrand (f^2 - <f^2>) Phi integrates to zero over the whole
    // line, so the one-sided integral can be taken from whichever tail is
    // nearer; that keeps the quotient by Phi(y) well conditioned on both
    // sides of m.
    auto integrand = [f, f2bar, m, nu](double u) {
        const double v = f(u);
        return (v * v - f2bar) * gaussian_density(u, m, nu);
    };

    return [integrand, m, nu](double y) {
        const double dens = gaussian_density(y, m, nu);
        if (dens < kDensityFloor) {
            throw std::runtime_error(
                "phi_prime: evaluation point y = " + std::to_string(y) +
                " lies beyond the tail cutoff (|y - m| > " + std::to_string(kTailWidth) +
                " nu), where the Gaussian weight underflows");
        }
        QuadratureOptions opts;
        opts.abs_tol = 1e-14;
        opts.rel_tol = 1e-11;
        double lower_integral;
        if (y <= m) {
            lower_integral = adaptive_quad(integrand, m - kTailWidth * nu, y, opts);
        } else {
            lower_integral = -adaptive_quad(integrand, y, m + kTailWidth * nu, opts);
        }
        return lower_integral / (nu * nu * dens);
    };
}

CorrectionCoeffs structural_c1_c2(const SvModelParams& model, int gh_nodes) {
    const auto phip = phi_prime(model, gh_nodes);
    const auto& f = model.f;
    // Quadrature nodes past phi_prime's tail cutoff carry Gaussian weight
    // below 1e-40 and are dropped from the averages.
    const double window = (kTailWidth - 0.5) * model.nu;
    auto windowed = [&](const std::function<double(double)>& h) {
        return [h, phip, m = model.m, window](double y) {
            return std::abs(y - m) > window ? 0.0 : h(y) * phip(y);
        };
    };
    const double f_phi = invariant_average(windowed([&f](double y) { return f(y); }),
                                           model.m, model.nu, gh_nodes);
    double lambda_phi = 0.0;
    if (!model.lambda_is_zero) {
        lambda_phi = invariant_average(windowed(model.lambda), model.m, model.nu, gh_nodes);
    }
    const double half_sqrt2 = std::numbers::sqrt2 / 2.0;
    CorrectionCoeffs coeffs;
    coeffs.c1 = half_sqrt2 * f_phi * model.rho * model.nu;
    coeffs.c2 = half_sqrt2 * (2.0 * model.rho * f_phi - lambda_phi) * model.nu;
    coeffs.provenance = CoeffProvenance::Structural;
    return coeffs;
}

}  // namespace svasym
