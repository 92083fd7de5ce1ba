#include "svasym/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "svasym/normal.hpp"

namespace svasym {

namespace {
constexpr double kK1Floor = 1e-8;  // below this |k1| the lookback uses the r->0 limit
}

double delta_pm(double x, Sign sign, const EffectiveParams& eff, double r, double tau) {
    if (!(x > 0.0)) throw std::domain_error("delta_pm: x must be > 0");
    if (!(tau > 0.0)) throw std::domain_error("delta_pm: tau must be > 0");
    const double v = std::sqrt(eff.f2bar * tau);
    const double half = (sign == Sign::plus ? 0.5 : -0.5) * eff.f2bar;
    return (std::log(x) + (r + half) * tau) / v;
}

void PricingInputs::validate() const {
    spec.validate();
    if (!(s > 0.0)) throw std::invalid_argument("PricingInputs: s must be > 0");
    if (!(t >= 0.0 && t <= spec.expiry))
        throw std::invalid_argument("PricingInputs: t must lie in [0, T]");
    if (!spec.is_barrier() && !(z >= s))
        throw std::domain_error("PricingInputs: lookback requires z >= s");
}

namespace detail {

TermDerivs evaluate_terms(const std::vector<LogLinearTerm>& terms, double x) {
    TermDerivs out;
    for (const auto& t : terms) {
        const double u = t.slope * x + t.shift;
        const double p = t.slope;
        const double g = t.growth;
        const double cdf = norm_cdf(u);
        const double pdf = norm_pdf(u);
        double G0, G1, G2, G3;
        if (t.shape == TermShape::NormalCdf) {
            G0 = cdf;
            G1 = p * pdf;
            G2 = -p * p * u * pdf;
            G3 = p * p * p * (u * u - 1.0) * pdf;
        } else {  // Ramp: H(u) = pdf(u) + u cdf(u), H' = cdf
            G0 = pdf + u * cdf;
            G1 = p * cdf;
            G2 = p * p * pdf;
            G3 = -p * p * p * u * pdf;
        }
        const double e = t.coeff * std::exp(g * x);
        out.v += e * G0;
        out.d1 += e * (g * G0 + G1);
        out.d2 += e * (g * g * G0 + 2.0 * g * G1 + G2);
        out.d3 += e * (g * g * g * G0 + 3.0 * g * g * G1 + 3.0 * g * G2 + G3);
    }
    return out;
}

std::vector<LogLinearTerm> dop_terms(double strike, double barrier, double r,
                                     const EffectiveParams& eff, double tau) {
    const double K = strike;
    const double B = barrier;
    const double v = std::sqrt(eff.f2bar * tau);
    const double k1 = eff.k1;
    const double disc = std::exp(-r * tau);
    const double drift_m = (r - 0.5 * eff.f2bar) * tau;
    const double drift_p = (r + 0.5 * eff.f2bar) * tau;

    // -Delta_-(s/c) = -(x - ln c + drift_m)/v and the image arguments
    // Delta_pm(B/s), Delta_pm(B^2/(sK)) are affine in x = ln s with slope
    // -1/v; the image prefactors (B/s)^{k1-1}, (B/s)^{k1} contribute the
    // growth exponents.
    std::vector<LogLinearTerm> terms;
    terms.reserve(8);
    terms.push_back({K * disc, 0.0, -1.0 / v, (std::log(K) - drift_m) / v});
    terms.push_back({-K * disc, 0.0, -1.0 / v, (std::log(B) - drift_m) / v});
    terms.push_back({-1.0, 1.0, -1.0 / v, (std::log(K) - drift_p) / v});
    terms.push_back({1.0, 1.0, -1.0 / v, (std::log(B) - drift_p) / v});
    const double imageK = std::pow(B, k1 - 1.0);
    terms.push_back({-K * disc * imageK, -(k1 - 1.0), -1.0 / v, (std::log(B) + drift_m) / v});
    terms.push_back({K * disc * imageK, -(k1 - 1.0), -1.0 / v,
                     (std::log(B * B / K) + drift_m) / v});
    const double imageS = B * std::pow(B, k1);
    terms.push_back({imageS, -k1, -1.0 / v, (std::log(B) + drift_p) / v});
    terms.push_back({-imageS, -k1, -1.0 / v, (std::log(B * B / K) + drift_p) / v});
    return terms;
}

std::vector<LogLinearTerm> lookback_terms(double z, double r, const EffectiveParams& eff,
                                          double tau) {
    const double v = std::sqrt(eff.f2bar * tau);
    const double k1 = eff.k1;
    const double disc = std::exp(-r * tau);
    const double drift_m = (r - 0.5 * eff.f2bar) * tau;
    const double drift_p = (r + 0.5 * eff.f2bar) * tau;

    std::vector<LogLinearTerm> terms;
    terms.reserve(4);
    terms.push_back({z * disc, 0.0, -1.0 / v, (std::log(z) - drift_m) / v});
    terms.push_back({-1.0, 1.0, -1.0 / v, (std::log(z) - drift_p) / v});
    if (std::abs(k1) > kK1Floor) {
        // -(z/k1)(s/z)^{1-k1} e^{-r tau} Phi(-Delta_-(z/s)) + (s/k1) Phi(Delta_+(s/z))
        terms.push_back({-std::pow(z, k1) / k1 * disc, 1.0 - k1, 1.0 / v,
                         (-std::log(z) - drift_m) / v});
        terms.push_back({1.0 / k1, 1.0, 1.0 / v, (-std::log(z) + drift_p) / v});
    } else {
        // k1 -> 0 limit of the pair above: s v H(Delta_+(s/z)).
        terms.push_back({v, 1.0, 1.0 / v, (-std::log(z) + drift_p) / v, TermShape::Ramp});
    }
    return terms;
}

ScaledDerivs scaled_from_log_derivs(const TermDerivs& d) {
    return {d.d1, d.d2 - d.d1, d.d3 - 3.0 * d.d2 + 2.0 * d.d1};
}

double p1_from_scaled(const ScaledDerivs& d, const CorrectionCoeffs& coeffs, double tau) {
    const double c1 = coeffs.c1;
    const double c2 = coeffs.c2;
    return c1 * tau * (-d.d1 - 3.0 * d.d2 - d.d3) - (c2 - 3.0 * c1) * tau * (d.d1 + d.d2) -
           (c2 - 2.0 * c1) * tau * (-d.d1);
}

}  // namespace detail

namespace {

bool knocked_out(const PricingInputs& inp) {
    return inp.spec.is_barrier() && inp.s <= inp.spec.barrier().barrier;
}

}  // namespace

double p0_dop(const PricingInputs& inp) {
    inp.validate();
    if (knocked_out(inp)) return 0.0;
    const auto& b = inp.spec.barrier();
    const double tau = inp.tau();
    if (tau == 0.0) return std::max(b.strike - inp.s, 0.0);
    const auto terms = detail::dop_terms(b.strike, b.barrier, inp.r, inp.eff, tau);
    return detail::evaluate_terms(terms, std::log(inp.s)).v;
}

ScaledDerivs p0_dop_scaled_derivs(const PricingInputs& inp) {
    inp.validate();
    if (knocked_out(inp)) return {};
    const auto& b = inp.spec.barrier();
    const double tau = inp.tau();
    if (!(tau > 0.0)) throw std::domain_error("p0_dop_scaled_derivs: requires t < T");
    const auto terms = detail::dop_terms(b.strike, b.barrier, inp.r, inp.eff, tau);
    return detail::scaled_from_log_derivs(detail::evaluate_terms(terms, std::log(inp.s)));
}

double p1_dop(const PricingInputs& inp) {
    inp.validate();
    if (knocked_out(inp)) return 0.0;
    const double tau = inp.tau();
    if (tau == 0.0) return 0.0;
    return detail::p1_from_scaled(p0_dop_scaled_derivs(inp), inp.coeffs, tau);
}

double p0_lookback(const PricingInputs& inp) {
    inp.validate();
    const double tau = inp.tau();
    if (tau == 0.0) return inp.z - inp.s;
    const auto terms = detail::lookback_terms(inp.z, inp.r, inp.eff, tau);
    return detail::evaluate_terms(terms, std::log(inp.s)).v;
}

ScaledDerivs p0_lookback_scaled_derivs(const PricingInputs& inp) {
    inp.validate();
    const double tau = inp.tau();
    if (!(tau > 0.0)) throw std::domain_error("p0_lookback_scaled_derivs: requires t < T");
    const auto terms = detail::lookback_terms(inp.z, inp.r, inp.eff, tau);
    return detail::scaled_from_log_derivs(detail::evaluate_terms(terms, std::log(inp.s)));
}

double p1_lookback(const PricingInputs& inp) {
    inp.validate();
    const double tau = inp.tau();
    if (tau == 0.0) return 0.0;
    return detail::p1_from_scaled(p0_lookback_scaled_derivs(inp), inp.coeffs, tau);
}

PriceBreakdown approx_price(const PricingInputs& inp) {
    inp.validate();
    PriceBreakdown out;
    if (inp.spec.is_barrier()) {
        out.knocked_out = knocked_out(inp);
        out.p0 = p0_dop(inp);
        out.p1 = p1_dop(inp);
    } else {
        out.p0 = p0_lookback(inp);
        out.p1 = p1_lookback(inp);
    }
    out.approx = out.p0 + std::sqrt(inp.eps) * out.p1;
    return out;
}

}  // namespace svasym
