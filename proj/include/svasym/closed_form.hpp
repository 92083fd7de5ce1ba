#pragma once

#include <vector>

#include "svasym/model.hpp"

namespace svasym {

enum class Sign { minus, plus };

// Delta_pm(x) = [ln x + (r +/- <f^2>/2) tau] / sqrt(<f^2> tau).
// Throws std::domain_error for x <= 0 or tau <= 0.
double delta_pm(double x, Sign sign, const EffectiveParams& eff, double r, double tau);

struct PricingInputs {
    double t = 0.0;  // valuation time
    double s = 0.0;  // spot
    double z = 0.0;  // running maximum (lookback only; z >= s)
    OptionSpec spec;
    EffectiveParams eff;
    CorrectionCoeffs coeffs;
    double r = 0.0;
    double eps = 0.0;

    double tau() const { return spec.expiry - t; }
    void validate() const;
};

struct PriceBreakdown {
    double p0 = 0.0;
    double p1 = 0.0;      // unscaled correction
    double approx = 0.0;  // p0 + sqrt(eps) * p1
    bool knocked_out = false;
};

// Scale-invariant spot derivatives s dP/ds, s^2 d2P/ds2, s^3 d3P/ds3.
struct ScaledDerivs {
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

// Zero-order down-and-out put price. Returns 0 for s <= barrier (knocked
// out); at t = T returns the payoff.
double p0_dop(const PricingInputs& inp);
ScaledDerivs p0_dop_scaled_derivs(const PricingInputs& inp);
double p1_dop(const PricingInputs& inp);

// Zero-order floating-strike lookback put price (s <= z required). At t = T
// returns z - s. The 1/k1 pair of terms switches to its analytic r -> 0
// limit when |k1| < 1e-8.
double p0_lookback(const PricingInputs& inp);
ScaledDerivs p0_lookback_scaled_derivs(const PricingInputs& inp);
double p1_lookback(const PricingInputs& inp);

// P ~= P0 + sqrt(eps) P1, dispatching on the contract kind.
PriceBreakdown approx_price(const PricingInputs& inp);

namespace detail {

// The zero-order prices are sums of terms C * e^{g x} * G(p x + q) in
// x = ln s, where G is either the normal CDF or the ramp
// H(u) = pdf(u) + u cdf(u) (whose derivative is the CDF). Closed under
// d/dx, which gives exact scale derivatives to third order.
enum class TermShape { NormalCdf, Ramp };

struct LogLinearTerm {
    double coeff;
    double growth;  // power of s
    double slope;   // d(arg)/dx
    double shift;
    TermShape shape = TermShape::NormalCdf;
};

struct TermDerivs {
    double v = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;  // value and d/dx^k
};

TermDerivs evaluate_terms(const std::vector<LogLinearTerm>& terms, double x);

std::vector<LogLinearTerm> dop_terms(double strike, double barrier, double r,
                                     const EffectiveParams& eff, double tau);
std::vector<LogLinearTerm> lookback_terms(double z, double r, const EffectiveParams& eff,
                                          double tau);

ScaledDerivs scaled_from_log_derivs(const TermDerivs& d);
double p1_from_scaled(const ScaledDerivs& d, const CorrectionCoeffs& coeffs, double tau);

}  // namespace detail

}  // namespace svasym
