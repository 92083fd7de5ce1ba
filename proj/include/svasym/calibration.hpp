#pragma once

#include <string>
#include <vector>

#include "svasym/model.hpp"

namespace svasym {

struct SmilePoint {
    double strike = 0.0;
    double expiry = 0.0;
    double spot = 0.0;
    double t = 0.0;
    double implied_vol = 0.0;

    double lmmr() const;  // ln(K/s) / (T - t)
};

struct SmileFit {
    double a = 0.0;  // slope on LMMR
    double b = 0.0;  // intercept
    double residual_rms = 0.0;
    std::size_t n_points = 0;
};

// Black-Scholes call, s Phi(D+(s/K)) - K e^{-r tau} Phi(D-(s/K)) at variance
// sigma^2. Throws std::domain_error on nonpositive inputs.
double bs_call_price(double s, double strike, double r, double sigma, double tau);

// Inverts bs_call_price by bracketed root finding on [1e-6, 5] (expanded on
// bracket failure) to |price residual| < 1e-12 * s. The price must respect
// the no-arbitrage bounds (max(s - K e^{-r tau}, 0), s).
double implied_vol(double price, double s, double strike, double r, double tau);

// Ordinary least squares of implied vol on LMMR. Needs >= 2 points with
// distinct LMMR.
SmileFit fit_smile(const std::vector<SmilePoint>& points);

// Smile-coefficient maps:
//   a = -c1 / <f^2>^{3/2}
//   b = sigma_eff + (c1 / <f^2>^{3/2}) (r + 3/2 <f^2>) - c2 / sigma_eff
// and the exact algebraic inverse.
struct SmileCoeffs {
    double a = 0.0;
    double b = 0.0;
};

SmileCoeffs ab_from_c1_c2(const CorrectionCoeffs& coeffs, const EffectiveParams& eff, double r);
CorrectionCoeffs c1_c2_from_ab(double a, double b, const EffectiveParams& eff, double r);

// CSV with header "strike,expiry,spot,t,implied_vol"; malformed rows are
// reported with their line number.
std::vector<SmilePoint> read_smile_csv(const std::string& path);

}  // namespace svasym
