#include "svasym/calibration.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "svasym/closed_form.hpp"
#include "svasym/normal.hpp"

namespace svasym {

double SmilePoint::lmmr() const { return std::log(strike / spot) / (expiry - t); }

double bs_call_price(double s, double strike, double r, double sigma, double tau) {
    if (!(s > 0.0)) throw std::domain_error("bs_call_price: s must be > 0");
    if (!(strike > 0.0)) throw std::domain_error("bs_call_price: strike must be > 0");
    if (!(sigma > 0.0)) throw std::domain_error("bs_call_price: sigma must be > 0");
    if (!(tau > 0.0)) throw std::domain_error("bs_call_price: tau must be > 0");
    const auto eff = EffectiveParams::from_f2bar(sigma * sigma, r);
    const double x = s / strike;
    return s * norm_cdf(delta_pm(x, Sign::plus, eff, r, tau)) -
           strike * std::exp(-r * tau) * norm_cdf(delta_pm(x, Sign::minus, eff, r, tau));
}

double implied_vol(double price, double s, double strike, double r, double tau) {
    const double lower_bound = std::max(s - strike * std::exp(-r * tau), 0.0);
    if (!(price > lower_bound)) {
        throw std::domain_error(
            "implied_vol: price <= intrinsic bound max(s - K e^{-r tau}, 0) = " +
            std::to_string(lower_bound));
    }
    if (!(price < s)) throw std::domain_error("implied_vol: price >= upper bound s");

    const double tol = 1e-12 * s;
    double lo = 1e-6, hi = 5.0;
    auto residual = [&](double sigma) { return bs_call_price(s, strike, r, sigma, tau) - price; };
    double flo = residual(lo), fhi = residual(hi);
    int expand = 0;
    while (flo * fhi > 0.0 && expand < 60) {
        if (flo > 0.0) lo *= 0.5; else hi *= 2.0;
        flo = residual(lo);
        fhi = residual(hi);
        ++expand;
    }
    if (flo * fhi > 0.0)
        throw std::domain_error("implied_vol: failed to bracket a root in sigma");

    // Bisection; vega > 0 makes the residual monotone, so the root is
    // unique. Iterate to interval collapse: the price-residual target alone
    // leaves sigma poorly determined where vega is small.
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200 && hi - lo > 1e-14 * (1.0 + mid); ++iter) {
        mid = 0.5 * (lo + hi);
        const double fm = residual(mid);
        if (std::abs(fm) < 1e-3 * tol) break;
        if (flo * fm <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        mid = 0.5 * (lo + hi);
    }
    return mid;
}

SmileFit fit_smile(const std::vector<SmilePoint>& points) {
    if (points.size() < 2) throw std::invalid_argument("fit_smile: needs >= 2 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        const double x = p.lmmr();
        sx += x;
        sy += p.implied_vol;
        sxx += x * x;
        sxy += x * p.implied_vol;
    }
    const double n = static_cast<double>(points.size());
    const double mean_x = sx / n;
    const double var_x = sxx / n - mean_x * mean_x;
    if (!(var_x > 1e-14 * std::max(1.0, mean_x * mean_x))) {
        throw std::invalid_argument("fit_smile: all LMMR values coincide (rank-deficient fit)");
    }
    SmileFit fit;
    fit.a = (sxy / n - mean_x * sy / n) / var_x;
    fit.b = (sy - fit.a * sx) / n;
    fit.n_points = points.size();
    double ss = 0.0;
    for (const auto& p : points) {
        const double e = p.implied_vol - (fit.a * p.lmmr() + fit.b);
        ss += e * e;
    }
    fit.residual_rms = std::sqrt(ss / n);
    return fit;
}

SmileCoeffs ab_from_c1_c2(const CorrectionCoeffs& coeffs, const EffectiveParams& eff,
                          double r) {
    const double f32 = eff.f2bar * eff.sigma_eff;  // <f^2>^{3/2}
    SmileCoeffs out;
    out.a = -coeffs.c1 / f32;
    out.b = eff.sigma_eff + (coeffs.c1 / f32) * (r + 1.5 * eff.f2bar) -
            coeffs.c2 / eff.sigma_eff;
    return out;
}

CorrectionCoeffs c1_c2_from_ab(double a, double b, const EffectiveParams& eff, double r) {
    const double f32 = eff.f2bar * eff.sigma_eff;
    CorrectionCoeffs out;
    out.c1 = -a * f32;
    out.c2 = eff.sigma_eff * ((eff.sigma_eff - b) - a * (r + 1.5 * eff.f2bar));
    out.provenance = CoeffProvenance::Calibrated;
    return out;
}

std::vector<SmilePoint> read_smile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_smile_csv: cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    std::vector<SmilePoint> points;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "strike,expiry,spot,t,implied_vol")
                throw std::runtime_error(
                    "read_smile_csv: line 1: expected header strike,expiry,spot,t,implied_vol");
            continue;
        }
        std::istringstream row(line);
        SmilePoint p;
        char c1, c2, c3, c4;
        if (!(row >> p.strike >> c1 >> p.expiry >> c2 >> p.spot >> c3 >> p.t >> c4 >>
              p.implied_vol) ||
            c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',') {
            throw std::runtime_error("read_smile_csv: line " + std::to_string(line_no) +
                                     ": malformed row \"" + line + "\"");
        }
        if (!(p.implied_vol > 0.0) || !(p.expiry > p.t)) {
            throw std::runtime_error("read_smile_csv: line " + std::to_string(line_no) +
                                     ": requires implied_vol > 0 and expiry > t");
        }
        points.push_back(p);
    }
    return points;
}

}  // namespace svasym
