// Test-side reference implementations, kept independent of the library code
// paths they are used to check.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

inline constexpr double kPi = 3.14159265358979323846;

inline double ncdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double npdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature.
inline double simpson_step(const std::function<double(double)>& f, double a, double b,
                           double fa, double fm, double fb, double whole, double tol,
                           int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) return left + right;
    if (std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 40) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

// ---------------------------------------------------------------------------
// Black-Scholes vanillas.
inline double bs_call(double s, double k, double r, double sigma, double tau) {
    const double v = sigma * std::sqrt(tau);
    const double d1 = (std::log(s / k) + (r + 0.5 * sigma * sigma) * tau) / v;
    return s * ncdf(d1) - k * std::exp(-r * tau) * ncdf(d1 - v);
}

inline double bs_put(double s, double k, double r, double sigma, double tau) {
    const double v = sigma * std::sqrt(tau);
    const double d1 = (std::log(s / k) + (r + 0.5 * sigma * sigma) * tau) / v;
    return k * std::exp(-r * tau) * ncdf(-(d1 - v)) - s * ncdf(-d1);
}

inline double bs_put_delta(double s, double k, double r, double sigma, double tau) {
    const double v = sigma * std::sqrt(tau);
    const double d1 = (std::log(s / k) + (r + 0.5 * sigma * sigma) * tau) / v;
    return ncdf(d1) - 1.0;
}

// ---------------------------------------------------------------------------
// Reiner-Rubinstein down-and-out put (barrier below strike, no rebate, q = 0).
inline double rr_down_and_out_put(double s, double k, double h, double r, double sigma,
                                  double tau) {
    if (s <= h) return 0.0;
    const double v = sigma * std::sqrt(tau);
    const double mu = (r - 0.5 * sigma * sigma) / (sigma * sigma);
    const double disc = std::exp(-r * tau);
    const double x1 = std::log(s / k) / v + (1.0 + mu) * v;
    const double x2 = std::log(s / h) / v + (1.0 + mu) * v;
    const double y1 = std::log(h * h / (s * k)) / v + (1.0 + mu) * v;
    const double y2 = std::log(h / s) / v + (1.0 + mu) * v;
    const double phi = -1.0, eta = 1.0;
    const double powc = std::pow(h / s, 2.0 * (mu + 1.0));
    const double powk = std::pow(h / s, 2.0 * mu);
    const double A = phi * s * ncdf(phi * x1) - phi * k * disc * ncdf(phi * x1 - phi * v);
    const double Bv = phi * s * ncdf(phi * x2) - phi * k * disc * ncdf(phi * x2 - phi * v);
    const double C = phi * s * powc * ncdf(eta * y1) - phi * k * disc * powk * ncdf(eta * y1 - eta * v);
    const double D = phi * s * powc * ncdf(eta * y2) - phi * k * disc * powk * ncdf(eta * y2 - eta * v);
    return A - Bv + C - D;
}

// ---------------------------------------------------------------------------
// Goldman-Sosin-Gatto floating-strike lookback put with observed maximum M.
inline double gsg_lookback_put(double s, double running_max, double r, double sigma,
                               double tau) {
    const double M = running_max;
    const double v = sigma * std::sqrt(tau);
    const double b1 = (std::log(M / s) + (-r + 0.5 * sigma * sigma) * tau) / v;
    const double b2 = b1 - v;
    const double b3 = (std::log(M / s) + (r - 0.5 * sigma * sigma) * tau) / v;
    const double y1 = 2.0 * (r - 0.5 * sigma * sigma) * std::log(M / s) / (sigma * sigma);
    const double half = sigma * sigma / (2.0 * r);
    return M * std::exp(-r * tau) * (ncdf(b1) - half * std::exp(y1) * ncdf(-b3)) +
           s * half * ncdf(-b2) - s * ncdf(b2);
}

// ---------------------------------------------------------------------------
// Richardson-extrapolated central differences (relative step on request).
template <class F>
double fd1(F&& f, double x, double h) {
    auto d = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

template <class F>
double fd2(F&& f, double x, double h) {
    auto d = [&](double hh) { return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh); };
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

template <class F>
double fd3(F&& f, double x, double h) {
    auto d = [&](double hh) {
        return (f(x + 2.0 * hh) - 2.0 * f(x + hh) + 2.0 * f(x - hh) - f(x - 2.0 * hh)) /
               (2.0 * hh * hh * hh);
    };
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

// ---------------------------------------------------------------------------
// Crank-Nicolson solver for the first-order correction equation
//   P_t + (1/2) f2 s^2 P_ss + r s P_s - r P = source(tau, s)
// in x = ln s on [x_lo, x_hi], terminal data 0, Dirichlet 0 at both ends.
// Time marches a quadratically graded mesh from tau0 to tau_max; tau0 > 0
// skips the integrable near-expiry source layer, which the spatial grid
// could not resolve (the layer's width sigma sqrt(tau) must exceed the grid
// spacing at the first step taken).
struct CnSolution {
    std::vector<double> x;
    std::vector<double> values;

    double at_log_spot(double xq) const {
        if (xq <= x.front() || xq >= x.back()) throw std::invalid_argument("cn: out of range");
        const double h = x[1] - x[0];
        const std::size_t i =
            std::min(x.size() - 2, static_cast<std::size_t>((xq - x.front()) / h));
        const double w = (xq - x[i]) / h;
        return (1.0 - w) * values[i] + w * values[i + 1];
    }
};

inline CnSolution cn_solve_p1(const std::function<double(double, double)>& source_tau_s,
                              double f2, double r, double x_lo, double x_hi, double tau_max,
                              int n_space, int n_time) {
    CnSolution sol;
    sol.x.resize(n_space);
    const double h = (x_hi - x_lo) / (n_space - 1);
    for (int i = 0; i < n_space; ++i) sol.x[i] = x_lo + i * h;
    const double sigma = std::sqrt(f2);
    const double tau0 = std::max(1e-4, 1.5 * (h / sigma) * (h / sigma));

    const double a = 0.5 * f2 / (h * h) - (r - 0.5 * f2) / (2.0 * h);
    const double bd = -f2 / (h * h) - r;
    const double c = 0.5 * f2 / (h * h) + (r - 0.5 * f2) / (2.0 * h);

    std::vector<double> p(n_space, 0.0), src0(n_space), src1(n_space), rhs(n_space),
        cp(n_space), dp(n_space);
    auto fill_src = [&](std::vector<double>& dst, double tau) {
        for (int i = 0; i < n_space; ++i) dst[i] = source_tau_s(tau, std::exp(sol.x[i]));
    };
    auto tau_at = [&](int k) {
        const double w = static_cast<double>(k) / n_time;
        return tau0 + (tau_max - tau0) * w * w;
    };
    fill_src(src0, tau_at(0));
    for (int k = 0; k < n_time; ++k) {
        const double dt = tau_at(k + 1) - tau_at(k);
        fill_src(src1, tau_at(k + 1));
        rhs[0] = 0.0;
        rhs[n_space - 1] = 0.0;
        for (int i = 1; i + 1 < n_space; ++i) {
            rhs[i] = p[i] + 0.5 * dt * (a * p[i - 1] + bd * p[i] + c * p[i + 1]) -
                     0.5 * dt * (src0[i] + src1[i]);
        }
        // Thomas solve of (I - dt/2 L) p = rhs with Dirichlet rows.
        cp[0] = 0.0;
        dp[0] = rhs[0];
        for (int i = 1; i < n_space; ++i) {
            const bool interior = (i + 1 < n_space);
            const double lo = interior ? -0.5 * dt * a : 0.0;
            const double di = interior ? 1.0 - 0.5 * dt * bd : 1.0;
            const double up = interior ? -0.5 * dt * c : 0.0;
            const double denom = di - lo * cp[i - 1];
            cp[i] = up / denom;
            dp[i] = (rhs[i] - lo * dp[i - 1]) / denom;
        }
        p[n_space - 1] = dp[n_space - 1];
        for (int i = n_space - 2; i >= 0; --i) p[i] = dp[i] - cp[i] * p[i + 1];
        p[0] = 0.0;
        std::swap(src0, src1);
    }
    sol.values = std::move(p);
    return sol;
}

}  // namespace oracles
