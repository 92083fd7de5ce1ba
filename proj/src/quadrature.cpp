#include "svasym/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace svasym {

GaussHermite::GaussHermite(int n) {
    if (n < 1) throw std::invalid_argument("GaussHermite: node count must be >= 1");
    nodes.resize(n);
    weights.resize(n);

    const double eps = 1e-15;
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        // Initial guesses for the largest roots, then march inward.
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * nodes[1];
        } else {
            z = 2.0 * z - nodes[i - 2];
        }
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Orthonormal Hermite recurrence: H~_j(z).
            double p1 = std::pow(std::numbers::pi, -0.25);
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= eps) break;
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    // Largest root first above; store ascending.
    for (int i = 0; i < n / 2; ++i) std::swap(nodes[i], nodes[n - 1 - i]);
}

namespace {

// Gauss-Kronrod (7,15) abscissae/weights on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Gk15Result {
    double kronrod;
    double err;
};

Gk15Result gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    for (int i = 0; i < 15; ++i) {
        if (!std::isfinite(fv[i])) {
            const double x = (i < 7) ? c - h * kXgk[i] : (i == 7 ? c : c + h * kXgk[14 - i]);
            throw std::runtime_error("adaptive_quad: integrand non-finite at x = " +
                                     std::to_string(x));
        }
    }
    double resk = 0.0;
    for (int i = 0; i < 7; ++i) resk += kWgk[i] * (fv[i] + fv[14 - i]);
    resk += kWgk[7] * fv[7];
    double resg = kWg[3] * fv[7];
    for (int i = 0; i < 3; ++i) resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    return {resk * h, std::abs(resk - resg) * h};
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol,
             int depth, const QuadratureOptions& opts) {
    const Gk15Result r = gk15(f, a, b);
    if (r.err <= tol || r.err <= opts.abs_tol) return r.kronrod;
    if (depth >= opts.max_depth) {
        throw std::runtime_error("adaptive_quad: failed to converge on [" +
                                 std::to_string(a) + ", " + std::to_string(b) +
                                 "], local error " + std::to_string(r.err));
    }
    const double c = 0.5 * (a + b);
    return adapt(f, a, c, 0.5 * tol, depth + 1, opts) +
           adapt(f, c, b, 0.5 * tol, depth + 1, opts);
}

}  // namespace

double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     const QuadratureOptions& opts) {
    if (a == b) return 0.0;
    const Gk15Result whole = gk15(f, a, b);
    const double tol =
        std::max(opts.abs_tol, opts.rel_tol * std::max(std::abs(whole.kronrod), 1e-300));
    if (whole.err <= tol) return whole.kronrod;
    const double c = 0.5 * (a + b);
    return adapt(f, a, c, 0.5 * tol, 1, opts) + adapt(f, c, b, 0.5 * tol, 1, opts);
}

}  // namespace svasym
