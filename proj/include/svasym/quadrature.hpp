#pragma once

#include <functional>
#include <vector>

namespace svasym {

// Gauss-Hermite rule for integrals of the form
//   integral h(x) exp(-x^2) dx  ~=  sum_i w_i h(x_i).
// Nodes are computed by Newton iteration on the physicists' Hermite
// recurrence; deterministic for a fixed node count.
struct GaussHermite {
    explicit GaussHermite(int n);

    std::vector<double> nodes;
    std::vector<double> weights;
};

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_depth = 48;
};

// Adaptive Gauss-Kronrod (7,15) quadrature on [a, b].
//
// Throws std::runtime_error if the integrand evaluates non-finite (the
// offending abscissa is named) or if the subdivision depth is exhausted
// (the worst subinterval is named).
double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     const QuadratureOptions& opts = {});

}  // namespace svasym
