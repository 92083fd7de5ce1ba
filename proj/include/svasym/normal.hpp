#pragma once

#include <cmath>
#include <numbers>

namespace svasym {

// Standard normal density.
inline double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Standard normal CDF via erfc; absolute error at double precision (~1e-16),
// accurate in both tails.
inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

}  // namespace svasym
