#pragma once

#include <functional>

#include "svasym/model.hpp"

namespace svasym {

inline constexpr int kDefaultGhNodes = 64;

// Expectation of h under the invariant distribution of the OU state,
// N(m, nu^2), by Gauss-Hermite quadrature with the given node count.
// Throws if h evaluates non-finite at a quadrature node.
double invariant_average(const std::function<double(double)>& h, double m, double nu,
                         int gh_nodes = kDefaultGhNodes);

// <f^2> and the constants derived from it.
EffectiveParams effective_params(const SvModelParams& model, int gh_nodes = kDefaultGhNodes);

// First derivative of the solution of the Poisson equation
//   nu^2 phi'' + (m - y) phi' = f^2 - <f^2>,
// the unique one with phi' * density -> 0 in both tails:
//   phi'(y) = (1 / (nu^2 Phi(y))) * integral_{-inf}^{y} (f^2(u) - <f^2>) Phi(u) du,
// with Phi the N(m, nu^2) density. The integral is truncated at m -/+ 12 nu,
// where the Gaussian weight is below 1e-30; evaluation beyond that cutoff
// throws (the cutoff is reported). The returned callable is immutable and
// safe to share across threads.
std::function<double(double)> phi_prime(const SvModelParams& model,
                                        int gh_nodes = kDefaultGhNodes);

// c1 = (sqrt(2)/2) <f phi'> rho nu,
// c2 = (sqrt(2)/2) (2 rho <f phi'> - <Lambda phi'>) nu.
CorrectionCoeffs structural_c1_c2(const SvModelParams& model, int gh_nodes = kDefaultGhNodes);

}  // namespace svasym
