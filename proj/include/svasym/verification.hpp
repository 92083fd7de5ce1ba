#pragma once

#include <functional>
#include <string>
#include <vector>

#include "svasym/closed_form.hpp"
#include "svasym/model.hpp"

namespace svasym {

struct ResidualReport {
    std::string name;
    double max_abs_residual = 0.0;
    std::string grid;
    double tolerance = 0.0;
    bool pass = false;      // max_abs_residual <= tolerance
    bool asserted = true;   // diagnostics are reported, never gated
};

std::string residual_reports_to_json(const std::vector<ResidualReport>& reports);

// Convolution form of the zero-order barrier price: the two integrals of the
// extended terminal data against the Gaussian Mellin kernel over [B, K] and
// [B^2/K, B]. Agrees with p0_dop up to quadrature tolerance.
double mellin_p0_dop_quadrature(const PricingInputs& inp);

// Convolution form of the zero-order lookback price in reduced coordinates
// u = s/z: terminal data (1 - xi) on (0, 1) and (xi/k1)(1 - xi^{-k1}) on
// (1, inf), integrated against the same kernel. Returns Q0; the caller
// compares z * Q0 with p0_lookback. tau = T - t.
double mellin_q0_lookback_quadrature(double tau, double u, const EffectiveParams& eff,
                                     double r);

struct ResidualGridSpec {
    std::vector<double> s_values;
    std::vector<double> tau_values;
    double ds_rel = 1e-3;    // relative spot step
    double dt_abs = 1e-5;    // absolute time step
    bool richardson = true;  // one extrapolation level on 5-point stencils
    int stencil = 5;         // 3 or 5 point central stencils
    double domain_lo = 0.0;  // grid points must keep clear of these
    double domain_hi = 0.0;  // (0 disables the check)
};

// Max |P_t + r s P_s + (1/2) <f^2> s^2 P_ss - r P| / scale over the grid,
// with derivatives taken by central finite differences of price(tau, s).
ResidualReport pde_residual_p0(const std::function<double(double, double)>& price,
                               const EffectiveParams& eff, double r,
                               const ResidualGridSpec& grid, double scale, double tolerance);

// Same operator applied to p1(tau, s) minus the analytic source
// c1 s^3 P0''' + c2 s^2 P0'', supplied as source(tau, s).
ResidualReport pde_residual_p1(const std::function<double(double, double)>& p1,
                               const std::function<double(double, double)>& source,
                               const EffectiveParams& eff, double r,
                               const ResidualGridSpec& grid, double scale, double tolerance);

struct BoundaryTolerances {
    double p0_barrier_rel = 1e-10;  // |P0(t,B)| / K
    double p0_dz_abs = 1e-6;        // |dP0/dz (t,z,z)|
};

// Boundary-condition measurements on a t-grid. The zero-order conditions are
// asserted; the first-order ones (P1 at the barrier, dP1/dz on the diagonal)
// are reported as diagnostics only.
std::vector<ResidualReport> boundary_report(const OptionSpec& spec, const EffectiveParams& eff,
                                            double r, const CorrectionCoeffs& coeffs,
                                            double eps, double lookback_scale = 2000.0,
                                            const BoundaryTolerances& tol = {});

struct VerifyTolerances {
    double mellin_rel = 1e-6;
    double pde_p0_scaled = 1e-5;
    double pde_p1_scaled = 1e-4;
    double p0_barrier_rel = 1e-10;
    double p0_dz_abs = 1e-6;
};

struct VerifySetup {
    double strike = 2700.0;
    double barrier = 1500.0;
    double expiry = 1.0;
    double spot_scale = 2000.0;  // lookback z and representative spot
    EffectiveParams eff;
    CorrectionCoeffs coeffs;
    double r = 0.035;
    double eps = 1e-3;
    VerifyTolerances tol;
};

struct VerifyOutcome {
    std::vector<ResidualReport> reports;
    bool all_asserted_pass = true;
};

// Full verification sweep: Mellin-vs-closed-form grids, PDE residuals for
// both orders and both contracts, and the boundary measurements.
VerifyOutcome run_verification(const VerifySetup& setup);

}  // namespace svasym
