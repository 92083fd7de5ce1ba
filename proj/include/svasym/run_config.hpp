#pragma once

#include <string>
#include <vector>

#include "svasym/model.hpp"
#include "svasym/mc.hpp"
#include "svasym/verification.hpp"

namespace svasym {

// Batch-run configuration: the model section (model-core schema) plus
// contract, coefficient, MC, sweep and verification sections. Defaults are
// the bundled demo setup: r = 0.035, B = 1500, K = 2700, c1 = -0.004,
// c2 = -0.018, arctan volatility with m = -0.8, nu = 0.6, rho = -0.4.
struct RunConfig {
    SvModelParams model;
    OptionSpec contract = OptionSpec::down_and_out_put(2700.0, 1500.0, 1.0);

    // "fixed": use (c1, c2) below; "structural": derive them from the model.
    std::string coeffs_mode = "fixed";
    double c1 = -0.004;
    double c2 = -0.018;

    PathConfig mc;
    double spot = 2000.0;
    std::vector<double> s_grid;
    std::vector<double> eps_list = {0.01, 0.001, 0.0001};

    VerifyTolerances verify_tol;

    RunConfig();

    void validate() const;

    CorrectionCoeffs resolve_coeffs() const;
    EffectiveParams effective() const;

    std::string to_json() const;
    static RunConfig from_json(const std::string& text);
    static RunConfig load(const std::string& path);
};

// "start:stop:step" -> ordered grid (inclusive of stop when it lands on a
// step within rounding).
std::vector<double> parse_grid_spec(const std::string& spec);

// Deterministic shortest-round-trip double formatting shared by the CLI
// writers; output is byte-stable across runs.
std::string format_double(double v);

}  // namespace svasym
