#include "svasym/run_config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "svasym/averaging.hpp"

namespace svasym {

RunConfig::RunConfig() {
    model.r = 0.035;
    model.eps = 0.001;
    model.m = -0.8;
    model.nu = 0.6;
    model.rho = -0.4;
    model.f = VolFunction::arctan_form();
    model.lambda = zero_market_price();
    model.lambda_is_zero = true;

    mc.n_paths = 200'000;
    mc.n_steps = 4'000;
    mc.seed = 1;

    for (double s = 1600.0; s <= 2700.0 + 1e-9; s += 100.0) s_grid.push_back(s);
}

void RunConfig::validate() const {
    model.validate();
    contract.validate();
    mc.validate();
    if (coeffs_mode != "fixed" && coeffs_mode != "structural")
        throw std::invalid_argument("RunConfig: coeffs.mode must be \"fixed\" or \"structural\"");
    if (s_grid.empty()) throw std::invalid_argument("RunConfig: sweep.s_grid must be non-empty");
    for (std::size_t i = 1; i < s_grid.size(); ++i) {
        if (!(s_grid[i] > s_grid[i - 1]))
            throw std::invalid_argument("RunConfig: sweep.s_grid must be strictly increasing");
    }
    if (eps_list.empty())
        throw std::invalid_argument("RunConfig: sweep.eps_list must be non-empty");
    if (!(spot > 0.0)) throw std::invalid_argument("RunConfig: spot must be > 0");
}

CorrectionCoeffs RunConfig::resolve_coeffs() const {
    if (coeffs_mode == "structural") return structural_c1_c2(model);
    return CorrectionCoeffs{c1, c2, CoeffProvenance::Calibrated};
}

EffectiveParams RunConfig::effective() const { return effective_params(model); }

std::string RunConfig::to_json() const {
    nlohmann::json j;
    j["model"] = nlohmann::json::parse(model_to_json(model));
    nlohmann::json c;
    if (contract.is_barrier()) {
        c["kind"] = "dop";
        c["strike"] = contract.barrier().strike;
        c["barrier"] = contract.barrier().barrier;
    } else {
        c["kind"] = "lookback";
    }
    c["expiry"] = contract.expiry;
    j["contract"] = c;
    j["coeffs"] = {{"mode", coeffs_mode}, {"c1", c1}, {"c2", c2}};
    j["mc"] = {{"n_paths", mc.n_paths},       {"n_steps", mc.n_steps},
               {"seed", mc.seed},             {"barrier_bridge", mc.barrier_bridge},
               {"antithetic", mc.antithetic}, {"threads", mc.n_threads}};
    j["spot"] = spot;
    j["sweep"] = {{"s_grid", s_grid}, {"eps_list", eps_list}};
    j["verify"] = {{"mellin_rel_tol", verify_tol.mellin_rel},
                   {"pde_p0_tol", verify_tol.pde_p0_scaled},
                   {"pde_p1_tol", verify_tol.pde_p1_scaled},
                   {"p0_boundary_tol", verify_tol.p0_barrier_rel},
                   {"dz_tol", verify_tol.p0_dz_abs}};
    return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("RunConfig: invalid JSON: ") + e.what());
    }
    RunConfig cfg;
    if (j.contains("model")) cfg.model = model_from_json(j["model"].dump());
    if (j.contains("contract")) {
        const auto& c = j["contract"];
        const auto kind = c.value("kind", std::string("dop"));
        const double T = c.value("expiry", 1.0);
        if (kind == "dop") {
            cfg.contract = OptionSpec::down_and_out_put(c.value("strike", 2700.0),
                                                        c.value("barrier", 1500.0), T);
        } else if (kind == "lookback") {
            cfg.contract = OptionSpec::lookback_put(T);
        } else {
            throw std::invalid_argument("RunConfig: contract.kind must be \"dop\" or \"lookback\"");
        }
    }
    if (j.contains("coeffs")) {
        const auto& c = j["coeffs"];
        cfg.coeffs_mode = c.value("mode", cfg.coeffs_mode);
        cfg.c1 = c.value("c1", cfg.c1);
        cfg.c2 = c.value("c2", cfg.c2);
    }
    if (j.contains("mc")) {
        const auto& c = j["mc"];
        cfg.mc.n_paths = c.value("n_paths", cfg.mc.n_paths);
        cfg.mc.n_steps = c.value("n_steps", cfg.mc.n_steps);
        cfg.mc.seed = c.value("seed", cfg.mc.seed);
        cfg.mc.barrier_bridge = c.value("barrier_bridge", cfg.mc.barrier_bridge);
        cfg.mc.antithetic = c.value("antithetic", cfg.mc.antithetic);
        cfg.mc.n_threads = c.value("threads", cfg.mc.n_threads);
    }
    cfg.spot = j.value("spot", cfg.spot);
    if (j.contains("sweep")) {
        const auto& c = j["sweep"];
        if (c.contains("s_grid")) {
            if (c["s_grid"].is_string()) {
                cfg.s_grid = parse_grid_spec(c["s_grid"].get<std::string>());
            } else {
                cfg.s_grid = c["s_grid"].get<std::vector<double>>();
            }
        }
        if (c.contains("eps_list")) cfg.eps_list = c["eps_list"].get<std::vector<double>>();
    }
    if (j.contains("verify")) {
        const auto& c = j["verify"];
        cfg.verify_tol.mellin_rel = c.value("mellin_rel_tol", cfg.verify_tol.mellin_rel);
        cfg.verify_tol.pde_p0_scaled = c.value("pde_p0_tol", cfg.verify_tol.pde_p0_scaled);
        cfg.verify_tol.pde_p1_scaled = c.value("pde_p1_tol", cfg.verify_tol.pde_p1_scaled);
        cfg.verify_tol.p0_barrier_rel = c.value("p0_boundary_tol", cfg.verify_tol.p0_barrier_rel);
        cfg.verify_tol.p0_dz_abs = c.value("dz_tol", cfg.verify_tol.p0_dz_abs);
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("RunConfig: cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::vector<double> parse_grid_spec(const std::string& spec) {
    double start = 0.0, stop = 0.0, step = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream in(spec);
    if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0.0))
        throw std::invalid_argument("grid spec must be start:stop:step, got \"" + spec + "\"");
    if (!(stop >= start)) throw std::invalid_argument("grid spec: stop must be >= start");
    std::vector<double> grid;
    for (double v = start; v <= stop + 0.5 * step * 1e-9 + 1e-12 * std::abs(stop); v += step)
        grid.push_back(v);
    return grid;
}

std::string format_double(double v) {
    char buf[40];
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // trim to the shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char probe[40];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
        if (std::strtod(probe, nullptr) == v) return probe;
    }
    return buf;
}

}  // namespace svasym
