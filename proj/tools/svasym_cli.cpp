// Batch front end: price, sensitivity sweeps, Monte-Carlo comparison,
// smile calibration and the verification suite, driven by a JSON config.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "svasym/averaging.hpp"
#include "svasym/calibration.hpp"
#include "svasym/closed_form.hpp"
#include "svasym/mc.hpp"
#include "svasym/run_config.hpp"
#include "svasym/verification.hpp"

namespace {

using namespace svasym;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::vector<double> eps_override;
    std::string s_grid_spec;
};

RunConfig load_config(const CommonOpts& opts) {
    RunConfig cfg = opts.config_path.empty() ? RunConfig() : RunConfig::load(opts.config_path);
    if (opts.seed) cfg.mc.seed = *opts.seed;
    if (!opts.eps_override.empty()) cfg.eps_list = opts.eps_override;
    if (!opts.s_grid_spec.empty()) cfg.s_grid = parse_grid_spec(opts.s_grid_spec);
    cfg.validate();
    return cfg;
}

void write_output(const CommonOpts& opts, const std::string& text) {
    if (opts.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + opts.out_path);
    out << text;
}

struct Row {
    std::vector<std::pair<std::string, std::string>> cells;
    void add(const std::string& key, double v) { cells.emplace_back(key, format_double(v)); }
    void add(const std::string& key, const std::string& v) { cells.emplace_back(key, v); }
};

std::string render(const std::vector<Row>& rows, const std::string& format) {
    if (rows.empty()) return "";
    std::ostringstream os;
    if (format == "csv") {
        for (std::size_t i = 0; i < rows[0].cells.size(); ++i) {
            os << (i ? "," : "") << rows[0].cells[i].first;
        }
        os << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.cells.size(); ++i) {
                os << (i ? "," : "") << row.cells[i].second;
            }
            os << "\n";
        }
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& row : rows) {
            nlohmann::json j;
            for (const auto& [k, v] : row.cells) {
                try {
                    std::size_t used = 0;
                    const double num = std::stod(v, &used);
                    if (used == v.size()) { j[k] = num; continue; }
                } catch (...) {}
                j[k] = v;
            }
            arr.push_back(j);
        }
        os << arr.dump(2) << "\n";
    }
    return os.str();
}

PricingInputs make_inputs(const RunConfig& cfg, const OptionSpec& spec, double s, double eps) {
    PricingInputs inp;
    inp.t = 0.0;
    inp.s = s;
    inp.z = s;  // valuation at inception: running max equals spot
    inp.spec = spec;
    inp.eff = cfg.effective();
    inp.coeffs = cfg.resolve_coeffs();
    inp.r = cfg.model.r;
    inp.eps = eps;
    return inp;
}

int cmd_price(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts);
    const double eps = cfg.model.eps;
    std::vector<Row> rows;
    for (const double s : cfg.s_grid) {
        const auto breakdown = approx_price(make_inputs(cfg, cfg.contract, s, eps));
        Row row;
        row.add("s", s);
        row.add("p0", breakdown.p0);
        row.add("p1", breakdown.p1);
        row.add("sqrt_eps_p1", breakdown.approx - breakdown.p0);
        row.add("approx", breakdown.approx);
        row.add("knocked_out", breakdown.knocked_out ? "1" : "0");
        rows.push_back(row);
    }
    write_output(opts, render(rows, opts.format));
    return 0;
}

int cmd_sensitivity(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts);
    // Long format over (kind, eps, s); the lookback sweep shares the expiry.
    std::vector<OptionSpec> specs;
    if (cfg.contract.is_barrier()) specs.push_back(cfg.contract);
    specs.push_back(OptionSpec::lookback_put(cfg.contract.expiry));
    std::vector<Row> rows;
    for (const auto& spec : specs) {
        for (const double eps : cfg.eps_list) {
            for (const double s : cfg.s_grid) {
                const auto breakdown = approx_price(make_inputs(cfg, spec, s, eps));
                Row row;
                row.add("kind", spec.is_barrier() ? std::string("dop") : std::string("lookback"));
                row.add("eps", eps);
                row.add("s", s);
                row.add("sqrt_eps_p1", breakdown.approx - breakdown.p0);
                row.add("approx", breakdown.approx);
                rows.push_back(row);
            }
        }
    }
    write_output(opts, render(rows, opts.format));
    return 0;
}

int cmd_mc_compare(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts);
    // Structural coefficients keep the approximation and the simulation on
    // one and the same model.
    const CorrectionCoeffs coeffs = structural_c1_c2(cfg.model);
    const EffectiveParams eff = cfg.effective();
    std::vector<Row> rows;
    for (const double eps : cfg.eps_list) {
        SvModelParams model = cfg.model;
        model.eps = eps;
        for (const double s : cfg.s_grid) {
            PricingInputs inp = make_inputs(cfg, cfg.contract, s, eps);
            inp.eff = eff;
            inp.coeffs = coeffs;
            const auto breakdown = approx_price(inp);
            McEstimate est;
            if (cfg.contract.is_barrier()) {
                est = price_dop_mc(model, cfg.contract.barrier(), s, model.m,
                                   cfg.contract.expiry, cfg.mc);
            } else {
                est = price_lookback_mc(model, s, model.m, cfg.contract.expiry, cfg.mc);
            }
            Row row;
            row.add("s", s);
            row.add("eps", eps);
            row.add("approx", breakdown.approx);
            row.add("mc_mean", est.mean);
            row.add("mc_stderr", est.stderr_);
            row.add("z_score", est.stderr_ > 0.0 ? (breakdown.approx - est.mean) / est.stderr_
                                                 : 0.0);
            rows.push_back(row);
            for (const auto& w : est.warnings) std::cerr << "warning: " << w << "\n";
        }
    }
    write_output(opts, render(rows, opts.format));
    return 0;
}

int cmd_calibrate(const CommonOpts& opts, const std::string& smile_path) {
    const RunConfig cfg = load_config(opts);
    const auto points = read_smile_csv(smile_path);
    const auto fit = fit_smile(points);
    const auto eff = cfg.effective();
    const auto coeffs = c1_c2_from_ab(fit.a, fit.b, eff, cfg.model.r);
    nlohmann::json j;
    j["a"] = fit.a;
    j["b"] = fit.b;
    j["residual_rms"] = fit.residual_rms;
    j["n_points"] = fit.n_points;
    j["c1"] = coeffs.c1;
    j["c2"] = coeffs.c2;
    write_output(opts, j.dump(2) + "\n");
    return 0;
}

int cmd_verify(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts);
    VerifySetup setup;
    if (cfg.contract.is_barrier()) {
        setup.strike = cfg.contract.barrier().strike;
        setup.barrier = cfg.contract.barrier().barrier;
    }
    setup.expiry = cfg.contract.expiry;
    setup.spot_scale = cfg.spot;
    setup.eff = cfg.effective();
    setup.coeffs = cfg.resolve_coeffs();
    setup.r = cfg.model.r;
    setup.eps = cfg.model.eps;
    setup.tol = cfg.verify_tol;
    const auto outcome = run_verification(setup);
    write_output(opts, residual_reports_to_json(outcome.reports) + "\n");
    if (!outcome.all_asserted_pass) {
        for (const auto& rep : outcome.reports) {
            if (rep.asserted && !rep.pass)
                std::cerr << "verify: FAILED " << rep.name << " (residual "
                          << format_double(rep.max_abs_residual) << " > tolerance "
                          << format_double(rep.tolerance) << ")\n";
        }
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pricing toolkit for down-and-out and floating-strike lookback puts under "
                 "fast mean-reverting stochastic volatility"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string smile_path;
    app.add_option("--config", opts.config_path, "JSON config file (bundled defaults if omitted)");
    app.add_option("--out", opts.out_path, "output file (stdout if omitted)");
    app.add_option("--format", opts.format, "output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", opts.seed, "override MC seed");
    app.add_option("--eps", opts.eps_override, "override the epsilon list");
    app.add_option("--s-grid", opts.s_grid_spec, "spot grid start:stop:step");

    auto* price = app.add_subcommand("price", "closed-form price breakdown over the spot grid");
    auto* sens = app.add_subcommand("sensitivity",
                                    "sqrt(eps) P1 and approx price over (kind, eps, s)");
    auto* mcc = app.add_subcommand("mc-compare", "approximation vs Monte-Carlo z-scores");
    auto* cal = app.add_subcommand("calibrate", "affine smile fit and (c1, c2) from a smile CSV");
    cal->add_option("smile", smile_path, "CSV with header strike,expiry,spot,t,implied_vol")
        ->required();
    auto* ver = app.add_subcommand("verify", "quadrature, PDE-residual and boundary checks");

    // global flags remain valid after the subcommand name
    for (auto* sub : {price, sens, mcc, cal, ver}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (price->parsed()) return cmd_price(opts);
        if (sens->parsed()) return cmd_sensitivity(opts);
        if (mcc->parsed()) return cmd_mc_compare(opts);
        if (cal->parsed()) return cmd_calibrate(opts, smile_path);
        if (ver->parsed()) return cmd_verify(opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
