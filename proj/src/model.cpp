#include "svasym/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace svasym {

VolFunction VolFunction::arctan_form() {
    auto fn = [](double y) {
        return 0.35 * (std::atan(y) + std::numbers::pi / 2.0) / std::numbers::pi + 0.05;
    };
    return VolFunction(fn, 0.05, 0.40, std::nullopt, "arctan", Form::Arctan);
}

VolFunction VolFunction::constant(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("VolFunction::constant: sigma must be > 0");
    std::ostringstream cfg;
    cfg << "const:" << sigma;
    return VolFunction([sigma](double) { return sigma; }, sigma, sigma, sigma, cfg.str(),
                       Form::Constant);
}

VolFunction VolFunction::custom(std::function<double(double)> fn, double lower, double upper) {
    if (!(lower <= upper))
        throw std::invalid_argument("VolFunction::custom: bounds out of order");
    return VolFunction(std::move(fn), lower, upper, std::nullopt, "custom", Form::Custom);
}

std::string VolFunction::to_config() const {
    if (config_ == "custom")
        throw std::invalid_argument("VolFunction: custom callables are not serializable");
    return config_;
}

VolFunction VolFunction::from_config(const std::string& text) {
    if (text == "arctan") return arctan_form();
    if (text.rfind("const:", 0) == 0) {
        const double sigma = std::stod(text.substr(6));
        return constant(sigma);
    }
    throw std::invalid_argument("VolFunction: unrecognized config \"" + text + "\"");
}

void SvModelParams::validate() const {
    if (!(eps > 0.0)) throw std::invalid_argument("SvModelParams: eps must be > 0");
    if (!(nu > 0.0)) throw std::invalid_argument("SvModelParams: nu must be > 0");
    if (!(rho > -1.0 && rho < 1.0))
        throw std::invalid_argument("SvModelParams: rho must lie in (-1, 1)");
    if (!(f.lower_bound() > 0.0))
        throw std::invalid_argument("SvModelParams: f must be bounded away from 0");
}

EffectiveParams EffectiveParams::from_f2bar(double f2bar, double r) {
    if (!(f2bar > 0.0)) throw std::invalid_argument("EffectiveParams: f2bar must be > 0");
    return {f2bar, 2.0 * r / f2bar, std::sqrt(f2bar)};
}

void OptionSpec::validate() const {
    if (!(expiry > 0.0)) throw std::invalid_argument("OptionSpec: expiry must be > 0");
    if (is_barrier()) {
        const auto& b = barrier();
        if (!(b.barrier > 0.0 && b.barrier < b.strike))
            throw std::invalid_argument("OptionSpec: requires 0 < barrier < strike");
    }
}

OptionSpec OptionSpec::down_and_out_put(double strike, double barrier, double expiry) {
    OptionSpec spec{DownAndOutPut{strike, barrier}, expiry};
    spec.validate();
    return spec;
}

OptionSpec OptionSpec::lookback_put(double expiry) {
    OptionSpec spec{FloatingStrikeLookbackPut{}, expiry};
    spec.validate();
    return spec;
}

std::string model_to_json(const SvModelParams& model) {
    nlohmann::json j;
    j["r"] = model.r;
    j["eps"] = model.eps;
    j["m"] = model.m;
    j["nu"] = model.nu;
    j["rho"] = model.rho;
    j["f"] = model.f.to_config();
    if (!model.lambda_is_zero)
        throw std::invalid_argument("model_to_json: only lambda == \"zero\" is serializable");
    j["lambda"] = "zero";
    return j.dump(2);
}

SvModelParams model_from_json(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    SvModelParams model;
    model.r = j.at("r").get<double>();
    model.eps = j.at("eps").get<double>();
    model.m = j.at("m").get<double>();
    model.nu = j.at("nu").get<double>();
    model.rho = j.at("rho").get<double>();
    model.f = VolFunction::from_config(j.at("f").get<std::string>());
    const auto lam = j.value("lambda", std::string("zero"));
    if (lam != "zero")
        throw std::invalid_argument("model_from_json: unsupported lambda \"" + lam + "\"");
    model.lambda = zero_market_price();
    model.lambda_is_zero = true;
    model.validate();
    return model;
}

}  // namespace svasym
