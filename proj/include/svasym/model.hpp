#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace svasym {

// Volatility map f(y) applied to the hidden OU state. Built-in forms:
//   arctan  : f(y) = 0.35*(atan(y) + pi/2)/pi + 0.05, range (0.05, 0.40)
//   const   : f(y) = sigma
//   custom  : arbitrary callable with declared bounds (test/research use)
class VolFunction {
  public:
    enum class Form { Arctan, Constant, Custom };

    static VolFunction arctan_form();
    static VolFunction constant(double sigma);
    static VolFunction custom(std::function<double(double)> fn, double lower, double upper);

    double operator()(double y) const { return fn_(y); }

    Form form() const { return form_; }
    bool is_constant() const { return constant_.has_value(); }
    double constant_value() const { return constant_.value(); }
    double lower_bound() const { return lower_; }
    double upper_bound() const { return upper_; }

    // Config encoding: "arctan" or "const:<sigma>".
    std::string to_config() const;
    static VolFunction from_config(const std::string& text);

  private:
    VolFunction(std::function<double(double)> fn, double lo, double hi,
                std::optional<double> constant, std::string config, Form form)
        : fn_(std::move(fn)), lower_(lo), upper_(hi), constant_(constant),
          config_(std::move(config)), form_(form) {}

    std::function<double(double)> fn_;
    double lower_ = 0.0;
    double upper_ = 0.0;
    std::optional<double> constant_;
    std::string config_;
    Form form_ = Form::Custom;
};

// Combined market price of risk Lambda(y).
using MarketPriceFn = std::function<double(double)>;

inline MarketPriceFn zero_market_price() {
    return [](double) { return 0.0; };
}

// Risk-neutral model: dS = r S dt + f(Y) S dW, Y an OU process with rate
// 1/eps, level m, stationary std dev nu, and market-price-of-risk drift
// -sqrt(2) nu Lambda(Y)/sqrt(eps); W-drivers correlated through rho.
struct SvModelParams {
    double r = 0.0;
    double eps = 1e-3;
    double m = 0.0;
    double nu = 1.0;
    double rho = 0.0;
    VolFunction f = VolFunction::arctan_form();
    MarketPriceFn lambda = zero_market_price();
    bool lambda_is_zero = true;

    void validate() const;
};

// Constants derived from the invariant distribution of Y.
struct EffectiveParams {
    double f2bar = 0.0;      // <f^2>, 1/year
    double k1 = 0.0;         // 2r/<f^2>
    double sigma_eff = 0.0;  // sqrt(<f^2>)

    static EffectiveParams from_f2bar(double f2bar, double r);
};

enum class CoeffProvenance { Calibrated, Structural };

// Source coefficients of the first-order pricing correction.
struct CorrectionCoeffs {
    double c1 = 0.0;
    double c2 = 0.0;
    CoeffProvenance provenance = CoeffProvenance::Calibrated;
};

struct DownAndOutPut {
    double strike = 0.0;
    double barrier = 0.0;
};

struct FloatingStrikeLookbackPut {};

struct OptionSpec {
    std::variant<DownAndOutPut, FloatingStrikeLookbackPut> kind;
    double expiry = 0.0;  // T, years

    bool is_barrier() const { return std::holds_alternative<DownAndOutPut>(kind); }
    const DownAndOutPut& barrier() const { return std::get<DownAndOutPut>(kind); }

    void validate() const;

    static OptionSpec down_and_out_put(double strike, double barrier, double expiry);
    static OptionSpec lookback_put(double expiry);
};

// Flat key-value (JSON object) encoding of the model:
//   {r, eps, m, nu, rho, f: "arctan"|"const:<sigma>", lambda: "zero"}
std::string model_to_json(const SvModelParams& model);
SvModelParams model_from_json(const std::string& json_text);

}  // namespace svasym
