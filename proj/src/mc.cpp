#include "svasym/mc.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace svasym {

void PathConfig::validate() const {
    if (n_paths < 2) throw std::invalid_argument("PathConfig: n_paths must be >= 2");
    if (n_steps < 1) throw std::invalid_argument("PathConfig: n_steps must be >= 1");
    if (antithetic && (n_paths % 2) != 0)
        throw std::invalid_argument("PathConfig: antithetic pairing needs an even n_paths");
}

std::string mc_estimate_to_json(const McEstimate& est) {
    nlohmann::json j;
    j["price"] = est.mean;
    j["stderr"] = est.stderr_;
    j["n_paths"] = est.n_paths;
    j["n_steps"] = est.n_steps;
    j["seed"] = est.seed;
    j["knocked_out_fraction"] = est.knocked_out_fraction;
    if (!est.warnings.empty()) j["warnings"] = est.warnings;
    return j.dump();
}

std::vector<std::string> stiffness_diagnostics(const SvModelParams& model, double T,
                                               std::int64_t n_steps) {
    std::vector<std::string> out;
    const double dt = T / static_cast<double>(n_steps);
    std::ostringstream msg;
    if (dt > model.eps) {
        msg << "OU step dt = " << dt << " exceeds eps = " << model.eps
            << "; the explicit update is unstable";
        out.push_back(msg.str());
    } else if (model.eps <= 1e-3 && dt > model.eps / 4.0) {
        msg << "OU step dt = " << dt << " exceeds eps/4 = " << model.eps / 4.0
            << "; invariant-distribution sampling will be biased";
        out.push_back(msg.str());
    }
    return out;
}

namespace {

using detail::Rng;

struct ArctanVol {
    double operator()(double y) const {
        return 0.35 * (std::atan(y) + 1.5707963267948966) / 3.141592653589793 + 0.05;
    }
};

struct ConstantVol {
    double sigma;
    double operator()(double) const { return sigma; }
};

struct GenericVol {
    const VolFunction* f;
    double operator()(double y) const { return (*f)(y); }
};

struct StepCoeffs {
    double r, m, dt, sqdt, ou_pull, ou_sig, lam_coeff, rho, rho_c;
    const MarketPriceFn* lambda;
    bool lambda_zero;
};

enum class Payoff { Barrier, Lookback };

struct ChunkSums {
    double sum = 0.0;
    double sumsq = 0.0;
    std::int64_t knocked = 0;
};

// One stream = one antithetic pair (or a single path when pairing is off).
// Returns the per-member discounted payoffs.
template <class Vol>
void run_stream(const StepCoeffs& cf, const Vol& vol, Payoff payoff, double x0, double y0,
                std::int64_t n_steps, double log_barrier, double strike, double discount,
                bool bridge, int members, Rng rng, double* pay, bool* knocked_flag) {
    double x[2] = {x0, x0};
    double y[2] = {y0, y0};
    double xmax[2] = {x0, x0};
    double survival[2] = {1.0, 1.0};
    bool alive[2] = {true, true};
    for (std::int64_t step = 0; step < n_steps; ++step) {
        double z1, z2;
        rng.next_normal_pair(z1, z2);
        for (int mem = 0; mem < members; ++mem) {
            const double sgn = (mem == 0) ? 1.0 : -1.0;
            const double fy = vol(y[mem]);
            const double var = fy * fy;
            const double xprev = x[mem];
            x[mem] += (cf.r - 0.5 * var) * cf.dt + fy * cf.sqdt * sgn * z1;
            double drift = cf.ou_pull * (cf.m - y[mem]);
            if (!cf.lambda_zero) drift -= cf.lam_coeff * (*cf.lambda)(y[mem]);
            y[mem] += drift + cf.ou_sig * (cf.rho * sgn * z1 + cf.rho_c * sgn * z2);
            if (payoff == Payoff::Barrier) {
                if (alive[mem]) {
                    if (x[mem] <= log_barrier) {
                        alive[mem] = false;
                        survival[mem] = 0.0;
                    } else if (bridge) {
                        const double a = xprev - log_barrier;
                        const double b = x[mem] - log_barrier;
                        survival[mem] *= 1.0 - std::exp(-2.0 * a * b / (var * cf.dt));
                    }
                }
            } else {
                xmax[mem] = std::max(xmax[mem], x[mem]);
            }
        }
    }
    for (int mem = 0; mem < members; ++mem) {
        const double st = std::exp(x[mem]);
        if (payoff == Payoff::Barrier) {
            pay[mem] = discount * std::max(strike - st, 0.0) * survival[mem];
            knocked_flag[mem] = !alive[mem];
        } else {
            pay[mem] = discount * (std::exp(xmax[mem]) - st);
            knocked_flag[mem] = false;
        }
    }
}

template <class Vol>
void run_chunks(const StepCoeffs& cf, const Vol& vol, Payoff payoff, double x0, double y0,
                std::int64_t n_steps, double log_barrier, double strike, double discount,
                bool bridge, int members, std::uint64_t seed, std::int64_t n_streams,
                std::int64_t chunk_size, int n_threads, std::vector<ChunkSums>& partials) {
    std::atomic<std::int64_t> next_chunk{0};
    const std::int64_t n_chunks = static_cast<std::int64_t>(partials.size());
    auto worker = [&]() {
        for (;;) {
            const std::int64_t c = next_chunk.fetch_add(1);
            if (c >= n_chunks) return;
            ChunkSums sums;
            const std::int64_t lo = c * chunk_size;
            const std::int64_t hi = std::min(lo + chunk_size, n_streams);
            for (std::int64_t stream = lo; stream < hi; ++stream) {
                double pay[2];
                bool kn[2];
                run_stream(cf, vol, payoff, x0, y0, n_steps, log_barrier, strike, discount,
                           bridge, members, Rng(seed, static_cast<std::uint64_t>(stream)), pay,
                           kn);
                double sample = pay[0];
                sums.knocked += kn[0] ? 1 : 0;
                if (members == 2) {
                    sample = 0.5 * (pay[0] + pay[1]);
                    sums.knocked += kn[1] ? 1 : 0;
                }
                sums.sum += sample;
                sums.sumsq += sample * sample;
            }
            partials[static_cast<std::size_t>(c)] = sums;
        }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

McEstimate run_pricing(const SvModelParams& model, Payoff payoff, double s0, double y0,
                       double T, const PathConfig& cfg, double strike, double barrier) {
    cfg.validate();
    model.validate();

    McEstimate est;
    est.n_paths = cfg.n_paths;
    est.n_steps = cfg.n_steps;
    est.seed = cfg.seed;
    est.warnings = stiffness_diagnostics(model, T, cfg.n_steps);

    if (payoff == Payoff::Barrier && s0 <= barrier) {
        est.mean = 0.0;
        est.stderr_ = 0.0;
        est.n_effective = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
        est.knocked_out_fraction = 1.0;
        return est;
    }

    const double dt = T / static_cast<double>(cfg.n_steps);
    StepCoeffs cf;
    cf.r = model.r;
    cf.m = model.m;
    cf.dt = dt;
    cf.sqdt = std::sqrt(dt);
    cf.ou_pull = dt / model.eps;
    cf.ou_sig = std::sqrt(2.0) * model.nu / std::sqrt(model.eps) * cf.sqdt;
    cf.lam_coeff = std::sqrt(2.0) * model.nu / std::sqrt(model.eps) * dt;
    cf.rho = model.rho;
    cf.rho_c = std::sqrt(1.0 - model.rho * model.rho);
    cf.lambda = &model.lambda;
    cf.lambda_zero = model.lambda_is_zero;

    const int members = cfg.antithetic ? 2 : 1;
    const std::int64_t n_streams = cfg.n_paths / members;
    const std::int64_t chunk_size = 1024;
    const std::int64_t n_chunks = (n_streams + chunk_size - 1) / chunk_size;
    std::vector<ChunkSums> partials(static_cast<std::size_t>(n_chunks));

    int n_threads = cfg.n_threads > 0 ? cfg.n_threads
                                      : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(n_chunks)));

    const double x0 = std::log(s0);
    const double lb = payoff == Payoff::Barrier ? std::log(barrier) : 0.0;
    const double discount = std::exp(-model.r * T);

    switch (model.f.form()) {
        case VolFunction::Form::Arctan:
            run_chunks(cf, ArctanVol{}, payoff, x0, y0, cfg.n_steps, lb, strike, discount,
                       cfg.barrier_bridge, members, cfg.seed, n_streams, chunk_size, n_threads,
                       partials);
            break;
        case VolFunction::Form::Constant:
            run_chunks(cf, ConstantVol{model.f.constant_value()}, payoff, x0, y0, cfg.n_steps,
                       lb, strike, discount, cfg.barrier_bridge, members, cfg.seed, n_streams,
                       chunk_size, n_threads, partials);
            break;
        case VolFunction::Form::Custom:
            run_chunks(cf, GenericVol{&model.f}, payoff, x0, y0, cfg.n_steps, lb, strike,
                       discount, cfg.barrier_bridge, members, cfg.seed, n_streams, chunk_size,
                       n_threads, partials);
            break;
    }

    // Deterministic merge in chunk order, independent of thread scheduling.
    double sum = 0.0, sumsq = 0.0;
    std::int64_t knocked = 0;
    for (const auto& p : partials) {
        sum += p.sum;
        sumsq += p.sumsq;
        knocked += p.knocked;
    }
    const double n = static_cast<double>(n_streams);
    est.mean = sum / n;
    const double var = n > 1.0 ? std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0)) : 0.0;
    est.stderr_ = std::sqrt(var / n);
    est.n_effective = n_streams;
    est.knocked_out_fraction =
        static_cast<double>(knocked) / static_cast<double>(n_streams * members);
    return est;
}

}  // namespace

McEstimate price_dop_mc(const SvModelParams& model, const DownAndOutPut& contract, double s0,
                        double y0, double T, const PathConfig& cfg) {
    if (!(contract.barrier > 0.0 && contract.barrier < contract.strike))
        throw std::invalid_argument("price_dop_mc: requires 0 < barrier < strike");
    return run_pricing(model, Payoff::Barrier, s0, y0, T, cfg, contract.strike,
                       contract.barrier);
}

McEstimate price_lookback_mc(const SvModelParams& model, double s0, double y0, double T,
                             const PathConfig& cfg) {
    if (!(s0 > 0.0)) throw std::invalid_argument("price_lookback_mc: s0 must be > 0");
    return run_pricing(model, Payoff::Lookback, s0, y0, T, cfg, 0.0, 0.0);
}

}  // namespace svasym
