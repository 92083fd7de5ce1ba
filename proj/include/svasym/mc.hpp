#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "svasym/model.hpp"

namespace svasym {

struct PathConfig {
    std::int64_t n_paths = 100'000;
    std::int64_t n_steps = 1'000;  // steps over [0, T]
    std::uint64_t seed = 1;
    bool barrier_bridge = true;
    bool antithetic = true;
    int n_threads = 0;  // 0: hardware concurrency

    void validate() const;
};

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t n_effective = 0;  // samples after antithetic pairing
    double knocked_out_fraction = 0.0;
    std::int64_t n_paths = 0;
    std::int64_t n_steps = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

// JSON record {price, stderr, n_paths, n_steps, seed, knocked_out_fraction}.
std::string mc_estimate_to_json(const McEstimate& est);

// Step-size diagnostic for the explicit OU update: empty when the step
// resolves the mean-reversion rate, otherwise a human-readable warning.
std::vector<std::string> stiffness_diagnostics(const SvModelParams& model, double T,
                                               std::int64_t n_steps);

struct PathStats {
    double terminal_s = 0.0;
    double min_s = 0.0;
    double max_s = 0.0;
};

// Discounted price of max(K - S_T, 0) 1{min S > B}; with barrier_bridge the
// per-step crossing probability exp(-2 ln(S_i/B) ln(S_{i+1}/B) / (f^2(Y_i) dt))
// is applied as a survival weight. s0 <= B prices to exactly (0, 0).
McEstimate price_dop_mc(const SvModelParams& model, const DownAndOutPut& contract, double s0,
                        double y0, double T, const PathConfig& cfg);

// Discounted price of (running max - S_T), the max taken over the sampled
// skeleton and seeded at z0 = s0.
McEstimate price_lookback_mc(const SvModelParams& model, double s0, double y0, double T,
                             const PathConfig& cfg);

namespace detail {

// splitmix64; used to expand (seed, stream) into xoshiro state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with per-stream seeding: path j's stream depends only on
// (seed, j), never on scheduling.
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t sm = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
        for (auto& word : s_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Marsaglia polar method; one call yields a pair of standard normals.
    void next_normal_pair(double& z1, double& z2) {
        double u, v, s;
        do {
            u = 2.0 * next_uniform() - 1.0;
            v = 2.0 * next_uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double mult = std::sqrt(-2.0 * std::log(s) / s);
        z1 = u * mult;
        z2 = v * mult;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace detail

// Euler-Maruyama simulation of the joint (S, Y) system: log-Euler for S
// (lognormal step with f frozen at the step start, so S stays positive),
// plain Euler for Y, correlation via W^y = rho W^s + sqrt(1-rho^2) W^perp.
// The observer is called per step as observer(path, step, t, s, y); path
// statistics (terminal, running min/max of S) are returned per path.
// Antithetic pairing draws one normal stream per pair, negated for the odd
// member.
template <class Observer>
std::vector<PathStats> simulate_paths(const SvModelParams& model, double s0, double y0,
                                      double T, const PathConfig& cfg, Observer&& observer) {
    cfg.validate();
    model.validate();
    const double dt = T / static_cast<double>(cfg.n_steps);
    const double sqdt = std::sqrt(dt);
    const double ou_pull = dt / model.eps;
    const double ou_sig = std::sqrt(2.0) * model.nu / std::sqrt(model.eps) * sqdt;
    const double lam_coeff = std::sqrt(2.0) * model.nu / std::sqrt(model.eps) * dt;
    const double rho = model.rho;
    const double rho_c = std::sqrt(1.0 - rho * rho);

    const std::int64_t members_per_stream = cfg.antithetic ? 2 : 1;
    const std::int64_t n_streams = cfg.n_paths / members_per_stream;

    std::vector<PathStats> stats(static_cast<std::size_t>(n_streams * members_per_stream));
    const double x0 = std::log(s0);
    for (std::int64_t stream = 0; stream < n_streams; ++stream) {
        detail::Rng rng(cfg.seed, static_cast<std::uint64_t>(stream));
        double x[2] = {x0, x0};
        double y[2] = {y0, y0};
        double xmin[2] = {x0, x0};
        double xmax[2] = {x0, x0};
        for (std::int64_t step = 0; step < cfg.n_steps; ++step) {
            double z1, z2;
            rng.next_normal_pair(z1, z2);
            for (int mem = 0; mem < members_per_stream; ++mem) {
                const double sgn = (mem == 0) ? 1.0 : -1.0;
                const double fy = model.f(y[mem]);
                x[mem] += (model.r - 0.5 * fy * fy) * dt + fy * sqdt * sgn * z1;
                y[mem] += ou_pull * (model.m - y[mem]) - lam_coeff * model.lambda(y[mem]) +
                          ou_sig * (rho * sgn * z1 + rho_c * sgn * z2);
                xmin[mem] = std::min(xmin[mem], x[mem]);
                xmax[mem] = std::max(xmax[mem], x[mem]);
                observer(stream * members_per_stream + mem, step, (step + 1) * dt,
                         std::exp(x[mem]), y[mem]);
            }
        }
        for (int mem = 0; mem < members_per_stream; ++mem) {
            stats[static_cast<std::size_t>(stream * members_per_stream + mem)] = {
                std::exp(x[mem]), std::exp(xmin[mem]), std::exp(xmax[mem])};
        }
    }
    return stats;
}

}  // namespace svasym
