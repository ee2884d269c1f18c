#ifndef AMBISTOP_MC_HPP
#define AMBISTOP_MC_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "ambistop/core.hpp"
#include "ambistop/numerics.hpp"

namespace ambistop::mc {

struct SimConfig {
    double dt = 1e-3;
    long n_paths = 100000;
    double horizon = 200.0;
    std::uint64_t seed = 0;
    bool antithetic = true;

    void validate() const {
        if (!(dt > 0)) throw ConfigError("SimConfig: dt must be > 0");
        if (n_paths < 100) throw ConfigError("SimConfig: n_paths must be >= 100");
        if (!(horizon > 0)) throw ConfigError("SimConfig: horizon must be > 0");
        if (horizon / dt > 1e7) throw ConfigError("SimConfig: horizon/dt exceeds 1e7 steps");
    }
};

/// Admissible drift-distortion strategies. `theta` is the signed component
/// along the reduced coordinate; its magnitude never exceeds kappa.
struct PriorStrategy {
    enum class Kind { WorstCaseLinear, WorstCaseRadial, WorstCasePeriodic, ConstantDirection, Null };
    Kind kind = Kind::Null;
    double c = 0.0;       ///< reference point of the sign switch
    double theta = 0.0;   ///< ConstantDirection component, |theta| <= kappa
    double period = 0.0;  ///< WorstCasePeriodic

    static PriorStrategy worst_case_linear(double c) {
        return {Kind::WorstCaseLinear, c, 0.0, 0.0};
    }
    static PriorStrategy worst_case_radial(double c) {
        return {Kind::WorstCaseRadial, c, 0.0, 0.0};
    }
    static PriorStrategy worst_case_periodic(double c, double period) {
        return {Kind::WorstCasePeriodic, c, 0.0, period};
    }
    static PriorStrategy constant_direction(double theta) {
        return {Kind::ConstantDirection, 0.0, theta, 0.0};
    }
    static PriorStrategy null() { return {}; }
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_effective = 0;
    double fraction_stopped = 0.0;
    double cap_bias_bound = 0.0;
};

struct PathBatch {
    std::vector<double> terminal;  ///< reduced-state samples at the batch time
    double t = 0.0;
    double max_theta_norm = 0.0;
};

namespace detail {

constexpr int kLogicalStreams = 64;
constexpr double kPositivityEps = 1e-10;

// signed theta component for the linear reduced process at state y
inline double linear_theta(const PriorStrategy& prior, double kappa, double y) {
    switch (prior.kind) {
        case PriorStrategy::Kind::WorstCaseLinear:
            return kappa * num::sgn(y - prior.c);
        case PriorStrategy::Kind::WorstCasePeriodic: {
            // push toward the nearest per-period reference point prior.c + nP
            double k = std::round((y - prior.c) / prior.period);
            return kappa * num::sgn(y - (prior.c + k * prior.period));
        }
        case PriorStrategy::Kind::ConstantDirection:
            if (std::abs(prior.theta) > kappa + 1e-12)
                throw ConfigError("PriorStrategy: |theta| exceeds kappa");
            return prior.theta;
        case PriorStrategy::Kind::Null:
            return 0.0;
        default:
            throw ConfigError("prior not admissible for the linear case");
    }
}

// signed radial theta component in the radius chart at z = sqrt(y)
inline double radial_theta(const PriorStrategy& prior, double kappa, double z) {
    switch (prior.kind) {
        case PriorStrategy::Kind::WorstCaseRadial:
            return kappa * num::sgn(z - std::sqrt(prior.c));
        case PriorStrategy::Kind::Null:
            return 0.0;
        default:
            throw ConfigError("prior not admissible for the radial case");
    }
}

// Throwing from a worker thread would terminate the process, so admissibility
// is checked before any stream starts.
inline void validate_prior(const PriorStrategy& prior, double kappa, bool radial) {
    switch (prior.kind) {
        case PriorStrategy::Kind::Null:
            return;
        case PriorStrategy::Kind::ConstantDirection:
            if (radial)
                throw ConfigError("prior not admissible for the radial case");
            if (std::abs(prior.theta) > kappa + 1e-12)
                throw ConfigError("PriorStrategy: |theta| exceeds kappa");
            return;
        case PriorStrategy::Kind::WorstCaseLinear:
        case PriorStrategy::Kind::WorstCasePeriodic:
            if (radial)
                throw ConfigError("prior not admissible for the radial case");
            return;
        case PriorStrategy::Kind::WorstCaseRadial:
            if (!radial)
                throw ConfigError("prior not admissible for the linear case");
            return;
    }
    throw ConfigError("unknown prior strategy");
}

// Deterministic partition over fixed logical streams; `body(stream, rng)`
// accumulates into per-stream state merged in stream order.
template <class Body>
void run_streams(std::uint64_t seed, Body&& body) {
    unsigned hw = std::thread::hardware_concurrency();
    int n_threads = static_cast<int>(std::min<unsigned>(hw ? hw : 1, 16));
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) {
        threads.emplace_back([&, t] {
            for (int s = t; s < kLogicalStreams; s += n_threads) {
                std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(s));
                body(s, rng);
            }
        });
    }
    for (auto& th : threads) th.join();
}

struct Accum {
    double sum = 0.0;
    double sumsq = 0.0;
    long count = 0;
    long stopped = 0;
    double max_abs_payoff = 0.0;

    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++count;
    }
    void merge(const Accum& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        count += o.count;
        stopped += o.stopped;
        max_abs_payoff = std::max(max_abs_payoff, o.max_abs_payoff);
    }
};

inline MCEstimate finalize(const Accum& a, long total_paths, double r,
                           double horizon) {
    MCEstimate est;
    est.n_effective = a.count;
    est.mean = a.count ? a.sum / a.count : 0.0;
    if (a.count > 1) {
        double var = (a.sumsq - a.sum * a.sum / a.count) / (a.count - 1.0);
        est.std_error = std::sqrt(std::max(var, 0.0) / a.count);
    }
    est.fraction_stopped = total_paths ? double(a.stopped) / total_paths : 0.0;
    est.cap_bias_bound = std::exp(-r * horizon) * a.max_abs_payoff;
    return est;
}

inline bool in_continuation(const std::vector<std::pair<double, double>>& iv,
                            double y) {
    for (const auto& [lo, hi] : iv)
        if (y > lo && y < hi) return true;
    return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Law sampling at a fixed time (no stopping)
// ---------------------------------------------------------------------------

inline PathBatch simulate_linear(const AmbiguityParams& p, const PriorStrategy& prior,
                                 double y0, const SimConfig& cfg) {
    p.validate_linear();
    cfg.validate();
    detail::validate_prior(prior, p.kappa, false);
    long steps = static_cast<long>(std::llround(cfg.horizon / cfg.dt));
    double sdt = p.a_norm * std::sqrt(cfg.dt);
    PathBatch batch;
    batch.t = cfg.horizon;
    batch.terminal.assign(cfg.n_paths, 0.0);
    std::vector<double> max_theta(detail::kLogicalStreams, 0.0);
    detail::run_streams(cfg.seed, [&](int s, std::mt19937_64& rng) {
        std::normal_distribution<double> nd;
        long stride = cfg.antithetic ? 2 : 1;
        for (long i = s * stride; i < cfg.n_paths; i += detail::kLogicalStreams * stride) {
            double y = y0, ya = y0;
            for (long k = 0; k < steps; ++k) {
                double xi = nd(rng);
                double th = detail::linear_theta(prior, p.kappa, y);
                max_theta[s] = std::max(max_theta[s], std::abs(th));
                y += -th * p.a_norm * cfg.dt + sdt * xi;
                if (cfg.antithetic) {
                    double tha = detail::linear_theta(prior, p.kappa, ya);
                    ya += -tha * p.a_norm * cfg.dt - sdt * xi;
                }
            }
            batch.terminal[i] = y;
            if (cfg.antithetic && i + 1 < cfg.n_paths) batch.terminal[i + 1] = ya;
        }
    });
    for (double m : max_theta) batch.max_theta_norm = std::max(batch.max_theta_norm, m);
    return batch;
}

inline PathBatch simulate_radial(const AmbiguityParams& p, const PriorStrategy& prior,
                                 double y0, const SimConfig& cfg) {
    p.validate_radial();
    cfg.validate();
    detail::validate_prior(prior, p.kappa, true);
    if (!(y0 > 0)) throw ParameterError("simulate_radial: y0 must be > 0");
    long steps = static_cast<long>(std::llround(cfg.horizon / cfg.dt));
    double sdt = std::sqrt(cfg.dt);
    PathBatch batch;
    batch.t = cfg.horizon;
    batch.terminal.assign(cfg.n_paths, 0.0);
    std::vector<double> max_theta(detail::kLogicalStreams, 0.0);
    double half_bessel = 0.5 * (p.dim - 1);
    detail::run_streams(cfg.seed, [&](int s, std::mt19937_64& rng) {
        std::normal_distribution<double> nd;
        long stride = cfg.antithetic ? 2 : 1;
        for (long i = s * stride; i < cfg.n_paths; i += detail::kLogicalStreams * stride) {
            double z = std::sqrt(y0), za = z;
            for (long k = 0; k < steps; ++k) {
                double xi = nd(rng);
                double th = detail::radial_theta(prior, p.kappa, z);
                max_theta[s] = std::max(max_theta[s], std::abs(th));
                z = std::max(z + (half_bessel / z - th) * cfg.dt + sdt * xi,
                             detail::kPositivityEps);
                if (cfg.antithetic) {
                    double tha = detail::radial_theta(prior, p.kappa, za);
                    za = std::max(za + (half_bessel / za - tha) * cfg.dt - sdt * xi,
                                  detail::kPositivityEps);
                }
            }
            batch.terminal[i] = z * z;
            if (cfg.antithetic && i + 1 < cfg.n_paths) batch.terminal[i + 1] = za * za;
        }
    });
    for (double m : max_theta) batch.max_theta_norm = std::max(batch.max_theta_norm, m);
    return batch;
}

// ---------------------------------------------------------------------------
// Discounted stopped-payoff estimation
// ---------------------------------------------------------------------------

/// First-exit rule from a union of open intervals; capped paths contribute 0.
/// radial = false simulates the linear reduced SDE, otherwise the radius chart.
inline MCEstimate estimate_stopped_value(
    bool radial, const AmbiguityParams& p, const PriorStrategy& prior, double y0,
    const SimConfig& cfg, const std::vector<std::pair<double, double>>& continuation,
    const Payoff& payoff) {
    if (radial)
        p.validate_radial();
    else
        p.validate_linear();
    cfg.validate();
    detail::validate_prior(prior, p.kappa, radial);

    if (!detail::in_continuation(continuation, y0)) {
        MCEstimate est;
        est.mean = payoff(y0);
        est.std_error = 0.0;
        est.n_effective = cfg.n_paths;
        est.fraction_stopped = 1.0;
        return est;
    }

    long steps = static_cast<long>(std::llround(cfg.horizon / cfg.dt));
    double sdt_lin = p.a_norm * std::sqrt(cfg.dt);
    double sdt = std::sqrt(cfg.dt);
    double half_bessel = 0.5 * (p.dim - 1);

    std::vector<detail::Accum> acc(detail::kLogicalStreams);
    long pair_count = cfg.antithetic ? (cfg.n_paths + 1) / 2 : cfg.n_paths;

    detail::run_streams(cfg.seed, [&](int s, std::mt19937_64& rng) {
        std::normal_distribution<double> nd;
        for (long i = s; i < pair_count; i += detail::kLogicalStreams) {
            double payout[2] = {0.0, 0.0};
            bool stopped[2] = {false, false};
            int nlegs = cfg.antithetic ? 2 : 1;
            double state[2];
            if (radial) {
                state[0] = state[1] = std::sqrt(y0);
            } else {
                state[0] = state[1] = y0;
            }
            int live = nlegs;
            for (long k = 0; k < steps && live > 0; ++k) {
                double xi = nd(rng);
                for (int leg = 0; leg < nlegs; ++leg) {
                    if (stopped[leg]) continue;
                    double noise = leg == 0 ? xi : -xi;
                    double y;
                    if (radial) {
                        double z = state[leg];
                        double th = detail::radial_theta(prior, p.kappa, z);
                        z = std::max(z + (half_bessel / z - th) * cfg.dt + sdt * noise,
                                     detail::kPositivityEps);
                        state[leg] = z;
                        y = z * z;
                    } else {
                        double th = detail::linear_theta(prior, p.kappa, state[leg]);
                        state[leg] += -th * p.a_norm * cfg.dt + sdt_lin * noise;
                        y = state[leg];
                    }
                    if (!detail::in_continuation(continuation, y)) {
                        payout[leg] = std::exp(-p.r * (k + 1) * cfg.dt) * payoff(y);
                        stopped[leg] = true;
                        --live;
                    }
                }
            }
            for (int leg = 0; leg < nlegs; ++leg) {
                if (stopped[leg]) {
                    ++acc[s].stopped;
                } else {
                    double y = radial ? state[leg] * state[leg] : state[leg];
                    acc[s].max_abs_payoff =
                        std::max(acc[s].max_abs_payoff, std::abs(payoff(y)));
                }
            }
            double sample = cfg.antithetic ? 0.5 * (payout[0] + payout[1]) : payout[0];
            acc[s].add(sample);
        }
    });
    detail::Accum total;
    for (const auto& a : acc) total.merge(a);
    long total_paths = cfg.antithetic ? 2 * pair_count : pair_count;
    return detail::finalize(total, total_paths, p.r, cfg.horizon);
}

// ---------------------------------------------------------------------------
// Supermartingale probe for the excessive family
// ---------------------------------------------------------------------------

/// Estimates E[e^{-r t} U_c(Y_t)] under the prior and returns it alongside
/// U_c(y0). Equality (within noise) holds exactly under the matching
/// worst-case prior; every other admissible prior gives lhs >= rhs.
inline std::pair<MCEstimate, double> supermartingale_check(
    bool radial, const AmbiguityParams& p, const PriorStrategy& prior, double y0,
    double t_check, const SimConfig& cfg,
    const std::function<double(double)>& uc) {
    SimConfig c2 = cfg;
    c2.horizon = t_check;
    PathBatch batch = radial ? simulate_radial(p, prior, y0, c2)
                             : simulate_linear(p, prior, y0, c2);
    detail::Accum a;
    double disc = std::exp(-p.r * t_check);
    for (double y : batch.terminal) a.add(disc * uc(y));
    MCEstimate est = detail::finalize(a, cfg.n_paths, p.r, t_check);
    est.fraction_stopped = 0.0;
    return {est, uc(y0)};
}

}  // namespace ambistop::mc

#endif  // AMBISTOP_MC_HPP
