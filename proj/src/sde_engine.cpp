#include "regimevol/sde_engine.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "regimevol/rng.hpp"

namespace regimevol {

void SimConfig::require_valid() const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
    if (dt > t_end) throw std::invalid_argument("dt must not exceed t_end");
    if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    if (thin_every < 1) throw std::invalid_argument("thin_every must be >= 1");
}

namespace {

inline double pow_theta(double x, double theta) {
    if (theta == 0.5) return std::sqrt(x);
    if (theta == 1.0) return x;
    return std::pow(x, theta);
}

inline double raw_step(double x, int i, double h, double dB, const ModelSpec& spec,
                       bool milstein) {
    const double a = spec.a[i], b = spec.b[i], sigma = spec.sigma[i], theta = spec.theta[i];
    double next = x + (a - b * x) * h + sigma * pow_theta(x, theta) * dB;
    if (milstein)
        next += 0.5 * sigma * sigma * theta * pow_theta(x, 2.0 * theta - 1.0) * (dB * dB - h);
    return next;
}

// Shared per-batch data so P(dt) is factored once, not per path.
struct ChainContext {
    Eigen::MatrixXd cum;  // row-wise CDF of P(dt); empty in Exact mode
};

ChainContext make_context(const ModelSpec& spec, const SimConfig& cfg) {
    ChainContext ctx;
    if (cfg.chain_mode == ChainMode::Discretized && spec.m > 1) {
        const Eigen::MatrixXd P = transition_matrix(Generator::from_model(spec), cfg.dt);
        ctx.cum.resize(spec.m, spec.m);
        for (int i = 0; i < spec.m; ++i) {
            double acc = 0.0;
            for (int j = 0; j < spec.m; ++j) ctx.cum(i, j) = (acc += P(i, j));
        }
    }
    return ctx;
}

Trajectory simulate_path_impl(const ModelSpec& spec, const SimConfig& cfg,
                              std::uint32_t path_index, const ChainContext& ctx) {
    const CounterRng rng(cfg.base_seed);
    const bool milstein = cfg.scheme == Scheme::Milstein;
    const auto n_grid = std::uint64_t(std::ceil(cfg.t_end / cfg.dt - 1e-9));

    RegimePath exact_path;
    std::size_t jump_cursor = 0;
    if (cfg.chain_mode == ChainMode::Exact && spec.m > 1)
        exact_path = sample_path_exact(Generator::from_model(spec), spec.initial_regime_index(),
                                       cfg.t_end, cfg.base_seed, path_index);

    Trajectory traj;
    traj.base_seed = cfg.base_seed;
    traj.path_index = path_index;
    traj.times.reserve(std::size_t(n_grid / std::uint64_t(cfg.thin_every)) + 2);
    traj.x.reserve(traj.times.capacity());
    traj.regimes.reserve(traj.times.capacity());

    double x = spec.x0;
    int regime = spec.initial_regime_index();
    traj.times.push_back(0.0);
    traj.x.push_back(x);
    traj.regimes.push_back(regime);

    std::uint64_t substep = 0;
    for (std::uint64_t k = 0; k < n_grid; ++k) {
        const double t0 = double(k) * cfg.dt;
        const double t1 = std::min(double(k + 1) * cfg.dt, cfg.t_end);

        if (cfg.chain_mode == ChainMode::Discretized && spec.m > 1 && k > 0) {
            // regime on [t0, t1) after k draws, matching sample_path_discretized
            const double u = rng.uniform(k - 1, path_index, RngStream::ChainDiscretized);
            int next = spec.m - 1;
            for (int j = 0; j < spec.m; ++j)
                if (u <= ctx.cum(regime, j)) {
                    next = j;
                    break;
                }
            regime = next;
        }

        // sub-steps: [t0, t1) split at chain jump times in Exact mode
        double t_sub = t0;
        while (t_sub < t1) {
            double t_next = t1;
            if (cfg.chain_mode == ChainMode::Exact && spec.m > 1) {
                while (jump_cursor < exact_path.jump_times.size() &&
                       exact_path.jump_times[jump_cursor] <= t_sub)
                    ++jump_cursor;
                regime = exact_path.states[jump_cursor];
                if (jump_cursor < exact_path.jump_times.size())
                    t_next = std::min(t_next, exact_path.jump_times[jump_cursor]);
            }
            const double h = t_next - t_sub;
            if (h <= 0.0) break;

            const double sqrt_h = std::sqrt(h);
            double dB = sqrt_h * rng.standard_normal(substep, path_index,
                                                     RngStream::GaussianIncrement);
            double x_raw = raw_step(x, regime, h, dB, spec, milstein);

            if (cfg.positivity == Positivity::Reflect) {
                if (x_raw <= 0.0) {
                    ++traj.reflections;
                    x = -x_raw;
                    if (x == 0.0)
                        x = spec.a[regime] * h * std::numeric_limits<double>::epsilon();
                } else {
                    x = x_raw;
                }
            } else {
                std::uint32_t retry = 0;
                while (x_raw <= 0.0 && retry < 100) {
                    ++retry;
                    dB = sqrt_h * rng.standard_normal(substep, path_index,
                                                      RngStream::RejectionRetry, retry);
                    x_raw = raw_step(x, regime, h, dB, spec, milstein);
                }
                if (x_raw <= 0.0) {
                    std::ostringstream os;
                    os << "positivity rejection failed after 100 redraws (path " << path_index
                       << ", t = " << t_next << ")";
                    throw std::runtime_error(os.str());
                }
                x = x_raw;
            }
            ++substep;
            t_sub = t_next;
        }

        if ((k + 1) % std::uint64_t(cfg.thin_every) == 0 || k + 1 == n_grid) {
            traj.times.push_back(t1);
            traj.x.push_back(x);
            traj.regimes.push_back(cfg.chain_mode == ChainMode::Exact && spec.m > 1
                                       ? exact_path.state_at(t1)
                                       : regime);
        }
    }
    traj.steps = substep;
    return traj;
}

}  // namespace

double milstein_step(double x, int regime, double dt, double dB, const ModelSpec& spec) {
    return raw_step(x, regime, dt, dB, spec, true);
}

double euler_step(double x, int regime, double dt, double dB, const ModelSpec& spec) {
    return raw_step(x, regime, dt, dB, spec, false);
}

Trajectory simulate_path(const ModelSpec& spec, const SimConfig& cfg, std::uint32_t path_index) {
    cfg.require_valid();
    return simulate_path_impl(spec, cfg, path_index, make_context(spec, cfg));
}

TrajectoryBatch simulate_batch(const ModelSpec& spec, const SimConfig& cfg, ExecutionMode mode) {
    cfg.require_valid();
    const ChainContext ctx = make_context(spec, cfg);

    TrajectoryBatch batch;
    batch.config = cfg;
    batch.model = spec;
    batch.paths.resize(std::size_t(cfg.n_paths));

    std::vector<std::string> errors;

    if (mode == ExecutionMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int k = 0; k < cfg.n_paths; ++k) {
            try {
                batch.paths[std::size_t(k)] =
                    simulate_path_impl(spec, cfg, std::uint32_t(k), ctx);
            } catch (const std::exception& e) {
#pragma omp critical
                errors.push_back(e.what());
            }
        }
    } else {
        for (int k = 0; k < cfg.n_paths; ++k) {
            try {
                batch.paths[std::size_t(k)] =
                    simulate_path_impl(spec, cfg, std::uint32_t(k), ctx);
            } catch (const std::exception& e) {
                errors.push_back(e.what());
            }
        }
    }

    if (!errors.empty()) {
        std::ostringstream os;
        os << errors.size() << " path(s) failed:";
        for (const auto& e : errors) os << "\n  " << e;
        throw std::runtime_error(os.str());
    }
    return batch;
}

std::uint64_t TrajectoryBatch::total_steps() const {
    std::uint64_t n = 0;
    for (const auto& p : paths) n += p.steps;
    return n;
}

std::uint64_t TrajectoryBatch::total_reflections() const {
    std::uint64_t n = 0;
    for (const auto& p : paths) n += p.reflections;
    return n;
}

double TrajectoryBatch::reflected_fraction() const {
    const std::uint64_t steps = total_steps();
    return steps == 0 ? 0.0 : double(total_reflections()) / double(steps);
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,x,regime\n";
    char buf[96];
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", traj.times[k], traj.x[k],
                      traj.regimes[k] + 1);
        out += buf;
    }
    return out;
}

}  // namespace regimevol
