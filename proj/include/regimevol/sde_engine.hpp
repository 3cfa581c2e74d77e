#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regimevol/ctmc.hpp"
#include "regimevol/model.hpp"

namespace regimevol {

enum class Scheme { Euler, Milstein };
enum class ChainMode { Exact, Discretized };
enum class Positivity { Reflect, Reject };

/// In Discretized mode the regime is redrawn every SDE step from the rows of
/// P(dt); in Exact mode jump times are inserted into the step grid so each
/// sub-step sees a constant regime and a Brownian increment of the actual
/// sub-step length.
struct SimConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    Scheme scheme = Scheme::Milstein;
    ChainMode chain_mode = ChainMode::Discretized;
    Positivity positivity = Positivity::Reflect;
    int n_paths = 1;
    std::uint64_t base_seed = 42;
    int thin_every = 1;  // store every n-th uniform grid point (t=0 and t_end always kept)

    void require_valid() const;
};

/// One simulated path sampled on the (thinned) uniform grid. x[k] > 0 always.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> x;
    std::vector<int> regimes;  // 0-based regime per grid point
    std::uint64_t steps = 0;   // sub-steps taken (including jump splits)
    std::uint64_t reflections = 0;
    std::uint64_t base_seed = 0;
    std::uint32_t path_index = 0;
};

struct TrajectoryBatch {
    std::vector<Trajectory> paths;
    SimConfig config;
    ModelSpec model;

    std::uint64_t total_steps() const;
    std::uint64_t total_reflections() const;
    double reflected_fraction() const;
};

enum class ExecutionMode { Serial, Parallel };

/// One raw scheme step (positivity handled by the caller):
///   x + (a_i - b_i x) dt + sigma_i x^theta_i dB
///     + sigma_i^2 theta_i x^{2 theta_i - 1} (dB^2 - dt) / 2.
double milstein_step(double x, int regime, double dt, double dB, const ModelSpec& spec);

/// Euler-Maruyama step: as milstein_step without the correction term.
double euler_step(double x, int regime, double dt, double dB, const ModelSpec& spec);

/// Simulates path `path_index`; bit-deterministic in (spec, cfg, path_index).
/// Reject-mode positivity failures (100 redraws exhausted) throw with the
/// path index and time attached.
Trajectory simulate_path(const ModelSpec& spec, const SimConfig& cfg, std::uint32_t path_index);

/// n_paths independent trajectories with seeds derived from
/// (base_seed, path_index). Parallel execution is path-level OpenMP; results
/// are identical to the serial reference (order-stable assembly by index).
TrajectoryBatch simulate_batch(const ModelSpec& spec, const SimConfig& cfg,
                               ExecutionMode mode = ExecutionMode::Parallel);

/// CSV export: t,x,regime (regime 1-based).
std::string trajectory_csv(const Trajectory& traj);

}  // namespace regimevol
