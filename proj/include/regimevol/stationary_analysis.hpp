#pragma once

#include <string>
#include <vector>

#include "regimevol/ctmc.hpp"
#include "regimevol/sde_engine.hpp"

namespace regimevol {

/// Ensemble moment estimates Ê[X_t^p] with standard errors at grid times.
struct MomentCurve {
    std::vector<double> times;
    double p = 0.0;
    std::vector<double> estimates;
    std::vector<double> std_errors;
    int n_paths = 0;
};

/// Histogram density plus empirical CDF from post-burn-in samples.
struct EmpiricalLaw {
    std::vector<double> bin_edges;  // size = density.size() + 1
    std::vector<double> density;    // integrates to 1
    std::vector<double> cdf_grid;
    std::vector<double> cdf;
    std::size_t sample_count = 0;
    double burn_in = 0.0;
};

struct ErgodicAverage {
    std::string f_name;
    double time_average = 0.0;
    double t_end = 0.0;
    double burn_in = 0.0;
};

/// Sample mean of X_t^p across the batch at each grid time. Grid times must
/// coincide with stored trajectory times (thinning included). Order-stable:
/// the reduction runs in path-index order.
MomentCurve moment_curve(const TrajectoryBatch& batch, double p, const std::vector<double>& grid);

/// Pointwise transform (t, (1/t) log estimate), excluding t = 0. A zero
/// estimate maps to -infinity.
std::vector<std::pair<double, double>> lyapunov_estimate(const MomentCurve& curve);

/// Time-weighted histogram (Freedman-Diaconis width, at least 30 bins) and
/// weighted empirical CDF of the post-burn-in segment of a single long path.
/// Requires at least 1000 post-burn-in samples.
EmpiricalLaw empirical_law(const Trajectory& traj, double burn_in);

/// Registered bounded test functions for ergodic averages:
///   "x_min_K"      : x -> min(x, K)        (name "x_min_100" etc.)
///   "indicator_le" : x -> 1{x <= c}        (name "indicator_le_2.5" etc.)
///   "x_squared"    : x -> x^2
///   "x_trunc"      : x -> x 1{x <= C}      (name "x_trunc_100" etc.)
/// Unregistered names throw std::invalid_argument.
ErgodicAverage ergodic_average(const Trajectory& traj, const std::string& f_name, double burn_in);

/// Time fraction spent in each regime; sums to 1.
std::vector<double> regime_occupation(const RegimePath& path);

/// Two-sample Kolmogorov-Smirnov distance sup_x |F1(x) - F2(x)|.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// Post-burn-in state samples of a trajectory, keeping every `thin`-th stored
/// point (the KS diagnostic uses thin = 100 to blunt autocorrelation).
std::vector<double> thinned_samples(const Trajectory& traj, double burn_in, int thin);

/// Default burn-in: ten mean-reversion times of the slowest regime.
double default_burn_in(const ModelSpec& spec);

std::string moment_curve_csv(const MomentCurve& curve, const std::vector<double>& envelope);
std::string density_csv(const EmpiricalLaw& law);
std::string cdf_csv(const EmpiricalLaw& law);

}  // namespace regimevol
