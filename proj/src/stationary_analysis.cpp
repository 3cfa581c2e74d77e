#include "regimevol/stationary_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace regimevol {

namespace {

std::size_t grid_index(const Trajectory& traj, double t) {
    const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t - 1e-9);
    if (it == traj.times.end() || std::abs(*it - t) > 1e-9) {
        std::ostringstream os;
        os << "grid time " << t << " is not a stored trajectory time";
        throw std::invalid_argument(os.str());
    }
    return std::size_t(it - traj.times.begin());
}

}  // namespace

MomentCurve moment_curve(const TrajectoryBatch& batch, double p, const std::vector<double>& grid) {
    if (batch.paths.empty()) throw std::invalid_argument("moment_curve: empty batch");
    for (double t : grid)
        if (t < 0.0 || t > batch.config.t_end + 1e-9)
            throw std::invalid_argument("moment_curve: grid time outside [0, t_end]");

    MomentCurve curve;
    curve.times = grid;
    curve.p = p;
    curve.n_paths = int(batch.paths.size());
    curve.estimates.resize(grid.size());
    curve.std_errors.resize(grid.size());

    std::vector<std::size_t> idx(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) idx[g] = grid_index(batch.paths.front(), grid[g]);

    const double n = double(batch.paths.size());
    std::vector<double> sum(grid.size(), 0.0), sumsq(grid.size(), 0.0);
    for (const auto& traj : batch.paths) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const double v = std::pow(traj.x[idx[g]], p);
            sum[g] += v;
            sumsq[g] += v * v;
        }
    }
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double mean = sum[g] / n;
        curve.estimates[g] = mean;
        const double var = n > 1 ? std::max(0.0, (sumsq[g] - n * mean * mean) / (n - 1.0)) : 0.0;
        curve.std_errors[g] = std::sqrt(var / n);
    }
    return curve;
}

std::vector<std::pair<double, double>> lyapunov_estimate(const MomentCurve& curve) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t g = 0; g < curve.times.size(); ++g) {
        const double t = curve.times[g];
        if (t <= 0.0) continue;
        const double est = curve.estimates[g];
        out.emplace_back(t, est > 0.0 ? std::log(est) / t
                                      : -std::numeric_limits<double>::infinity());
    }
    return out;
}

namespace {

// Post-burn-in samples with their local time weights (trapezoid cell widths);
// inserted jump points must not bias the law, hence the weighting.
void weighted_samples(const Trajectory& traj, double burn_in, std::vector<double>& xs,
                      std::vector<double>& ws) {
    const std::size_t n = traj.times.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (traj.times[k] < burn_in) continue;
        const double left = k > 0 ? traj.times[k] - traj.times[k - 1] : 0.0;
        const double right = k + 1 < n ? traj.times[k + 1] - traj.times[k] : 0.0;
        xs.push_back(traj.x[k]);
        ws.push_back(0.5 * (left + right));
    }
}

}  // namespace

EmpiricalLaw empirical_law(const Trajectory& traj, double burn_in) {
    if (traj.times.empty() || traj.times.back() <= burn_in)
        throw std::invalid_argument("empirical_law: t_end must exceed burn_in");

    std::vector<double> xs, ws;
    weighted_samples(traj, burn_in, xs, ws);
    if (xs.size() < 1000)
        throw std::invalid_argument("empirical_law: fewer than 1000 post-burn-in samples");

    EmpiricalLaw law;
    law.sample_count = xs.size();
    law.burn_in = burn_in;

    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&xs](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

    const double lo = xs[order.front()], hi = xs[order.back()];
    const double q1 = xs[order[order.size() / 4]], q3 = xs[order[(order.size() * 3) / 4]];
    const double fd_width = 2.0 * (q3 - q1) / std::cbrt(double(xs.size()));
    const double span = std::max(hi - lo, std::numeric_limits<double>::min());
    int n_bins = 30;
    if (fd_width > 0.0) n_bins = std::max(30, int(std::ceil(span / fd_width)));

    law.bin_edges.resize(std::size_t(n_bins) + 1);
    for (int k = 0; k <= n_bins; ++k)
        law.bin_edges[std::size_t(k)] = lo + span * double(k) / double(n_bins);
    law.density.assign(std::size_t(n_bins), 0.0);

    double total_w = 0.0;
    for (double w : ws) total_w += w;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        int bin = int((xs[i] - lo) / span * double(n_bins));
        bin = std::clamp(bin, 0, n_bins - 1);
        law.density[std::size_t(bin)] += ws[i];
    }
    const double bin_width = span / double(n_bins);
    for (auto& d : law.density) d /= total_w * bin_width;

    // weighted empirical CDF on the sorted samples
    law.cdf_grid.reserve(xs.size());
    law.cdf.reserve(xs.size());
    double acc = 0.0;
    for (std::size_t i : order) {
        acc += ws[i];
        law.cdf_grid.push_back(xs[i]);
        law.cdf.push_back(acc / total_w);
    }
    return law;
}

ErgodicAverage ergodic_average(const Trajectory& traj, const std::string& f_name, double burn_in) {
    if (traj.times.empty() || traj.times.back() <= burn_in)
        throw std::invalid_argument("ergodic_average: t_end must exceed burn_in");

    double param = 0.0;
    std::function<double(double)> f;
    if (f_name.rfind("x_min_", 0) == 0) {
        param = std::stod(f_name.substr(6));
        f = [param](double x) { return std::min(x, param); };
    } else if (f_name.rfind("indicator_le_", 0) == 0) {
        param = std::stod(f_name.substr(13));
        f = [param](double x) { return x <= param ? 1.0 : 0.0; };
    } else if (f_name == "x_squared") {
        f = [](double x) { return x * x; };
    } else if (f_name.rfind("x_trunc_", 0) == 0) {
        param = std::stod(f_name.substr(8));
        f = [param](double x) { return x <= param ? x : 0.0; };
    } else {
        throw std::invalid_argument("ergodic_average: unregistered test function \"" + f_name +
                                    "\"");
    }

    // trapezoidal time average over [burn_in, t_end]
    double integral = 0.0, t0 = 0.0;
    bool started = false;
    double prev_t = 0.0, prev_f = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (traj.times[k] < burn_in) continue;
        const double fx = f(traj.x[k]);
        if (started) integral += 0.5 * (prev_f + fx) * (traj.times[k] - prev_t);
        else t0 = traj.times[k];
        prev_t = traj.times[k];
        prev_f = fx;
        started = true;
    }
    const double duration = prev_t - t0;
    if (!(duration > 0.0)) throw std::invalid_argument("ergodic_average: empty averaging window");

    ErgodicAverage avg;
    avg.f_name = f_name;
    avg.time_average = integral / duration;
    avg.t_end = traj.times.back();
    avg.burn_in = burn_in;
    return avg;
}

std::vector<double> regime_occupation(const RegimePath& path) {
    if (!(path.t_end > 0.0)) throw std::invalid_argument("regime_occupation: t_end must be > 0");
    int m = 0;
    for (int s : path.states) m = std::max(m, s + 1);
    std::vector<double> occ(std::size_t(m), 0.0);
    double t0 = 0.0;
    for (std::size_t k = 0; k < path.states.size(); ++k) {
        const double t1 = k < path.jump_times.size() ? path.jump_times[k] : path.t_end;
        occ[std::size_t(path.states[k])] += t1 - t0;
        t0 = t1;
    }
    for (auto& o : occ) o /= path.t_end;
    return occ;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] <= b[ib]) ++ia;
        else ++ib;
        d = std::max(d, std::abs(double(ia) / double(a.size()) - double(ib) / double(b.size())));
    }
    return d;
}

std::vector<double> thinned_samples(const Trajectory& traj, double burn_in, int thin) {
    if (thin < 1) throw std::invalid_argument("thinned_samples: thin must be >= 1");
    std::vector<double> out;
    std::size_t count = 0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (traj.times[k] < burn_in) continue;
        if (count++ % std::size_t(thin) == 0) out.push_back(traj.x[k]);
    }
    return out;
}

double default_burn_in(const ModelSpec& spec) { return 10.0 / spec.b.minCoeff(); }

std::string moment_curve_csv(const MomentCurve& curve, const std::vector<double>& envelope) {
    std::string out = "t,estimate,std_error,envelope\n";
    char buf[160];
    for (std::size_t k = 0; k < curve.times.size(); ++k) {
        const double env = k < envelope.size() ? envelope[k]
                                               : std::numeric_limits<double>::quiet_NaN();
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", curve.times[k],
                      curve.estimates[k], curve.std_errors[k], env);
        out += buf;
    }
    return out;
}

std::string density_csv(const EmpiricalLaw& law) {
    std::string out = "bin_left,bin_right,density\n";
    char buf[160];
    for (std::size_t k = 0; k < law.density.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", law.bin_edges[k],
                      law.bin_edges[k + 1], law.density[k]);
        out += buf;
    }
    return out;
}

std::string cdf_csv(const EmpiricalLaw& law) {
    std::string out = "x,cdf\n";
    char buf[96];
    // thin to ~2000 rows; the CDF is for plotting, not for the KS diagnostic
    const std::size_t stride = std::max<std::size_t>(1, law.cdf_grid.size() / 2000);
    for (std::size_t k = 0; k < law.cdf_grid.size(); k += stride) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", law.cdf_grid[k], law.cdf[k]);
        out += buf;
    }
    return out;
}

}  // namespace regimevol
