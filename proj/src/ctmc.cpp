#include "regimevol/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "regimevol/rng.hpp"

namespace regimevol {

Generator::Generator(Eigen::MatrixXd q) : q_(std::move(q)) {
    if (q_.rows() != q_.cols() || q_.rows() < 1)
        throw std::invalid_argument("generator must be a square matrix");
    for (int i = 0; i < q_.rows(); ++i) {
        for (int j = 0; j < q_.cols(); ++j)
            if (i != j && !(q_(i, j) >= 0.0))
                throw std::invalid_argument("generator off-diagonals must be nonnegative");
        if (std::abs(q_.row(i).sum()) > kRowSumTol)
            throw std::invalid_argument("generator rows must sum to zero");
    }
}

int RegimePath::state_at(double t) const {
    const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    return states[std::size_t(it - jump_times.begin())];
}

namespace {

std::vector<bool> reachable_from(const Eigen::MatrixXd& q, int start, bool transpose) {
    const int m = int(q.rows());
    std::vector<bool> seen(m, false);
    std::vector<int> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        for (int j = 0; j < m; ++j) {
            const double rate = transpose ? q(j, i) : q(i, j);
            if (i != j && rate > 0.0 && !seen[j]) {
                seen[j] = true;
                stack.push_back(j);
            }
        }
    }
    return seen;
}

std::string state_set_to_string(const std::vector<bool>& mask, bool value) {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] == value) {
            if (!first) os << ",";
            os << (i + 1);
            first = false;
        }
    }
    os << "}";
    return os.str();
}

}  // namespace

bool is_irreducible(const Generator& g) {
    const auto fwd = reachable_from(g.q(), 0, false);
    const auto bwd = reachable_from(g.q(), 0, true);
    for (int i = 0; i < g.m(); ++i)
        if (!fwd[i] || !bwd[i]) return false;
    return true;
}

InvariantDistribution invariant_distribution(const Generator& g) {
    const auto fwd = reachable_from(g.q(), 0, false);
    const auto bwd = reachable_from(g.q(), 0, true);
    if (std::find(fwd.begin(), fwd.end(), false) != fwd.end())
        throw std::runtime_error("chain is reducible: states " + state_set_to_string(fwd, false) +
                                 " are unreachable from state 1");
    if (std::find(bwd.begin(), bwd.end(), false) != bwd.end())
        throw std::runtime_error("chain is reducible: states " + state_set_to_string(bwd, false) +
                                 " cannot reach state 1");

    const int m = g.m();
    Eigen::MatrixXd M = g.q().transpose();
    M.row(0).setOnes();  // replace one balance equation with sum(pi) = 1
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs[0] = 1.0;
    Eigen::VectorXd pi = M.fullPivLu().solve(rhs);

    for (int i = 0; i < m; ++i)
        if (pi[i] < 0.0 && pi[i] > -1e-12) pi[i] = 0.0;

    InvariantDistribution dist{std::move(pi)};
    if ((dist.pi.transpose() * g.q()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::runtime_error("invariant distribution solve failed the balance residual check");
    return dist;
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& M) {
    const int n = int(M.rows());
    const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = int(std::ceil(std::log2(norm / 0.5)));

    const Eigen::MatrixXd B = M / std::exp2(double(squarings));
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd sum = term;
    for (int k = 1; k <= 40; ++k) {
        term = (term * B) / double(k);
        sum += term;
        if (term.cwiseAbs().maxCoeff() <= 1e-17 * sum.cwiseAbs().maxCoeff()) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

Eigen::MatrixXd transition_matrix(const Generator& g, double delta) {
    if (delta < 0.0 || !std::isfinite(delta))
        throw std::invalid_argument("transition_matrix requires delta >= 0");
    if (delta == 0.0) return Eigen::MatrixXd::Identity(g.m(), g.m());
    return matrix_exponential(delta * g.q());
}

RegimePath sample_path_exact(const Generator& g, int i0, double t_end, std::uint64_t seed,
                             std::uint32_t path_index) {
    if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
    if (i0 < 0 || i0 >= g.m()) throw std::invalid_argument("initial regime out of range");

    const CounterRng rng(seed);
    RegimePath path;
    path.t_end = t_end;
    path.states.push_back(i0);

    double t = 0.0;
    int state = i0;
    std::uint64_t event = 0;
    while (true) {
        const double rate = -g.q()(state, state);
        if (rate <= 0.0) break;  // absorbing (only possible for m = 1)
        const auto u = rng.uniform_pair(event++, path_index, RngStream::ChainExact);
        t += -std::log(u[0]) / rate;
        if (t >= t_end) break;

        // next state j != state with probability q_ij / rate
        double acc = 0.0;
        int next = -1;
        for (int j = 0; j < g.m(); ++j) {
            if (j == state) continue;
            acc += g.q()(state, j) / rate;
            if (u[1] <= acc) {
                next = j;
                break;
            }
        }
        if (next < 0) {  // guard against accumulated rounding in acc
            for (int j = g.m() - 1; j >= 0; --j)
                if (j != state && g.q()(state, j) > 0.0) {
                    next = j;
                    break;
                }
        }
        path.jump_times.push_back(t);
        path.states.push_back(next);
        state = next;
    }
    return path;
}

RegimePath sample_path_discretized(const Generator& g, int i0, double t_end, double delta,
                                   std::uint64_t seed, std::uint32_t path_index) {
    if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (i0 < 0 || i0 >= g.m()) throw std::invalid_argument("initial regime out of range");

    const Eigen::MatrixXd P = transition_matrix(g, delta);
    const int m = g.m();
    Eigen::MatrixXd cum(m, m);
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j) cum(i, j) = (acc += P(i, j));
    }

    const CounterRng rng(seed);
    RegimePath path;
    path.t_end = t_end;
    path.states.push_back(i0);

    const auto n_steps = std::uint64_t(std::ceil(t_end / delta - 1e-9));
    int state = i0;
    for (std::uint64_t k = 0; k < n_steps; ++k) {
        const double u = rng.uniform(k, path_index, RngStream::ChainDiscretized);
        int next = m - 1;
        for (int j = 0; j < m; ++j)
            if (u <= cum(state, j)) {
                next = j;
                break;
            }
        if (next != state) {
            const double t = std::min((double(k) + 1.0) * delta, t_end);
            if (t < t_end) {
                path.jump_times.push_back(t);
                path.states.push_back(next);
            }
            state = next;
        }
    }
    return path;
}

PoissonSolution solve_poisson(const Generator& g, const Eigen::VectorXd& mu) {
    if (mu.size() != g.m()) throw std::invalid_argument("mu must have one entry per state");
    const Eigen::VectorXd pi = invariant_distribution(g).pi;  // throws if reducible

    const int m = g.m();
    const double mean = pi.dot(mu);
    const Eigen::VectorXd centered = mu - mean * Eigen::VectorXd::Ones(m);

    Eigen::MatrixXd A(m + 1, m);
    A.topRows(m) = g.q();
    A.bottomRows(1) = pi.transpose();
    Eigen::VectorXd rhs(m + 1);
    rhs.head(m) = -centered;
    rhs[m] = 0.0;

    PoissonSolution sol;
    sol.xi = A.colPivHouseholderQr().solve(rhs);
    sol.centered_rhs = centered;

    const double residual = (g.q() * sol.xi + centered).cwiseAbs().maxCoeff();
    if (residual > 1e-10)
        throw std::runtime_error("Poisson system solve residual " + std::to_string(residual) +
                                 " exceeds 1e-10");
    return sol;
}

std::string regime_path_csv(const RegimePath& path) {
    std::string out = "t_start,t_end,state\n";
    char buf[96];
    double t0 = 0.0;
    for (std::size_t k = 0; k < path.states.size(); ++k) {
        const double t1 = (k < path.jump_times.size()) ? path.jump_times[k] : path.t_end;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", t0, t1, path.states[k] + 1);
        out += buf;
        t0 = t1;
    }
    return out;
}

}  // namespace regimevol
